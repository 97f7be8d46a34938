"""Command-line interface.

Subcommands evaluate the n-norms, the semi-inner product, projections,
functional norms and sandwich bounds on JSON inputs, and run the property
verification suites.  Exit codes: 0 success / all properties pass,
1 property failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import NnormlabError
from .functionals import MultiFunctional, curry, norm_n1, norm_nn, op_norm, op_norm_G
from .nnorms import NNormConfig, gahler_n_norm_estimate, lp_n_norm, sandwich_bounds
from .ortho import left_g_orthogonalize
from .sip import g, g_numeric, is_g_orthogonal, tau
from .spaces import Vector, check_common_space
from .verify import (
    MUTABLE_PROPERTIES,
    SOFT_PROPERTIES,
    SuiteConfig,
    property_ids,
    run_suite,
    write_report_atomic,
)


def _load_json(path: str):
    with open(path) as handle:
        return json.load(handle)


def _load_tuple(path: str, p: float | None) -> tuple[Vector, ...]:
    data = _load_json(path)
    if not isinstance(data, list) or not data:
        raise ValueError("expected a nonempty JSON array of vector objects")
    vectors = []
    for item in data:
        if p is not None:
            item = {"space": {"d": item["space"]["d"], "p": p},
                    "coords": item["coords"]}
        vectors.append(Vector.from_dict(item))
    check_common_space(vectors)
    return tuple(vectors)


def _load_tensor(path: str, p: float | None) -> MultiFunctional:
    data = _load_json(path)
    if p is not None:
        data = dict(data)
        data["space"] = {"d": data["space"]["d"], "p": p}
    return MultiFunctional.from_dict(data)


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(part) for part in text.split(",") if part)


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(part) for part in text.split(",") if part)


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"expected a boolean, got {text!r}")


def _parse_tol_map(text: str) -> dict[str, float]:
    out: dict[str, float] = {}
    for part in text.split(","):
        if not part:
            continue
        key, _, value = part.partition("=")
        if not value:
            raise argparse.ArgumentTypeError(f"expected prop=value, got {part!r}")
        out[key.strip()] = float(value)
    return out


def _nnorm_cfg(args: argparse.Namespace) -> NNormConfig:
    return NNormConfig(restarts=args.restarts, seed=args.seed)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nnormlab",
        description="n-norms, semi-inner products and functional norms on l^p")
    sub = parser.add_subparsers(dest="command", required=True)

    nn = sub.add_parser("nnorm", help="evaluate an n-norm on a JSON tuple file")
    nn.add_argument("file")
    nn.add_argument("--p", type=float, default=None,
                    help="override the exponent from the file")
    nn.add_argument("--gahler", action="store_true",
                    help="estimate the Gaehler n-norm instead of the l^p formula")
    nn.add_argument("--json", action="store_true",
                    help="print the full estimate record instead of the value")
    nn.add_argument("--seed", type=int, default=0)
    nn.add_argument("--restarts", type=int, default=8)

    sp = sub.add_parser("sip", help="semi-inner product report for a vector pair")
    sp.add_argument("file", help="JSON array with exactly two vectors")
    sp.add_argument("--p", type=float, default=None)
    sp.add_argument("--tol", type=float, default=1e-8,
                    help="orthogonality tolerance")

    orth = sub.add_parser("orth", help="left g-orthogonalize a JSON tuple file")
    orth.add_argument("file")
    orth.add_argument("--p", type=float, default=None)
    orth.add_argument("--out", default=None, help="write JSON here instead of stdout")

    fn = sub.add_parser("fnorm", help="functional norm estimate for a JSON tensor")
    fn.add_argument("file")
    fn.add_argument("--mode", choices=("n1", "nn", "op", "opG"), default="n1")
    fn.add_argument("--p", type=float, default=None)
    fn.add_argument("--seed", type=int, default=0)
    fn.add_argument("--restarts", type=int, default=8)

    bd = sub.add_parser("bounds", help="sandwich bounds for a JSON tuple file")
    bd.add_argument("file")
    bd.add_argument("--p", type=float, default=None)

    vf = sub.add_parser("verify", help="run the property verification suites")
    vf.add_argument("--seed", type=int, default=0)
    vf.add_argument("--trials", type=int, default=200,
                    help="per-property trial budget (200 keeps the standard counts)")
    vf.add_argument("--dims", type=_parse_int_list, default=(2, 3, 4, 5))
    vf.add_argument("--orders", type=_parse_int_list, default=(1, 2, 3))
    vf.add_argument("--p", type=_parse_float_list, default=(1.0, 1.5, 2.0, 3.0),
                    help="comma-separated exponents")
    vf.add_argument("--tol", type=_parse_tol_map, default={},
                    help="tolerance overrides as prop=value,...")
    vf.add_argument("--parallel", type=_parse_bool, default=False)
    vf.add_argument("--out", default=None, help="report path (JSON)")
    vf.add_argument("--only", action="append", default=None,
                    help="restrict to a property id (repeatable)")
    vf.add_argument("--mutate", default=None,
                    help="self-test: corrupt one evaluator; supported: "
                         + ", ".join(sorted(MUTABLE_PROPERTIES)))
    vf.add_argument("--list", action="store_true", help="list property ids and exit")
    return parser


def _cmd_nnorm(args: argparse.Namespace) -> int:
    xs = _load_tuple(args.file, args.p)
    if args.gahler:
        est = gahler_n_norm_estimate(xs, None, _nnorm_cfg(args))
        if args.json:
            print(json.dumps(est.to_dict(), indent=2, sort_keys=True))
        else:
            print(f"{est.value:.12g}")
    else:
        value = lp_n_norm(xs)
        if args.json:
            print(json.dumps({"value": value}, sort_keys=True))
        else:
            print(f"{value:.12g}")
    return 0


def _cmd_sip(args: argparse.Namespace) -> int:
    xs = _load_tuple(args.file, args.p)
    if len(xs) != 2:
        raise ValueError("sip expects exactly two vectors")
    x, y = xs
    pair = tau(x, y)
    payload = {
        "exponent": x.space.exponent.to_dict(),
        "g": g(x, y),
        "g_numeric": g_numeric(x, y),
        "tau_minus": pair.tau_minus,
        "tau_plus": pair.tau_plus,
        "orthogonal": is_g_orthogonal(x, y, tol=args.tol),
        "tol": args.tol,
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_orth(args: argparse.Namespace) -> int:
    xs = _load_tuple(args.file, args.p)
    result = left_g_orthogonalize(xs)
    text = json.dumps(result.to_dict(), indent=2, sort_keys=True)
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(text + "\n")
    else:
        print(text)
    return 0


def _cmd_fnorm(args: argparse.Namespace) -> int:
    f = _load_tensor(args.file, args.p)
    cfg = _nnorm_cfg(args)
    if args.mode == "n1":
        est = norm_n1(f, None, cfg)
    elif args.mode == "nn":
        est = norm_nn(f, None, cfg)
    elif args.mode == "op":
        est = op_norm(curry(f), None, cfg)
    else:
        est = op_norm_G(curry(f), None, cfg)
    payload = {"value": est.value, "mode": est.mode,
               "denominator_exact": est.denominator_exact,
               "converged": est.converged}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    xs = _load_tuple(args.file, args.p)
    lower, upper = sandwich_bounds(xs)
    print(json.dumps({"lower": lower, "upper": upper}, sort_keys=True))
    return 0


def _cmd_verify(args: argparse.Namespace) -> int:
    if args.list:
        for pid in property_ids():
            print(pid)
        return 0
    cfg = SuiteConfig(seed=args.seed, trials_per_property=args.trials,
                      dims=args.dims, orders=args.orders, exponents=args.p,
                      tolerances=args.tol, parallel=args.parallel)
    report = run_suite(cfg, only=args.only, mutate=args.mutate)
    for prop in report.properties:
        status = "PASS" if prop.passed else "FAIL"
        if prop.property_id in SOFT_PROPERTIES:
            status = "SOFT-" + status
        print(f"{status} {prop.property_id} ({prop.passes}/{prop.trials}, "
              f"worst {prop.worst_violation:.3e})")
    if args.out:
        write_report_atomic(report, args.out)
        print(f"report written to {args.out}")
    print("all properties passed" if report.all_passed else "PROPERTY FAILURES")
    return 0 if report.all_passed else 1


def cli_main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(list(argv) if argv is not None else None)
    except SystemExit as exc:
        code = exc.code if isinstance(exc.code, int) else 2
        return 0 if code == 0 else 2
    handlers = {
        "nnorm": _cmd_nnorm,
        "sip": _cmd_sip,
        "orth": _cmd_orth,
        "fnorm": _cmd_fnorm,
        "bounds": _cmd_bounds,
        "verify": _cmd_verify,
    }
    try:
        return handlers[args.command](args)
    except (NnormlabError, ValueError, KeyError, OSError,
            json.JSONDecodeError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(cli_main())


if __name__ == "__main__":
    main()
