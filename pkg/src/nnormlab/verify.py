"""Randomized property-verification suites.

Each suite draws seeded instances, checks one mathematical property at a
configured tolerance, and reports pass counts, the worst normalized
violation, and a serialized counterexample (with a re-run command) for the
first failure.  Reports are deterministic functions of the seed: every
trial derives its generator from (seed, property id, trial index), so
aggregation order and the parallel flag cannot change the outcome.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
import zlib
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, DependentFamilyError
from .functionals import (
    MultiFunctional,
    antisymmetrize,
    curry,
    det_functional,
    evaluate,
    norm_n1,
    norm_nn,
    op_norm,
    op_norm_G,
    uncurry,
)
from .nnorms import (
    NNormConfig,
    gahler_n_norm_estimate,
    gahler_n_norm_euclidean,
    lp_n_norm,
)
from .ortho import bordered_determinant_project, left_g_orthogonalize, project
from .sip import check_g_properties, g, g_numeric
from .spaces import (
    PExponent,
    SpaceSpec,
    Vector,
    lp_norm,
    random_vector_from,
)

DEFAULT_TOLERANCES: dict[str, float] = {
    "axioms.lp.degeneracy": 1e-9,
    "axioms.lp.permutation": 1e-12,
    "axioms.lp.homogeneity": 1e-10,
    "axioms.lp.triangle": 1e-10,
    "gahler.euclidean_exact": 1e-6,
    "gahler.sandwich": 1e-8,
    "gahler.orth_invariance_euclidean": 1e-9,
    "gahler.orth_invariance_general_p": 1e-4,
    "gahler.n1_equals_lp": 1e-8,
    "sip.closed_vs_numeric": 1e-6,
    "sip.g_properties": 1e-8,
    "ortho.left_orthogonality": 1e-8,
    "ortho.bordered_oracle": 1e-10,
    "ortho.euclidean_gram_schmidt": 1e-10,
    "fnorm.norm_sandwich": 1e-6,
    "fnorm.operator_sandwich": 1e-6,
    "fnorm.isometry": 0.0,
    "fnorm.desk_values": 1e-6,
    "fnorm.divergence_witness": 1e6,
}

# Base trial counts at the default trials_per_property = 200; other values
# rescale these proportionally.  Cell-structured suites count per cell.
BASE_TRIALS: dict[str, int] = {
    "axioms.lp.degeneracy": 200,
    "axioms.lp.permutation": 200,
    "axioms.lp.homogeneity": 200,
    "axioms.lp.triangle": 200,
    "gahler.euclidean_exact": 50,
    "gahler.sandwich": 200,
    "gahler.orth_invariance_euclidean": 200,
    "gahler.orth_invariance_general_p": 50,
    "gahler.n1_equals_lp": 8,
    "sip.closed_vs_numeric": 100,
    "sip.g_properties": 500,
    "ortho.left_orthogonality": 200,
    "ortho.bordered_oracle": 200,
    "ortho.euclidean_gram_schmidt": 200,
    "fnorm.norm_sandwich": 30,
    "fnorm.operator_sandwich": 30,
    "fnorm.isometry": 100,
    "fnorm.desk_values": 3,
    "fnorm.divergence_witness": 1,
}

MUTABLE_PROPERTIES = {
    "axioms.lp.degeneracy": "replace the n-norm by the sum of slot norms",
}

# advisory-only suites: recorded in the report, excluded from the verdict
# (two lower-bound estimates of one quantity need not agree to tolerance)
SOFT_PROPERTIES = frozenset({"gahler.orth_invariance_general_p"})


@dataclass(frozen=True)
class SuiteConfig:
    """Configuration for run_suite; (d, n) cells with n > d are skipped,
    but an order with no admissible dimension at all is a ConfigError."""

    seed: int = 0
    trials_per_property: int = 200
    dims: tuple[int, ...] = (2, 3, 4, 5)
    orders: tuple[int, ...] = (1, 2, 3)
    exponents: tuple[float, ...] = (1.0, 1.5, 2.0, 3.0)
    tolerances: Mapping[str, float] = field(default_factory=dict)
    parallel: bool = False

    def __post_init__(self) -> None:
        dims = tuple(int(d) for d in self.dims)
        orders = tuple(int(n) for n in self.orders)
        exponents = tuple(float(p) for p in self.exponents)
        if not dims or not orders or not exponents:
            raise ConfigError("dims, orders and exponents must be nonempty")
        if self.trials_per_property < 1:
            raise ConfigError("trials_per_property must be >= 1")
        if any(d < 1 for d in dims) or any(n < 1 for n in orders):
            raise ConfigError("dims and orders must be positive")
        for n in orders:
            if not any(d >= n for d in dims):
                raise ConfigError(f"order {n} has no dimension >= {n} in {dims}")
        for p in exponents:
            PExponent(p)
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if unknown:
            raise ConfigError(f"unknown tolerance keys {sorted(unknown)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "orders", orders)
        object.__setattr__(self, "exponents", exponents)
        object.__setattr__(self, "tolerances", dict(self.tolerances))

    def pairs(self) -> list[tuple[int, int]]:
        return [(d, n) for d in self.dims for n in self.orders if n <= d]

    def tolerance(self, prop_id: str) -> float:
        return float(self.tolerances.get(prop_id, DEFAULT_TOLERANCES[prop_id]))

    def trials_for(self, prop_id: str) -> int:
        base = BASE_TRIALS[prop_id]
        return max(1, round(base * self.trials_per_property / 200))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "trials_per_property": self.trials_per_property,
            "dims": list(self.dims),
            "orders": list(self.orders),
            "exponents": list(self.exponents),
            "tolerances": {k: self.tolerance(k) for k in sorted(DEFAULT_TOLERANCES)},
            "parallel": self.parallel,
        }


@dataclass(frozen=True)
class PropertyResult:
    property_id: str
    statement: str
    trials: int
    passes: int
    worst_violation: float
    counterexample: dict | None

    @property
    def passed(self) -> bool:
        return self.passes == self.trials

    def to_dict(self) -> dict:
        return {
            "property_id": self.property_id,
            "statement": self.statement,
            "trials": self.trials,
            "passes": self.passes,
            "worst_violation": self.worst_violation,
            "counterexample": self.counterexample,
        }


@dataclass(frozen=True)
class VerificationReport:
    config: dict
    properties: tuple[PropertyResult, ...]
    wall_time_ms: float

    @property
    def all_passed(self) -> bool:
        return all(p.passed for p in self.properties
                   if p.property_id not in SOFT_PROPERTIES)

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "properties": [p.to_dict() for p in self.properties],
            "wall_time_ms": self.wall_time_ms,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def write_report_atomic(report: VerificationReport, path: str) -> None:
    """Write the report via a temp file and rename, so readers never see a
    half-written file."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(prefix=".report-", suffix=".json", dir=directory)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(report.to_json())
            handle.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def rerun_command(cfg: SuiteConfig, prop_id: str, mutated: bool = False) -> str:
    """One command line that reproduces a property run exactly."""
    parts = [
        "nnormlab verify",
        f"--seed {cfg.seed}",
        f"--trials {cfg.trials_per_property}",
        "--dims " + ",".join(str(d) for d in cfg.dims),
        "--orders " + ",".join(str(n) for n in cfg.orders),
        "--p " + ",".join(format(p, "g") for p in cfg.exponents),
    ]
    if cfg.tolerances:
        parts.append("--tol " + ",".join(
            f"{k}={format(v, 'g')}" for k, v in sorted(cfg.tolerances.items())))
    parts.append(f"--only {prop_id}")
    if mutated:
        parts.append(f"--mutate {prop_id}")
    return " ".join(parts)


# ---------------------------------------------------------------------------
# instance generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class InstanceSpec:
    """Space plus tuple length / tensor order for instance generation."""

    space: SpaceSpec
    n: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ConfigError("instance order must be >= 1")


def _trial_rng(seed: int, prop_id: str, trial: int) -> np.random.Generator:
    return np.random.default_rng(
        [seed & 0xFFFFFFFF, zlib.crc32(prop_id.encode()), trial])


def generate_instance(kind: str, spec: InstanceSpec, seed: int):
    """Deterministic instance factory for the suites.

    tuple: n generic vectors.  antisymmetric_tensor: the signed average of
    a random tensor, redrawn while its Frobenius size is below 1e-6.
    operator: a random tensor viewed through curry.
    """
    rng = np.random.default_rng([seed & 0xFFFFFFFF, zlib.crc32(kind.encode())])
    d, n = spec.space.d, spec.n
    if kind == "tuple":
        return tuple(random_vector_from(rng, spec.space) for _ in range(n))
    if kind == "antisymmetric_tensor":
        while True:
            raw = MultiFunctional(rng.standard_normal((d,) * n), spec.space)
            f = antisymmetrize(raw)
            if float(np.sqrt((f.coeffs ** 2).sum())) >= 1e-6:
                return f
    if kind == "operator":
        return curry(MultiFunctional(rng.standard_normal((d,) * n), spec.space))
    raise ConfigError(f"unknown instance kind {kind!r}")


def _random_tuple(rng: np.random.Generator, spc: SpaceSpec, n: int) -> tuple[Vector, ...]:
    return tuple(random_vector_from(rng, spc) for _ in range(n))


def _antisymmetric_tensor(rng: np.random.Generator, spc: SpaceSpec,
                          n: int) -> MultiFunctional:
    while True:
        f = antisymmetrize(MultiFunctional(rng.standard_normal((spc.d,) * n), spc))
        if float(np.sqrt((f.coeffs ** 2).sum())) >= 1e-6:
            return f


def _serialize_tuple(xs: Sequence[Vector]) -> list[dict]:
    return [x.to_dict() for x in xs]


# ---------------------------------------------------------------------------
# property runners
# ---------------------------------------------------------------------------

class _Recorder:
    """Accumulates pass counts and captures the first counterexample."""

    def __init__(self, cfg: SuiteConfig, prop_id: str, mutated: bool = False):
        self.cfg = cfg
        self.prop_id = prop_id
        self.mutated = mutated
        self.trials = 0
        self.passes = 0
        self.worst = 0.0
        self.counterexample: dict | None = None

    def record(self, violation: float, tol: float, instance: dict, trial: int) -> None:
        self.trials += 1
        self.worst = max(self.worst, violation)
        if violation <= tol:
            self.passes += 1
        elif self.counterexample is None:
            self.counterexample = {
                "trial": trial,
                "violation": violation,
                "instance": instance,
                "rerun": rerun_command(self.cfg, self.prop_id, self.mutated),
            }

    def result(self, statement: str) -> PropertyResult:
        return PropertyResult(self.prop_id, statement, self.trials, self.passes,
                              self.worst, self.counterexample)


def _axiom_cells(cfg: SuiteConfig) -> list[tuple[SpaceSpec, int]]:
    return [(SpaceSpec(d, PExponent(p)), n)
            for (d, n) in cfg.pairs() for p in cfg.exponents]


NormEvaluator = Callable[[tuple[Vector, ...]], float]


def _mutant_sum_of_norms(xs: tuple[Vector, ...]) -> float:
    return sum(lp_norm(x) for x in xs)


def _run_axiom(cfg: SuiteConfig, prop_id: str, statement: str,
               check: Callable[[NormEvaluator, tuple[Vector, ...], SpaceSpec,
                                np.random.Generator], tuple[float, dict]],
               evaluator: NormEvaluator | None = None) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    per_cell = cfg.trials_for(prop_id)
    rec = _Recorder(cfg, prop_id, mutated=evaluator is not None)
    trial = 0
    for spc, n in _axiom_cells(cfg):
        norm: NormEvaluator = evaluator if evaluator is not None else (
            lambda xs, _p=spc.exponent: lp_n_norm(xs, _p))
        for _ in range(per_cell):
            rng = _trial_rng(cfg.seed, prop_id, trial)
            xs = _random_tuple(rng, spc, n)
            violation, extra = check(norm, xs, spc, rng)
            instance = {"d": spc.d, "n": n, "p": spc.p,
                        "tuple": _serialize_tuple(xs), **extra}
            rec.record(violation, tol, instance, trial)
            trial += 1
    return rec.result(statement)


def _check_degeneracy(norm: NormEvaluator, xs: tuple[Vector, ...],
                      spc: SpaceSpec, rng: np.random.Generator) -> tuple[float, dict]:
    n = len(xs)
    if n == 1:
        dep = (Vector(np.zeros(spc.d), spc),)
    else:
        mix = rng.uniform(-1.0, 1.0, size=n - 1)
        coords = np.zeros(spc.d)
        for c, v in zip(mix, xs[:-1]):
            coords += c * v.coords
        dep = xs[:-1] + (Vector(coords, spc),)
    dep_value = abs(norm(dep))
    generic_value = norm(xs)
    # fails either when a dependent tuple evaluates visibly nonzero or when
    # a generic tuple collapses toward zero; 1e300 keeps the report JSON
    # finite on the latter kind of failure
    violation = dep_value if generic_value > 1e-6 else 1e300
    return violation, {"dependent_tuple": _serialize_tuple(dep),
                       "dependent_value": dep_value,
                       "generic_value": generic_value}


def _check_permutation(norm: NormEvaluator, xs: tuple[Vector, ...],
                       spc: SpaceSpec, rng: np.random.Generator) -> tuple[float, dict]:
    base = norm(xs)
    sigma = rng.permutation(len(xs))
    permuted = tuple(xs[k] for k in sigma)
    violation = abs(norm(permuted) - base) / (1.0 + base)
    return violation, {"sigma": [int(k) + 1 for k in sigma], "value": base}


def _check_homogeneity(norm: NormEvaluator, xs: tuple[Vector, ...],
                       spc: SpaceSpec, rng: np.random.Generator) -> tuple[float, dict]:
    base = norm(xs)
    alpha = float(rng.uniform(-3.0, 3.0))
    scaled = norm((alpha * xs[0],) + xs[1:])
    violation = abs(scaled - abs(alpha) * base) / (1.0 + abs(alpha) * base)
    return violation, {"alpha": alpha, "value": base}


def _check_triangle(norm: NormEvaluator, xs: tuple[Vector, ...],
                    spc: SpaceSpec, rng: np.random.Generator) -> tuple[float, dict]:
    extra = random_vector_from(rng, spc)
    lhs = norm((xs[0] + extra,) + xs[1:])
    rhs = norm(xs) + norm((extra,) + xs[1:])
    violation = max(0.0, lhs - rhs) / (1.0 + rhs)
    return violation, {"extra": extra.to_dict(), "lhs": lhs, "rhs": rhs}


SANDWICH_CFG = NNormConfig(restarts=2, max_iters=60, seed=0, witness_seeding=True)
EXACTNESS_CFG = NNormConfig(restarts=4, max_iters=80, seed=0, witness_seeding=True)


def _run_gahler_euclidean_exact(cfg: SuiteConfig, prop_id: str,
                                statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    cells = [(d, n) for (d, n) in cfg.pairs() if d <= 5 and n <= 3]
    fixed = (Vector(np.array([3.0, 0.0, 0.0]), SpaceSpec(3, PExponent(2.0))),
             Vector(np.array([0.0, 4.0, 0.0]), SpaceSpec(3, PExponent(2.0))))
    trials = cfg.trials_for(prop_id)
    for trial in range(trials + 1):
        if trial == 0:
            xs = fixed
        else:
            rng = _trial_rng(cfg.seed, prop_id, trial)
            d, n = cells[(trial - 1) % len(cells)]
            xs = _random_tuple(rng, SpaceSpec(d, PExponent(2.0)), n)
        oracle = gahler_n_norm_euclidean(xs)
        est = gahler_n_norm_estimate(xs, None, SANDWICH_CFG if trial else EXACTNESS_CFG)
        violation = abs(est.value - oracle) / max(oracle, 1e-30)
        rec.record(violation, tol, {"tuple": _serialize_tuple(xs),
                                    "oracle": oracle, "estimate": est.value}, trial)
    return rec.result(statement)


def _run_gahler_sandwich(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    per_cell = cfg.trials_for(prop_id)
    rec = _Recorder(cfg, prop_id)
    trial = 0
    for spc, n in _axiom_cells(cfg):
        for _ in range(per_cell):
            rng = _trial_rng(cfg.seed, prop_id, trial)
            xs = _random_tuple(rng, spc, n)
            est = gahler_n_norm_estimate(xs, None, SANDWICH_CFG)
            violation = max(est.lower_bound - est.value, est.value - est.upper_bound,
                            0.0)
            rec.record(violation, tol, {
                "d": spc.d, "n": n, "p": spc.p,
                "tuple": _serialize_tuple(xs), "value": est.value,
                "lower": est.lower_bound, "upper": est.upper_bound}, trial)
            trial += 1
    return rec.result(statement)


def _run_gahler_orth_invariance(cfg: SuiteConfig, prop_id: str,
                                statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    cells = [(d, n) for (d, n) in cfg.pairs() if n >= 2]
    if not cells:
        cells = [(max(cfg.dims), max(n for n in cfg.orders))]
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        d, n = cells[trial % len(cells)]
        spc = SpaceSpec(d, PExponent(2.0))
        xs = _random_tuple(rng, spc, n)
        base = gahler_n_norm_euclidean(xs)
        try:
            ores = left_g_orthogonalize(xs)
        except DependentFamilyError:
            rec.record(0.0, tol, {}, trial)
            continue
        after = gahler_n_norm_euclidean(ores.orthogonalized)
        violation = abs(base - after) / max(base, 1e-30)
        rec.record(violation, tol, {"tuple": _serialize_tuple(xs),
                                    "before": base, "after": after}, trial)
    return rec.result(statement)


def _run_gahler_orth_invariance_general(cfg: SuiteConfig, prop_id: str,
                                        statement: str) -> PropertyResult:
    # advisory suite: both sides are lower-bound estimates sharing seeds and
    # witness seeding, so agreement is expected but not certified
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    cells = [(d, n, p) for (d, n) in cfg.pairs() if n >= 2 for p in cfg.exponents]
    if not cells:
        return rec.result(statement)
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        d, n, p = cells[trial % len(cells)]
        spc = SpaceSpec(d, PExponent(p))
        xs = _independent_tuple(rng, spc, n)
        before = gahler_n_norm_estimate(xs, None, SANDWICH_CFG).value
        after = gahler_n_norm_estimate(
            left_g_orthogonalize(xs).orthogonalized, None, SANDWICH_CFG).value
        violation = abs(before - after) / max(before, after, 1e-30)
        rec.record(violation, tol, {"d": d, "n": n, "p": p,
                                    "tuple": _serialize_tuple(xs),
                                    "before": before, "after": after}, trial)
    return rec.result(statement)


def _run_gahler_n1(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        p = cfg.exponents[trial % len(cfg.exponents)]
        d = cfg.dims[trial % len(cfg.dims)]
        spc = SpaceSpec(d, PExponent(p))
        x = random_vector_from(rng, spc)
        est = gahler_n_norm_estimate((x,), None, SANDWICH_CFG)
        expected = lp_norm(x)
        violation = abs(est.value - expected) / max(expected, 1e-30)
        rec.record(violation, tol, {"p": p, "vector": x.to_dict(),
                                    "estimate": est.value, "norm": expected}, trial)
    return rec.result(statement)


def _bounded_coords(rng: np.random.Generator, spc: SpaceSpec,
                    floor: float = 0.1) -> Vector:
    # Coordinates bounded away from zero keep the tangent-quotient oracle
    # inside its accuracy domain (the norm is non-smooth on coordinate
    # hyperplanes for p < 2).
    z = rng.standard_normal(spc.d)
    coords = np.sign(z) * (floor + np.abs(z))
    coords *= rng.uniform(0.5, 2.0)
    return Vector(coords, spc)


def _run_sip_closed_vs_numeric(cfg: SuiteConfig, prop_id: str,
                               statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    per_p = cfg.trials_for(prop_id)
    rec = _Recorder(cfg, prop_id)
    trial = 0
    for p in cfg.exponents:
        for _ in range(per_p):
            rng = _trial_rng(cfg.seed, prop_id, trial)
            d = cfg.dims[trial % len(cfg.dims)]
            spc = SpaceSpec(d, PExponent(p))
            x = _bounded_coords(rng, spc)
            y = random_vector_from(rng, spc)
            closed = g(x, y)
            numeric = g_numeric(x, y)
            violation = abs(closed - numeric)
            rec.record(violation, tol, {"p": p, "x": x.to_dict(), "y": y.to_dict(),
                                        "closed": closed, "numeric": numeric}, trial)
            trial += 1
    return rec.result(statement)


def _run_sip_properties(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        p = cfg.exponents[trial % len(cfg.exponents)]
        d = cfg.dims[trial % len(cfg.dims)]
        spc = SpaceSpec(d, PExponent(p))
        x = random_vector_from(rng, spc)
        y = random_vector_from(rng, spc)
        alpha = float(rng.uniform(-2.0, 2.0))
        beta = float(rng.uniform(-2.0, 2.0))
        report = check_g_properties(x, y, alpha, beta, None, tol)
        violation = max(report.violations.values())
        rec.record(violation, tol, {"p": p, "x": x.to_dict(), "y": y.to_dict(),
                                    "alpha": alpha, "beta": beta,
                                    "flags": report.to_dict()}, trial)
    return rec.result(statement)


def _independent_tuple(rng: np.random.Generator, spc: SpaceSpec,
                       n: int) -> tuple[Vector, ...]:
    for _ in range(16):
        xs = _random_tuple(rng, spc, n)
        try:
            left_g_orthogonalize(xs)
            return xs
        except DependentFamilyError:
            continue
    raise RuntimeError("could not draw an independent tuple")


def _run_ortho_left(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    cells = [(d, n, p) for (d, n) in cfg.pairs() if n >= 2 for p in cfg.exponents]
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        d, n, p = cells[trial % len(cells)]
        spc = SpaceSpec(d, PExponent(p))
        xs = _independent_tuple(rng, spc, n)
        ores = left_g_orthogonalize(xs)
        worst = 0.0
        for i in range(n):
            for j in range(i + 1, n):
                xi, xj = ores.orthogonalized[i], ores.orthogonalized[j]
                scale = 1.0 + lp_norm(xi) * lp_norm(xj)
                worst = max(worst, abs(g(xi, xj)) / scale)
        rec.record(worst, tol, {"d": d, "n": n, "p": p,
                                "tuple": _serialize_tuple(xs)}, trial)
    return rec.result(statement)


def _run_ortho_bordered(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        p = cfg.exponents[trial % len(cfg.exponents)]
        d = max(2, cfg.dims[trial % len(cfg.dims)])
        size = 1 + trial % min(3, d - 1)
        spc = SpaceSpec(d, PExponent(p))
        # the projection needs a nonsingular Gram matrix, which linear
        # independence alone does not give at p = 1; redraw until regular
        for _ in range(64):
            Y = _independent_tuple(rng, spc, size)
            x = random_vector_from(rng, spc)
            try:
                solved = project(x, Y)
                break
            except DependentFamilyError:
                continue
        else:
            raise RuntimeError("could not draw a Gram-regular family")
        oracle = bordered_determinant_project(x, Y)
        diff = float(np.linalg.norm(solved.coords - oracle.coords))
        violation = diff / (1.0 + float(np.linalg.norm(solved.coords)))
        rec.record(violation, tol, {"p": p, "x": x.to_dict(),
                                    "family": _serialize_tuple(Y)}, trial)
    return rec.result(statement)


def _classical_gram_schmidt(xs: tuple[Vector, ...]) -> list[np.ndarray]:
    out: list[np.ndarray] = []
    for x in xs:
        v = x.coords.copy()
        for u in out:
            v -= (float(u @ v) / float(u @ u)) * u
        out.append(v)
    return out


def _run_ortho_euclidean(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    cells = [(d, n) for (d, n) in cfg.pairs() if n >= 2]
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        d, n = cells[trial % len(cells)]
        spc = SpaceSpec(d, PExponent(2.0))
        xs = _independent_tuple(rng, spc, n)
        ours = left_g_orthogonalize(xs)
        classic = _classical_gram_schmidt(xs)
        worst = 0.0
        for mine, ref in zip(ours.orthogonalized, classic):
            worst = max(worst, float(np.linalg.norm(mine.coords - ref))
                        / (1.0 + float(np.linalg.norm(ref))))
        rec.record(worst, tol, {"d": d, "n": n, "tuple": _serialize_tuple(xs)}, trial)
    return rec.result(statement)


FNORM_CFG = NNormConfig(restarts=4, max_iters=60, seed=0, witness_seeding=True)


def sandwich_norm_pair(f: MultiFunctional, cfg: NNormConfig = FNORM_CFG,
                          via_operator: bool = False) -> tuple[float, float]:
    """Cross-seeded lower-bound pair (v_n1, v_nn) for the norm sandwich.

    The nn estimator starts from the n1 witness, which pins
    v_n1 <= n! v_nn; the n1 value is then floored by evaluating f on the
    slot-normalized left-orthogonalization of the nn witness, which at
    p = 2 reproduces the nn ratio exactly and pins v_nn <= v_n1.
    """
    if via_operator:
        u = curry(f)
        r1 = op_norm(u, None, cfg)
        rnn = op_norm_G(u, None, cfg, extra_starts=[r1.witness])
    else:
        r1 = norm_n1(f, None, cfg)
        rnn = norm_nn(f, None, cfg, extra_starts=[r1.witness])
    try:
        ores = left_g_orthogonalize(rnn.witness)
        unit = tuple(v * (1.0 / lp_norm(v)) for v in ores.orthogonalized)
        direct = abs(evaluate(f, unit))
    except DependentFamilyError:
        direct = 0.0
    return max(r1.value, direct), rnn.value


def _run_fnorm_sandwich(cfg: SuiteConfig, prop_id: str, statement: str,
                        via_operator: bool) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    cells = [(d, n) for (d, n) in cfg.pairs() if d <= 4 and 2 <= n <= 3]
    if not cells:
        cells = [(2, 2)]
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        d, n = cells[trial % len(cells)]
        spc = SpaceSpec(d, PExponent(2.0))
        f = _antisymmetric_tensor(rng, spc, n)
        run_cfg = NNormConfig(restarts=FNORM_CFG.restarts, max_iters=FNORM_CFG.max_iters,
                              seed=cfg.seed + trial, witness_seeding=True)
        v1, vnn = sandwich_norm_pair(f, run_cfg, via_operator=via_operator)
        violation = max(vnn - v1, v1 - math.factorial(n) * vnn, 0.0)
        rec.record(violation, tol, {"d": d, "n": n, "tensor": f.to_dict(),
                                    "norm_n1": v1, "norm_nn": vnn}, trial)
    return rec.result(statement)


def _run_fnorm_isometry(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    trials = cfg.trials_for(prop_id)
    for trial in range(trials):
        rng = _trial_rng(cfg.seed, prop_id, trial)
        d = min(4, cfg.dims[trial % len(cfg.dims)])
        n = 1 + trial % min(3, d)
        spc = SpaceSpec(d, PExponent(2.0))
        f = MultiFunctional(rng.standard_normal((d,) * n), spc)
        run_cfg = NNormConfig(restarts=3, max_iters=40, seed=cfg.seed + trial)
        direct = norm_n1(f, None, run_cfg)
        through_op = op_norm(curry(f), None, run_cfg)
        round_trip = uncurry(curry(f))
        z = random_vector_from(rng, spc)
        applied = curry(round_trip).apply(z)
        original = curry(f).apply(z)
        same_apply = (applied == original if n == 1
                      else bool(np.array_equal(applied.coeffs, original.coeffs)))
        exact = (direct.value == through_op.value
                 and np.array_equal(round_trip.coeffs, f.coeffs)
                 and same_apply)
        violation = 0.0 if exact else abs(direct.value - through_op.value) + 1e-9
        rec.record(violation, tol, {"d": d, "n": n, "tensor": f.to_dict(),
                                    "norm_n1": direct.value,
                                    "op_norm": through_op.value}, trial)
    return rec.result(statement)


def _run_fnorm_desk_values(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    tol = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    f = det_functional(2)
    run_cfg = NNormConfig(restarts=4, max_iters=60, seed=cfg.seed)
    n1 = norm_n1(f, None, run_cfg)
    nn = norm_nn(f, None, run_cfg)
    opv = op_norm(curry(f), None, run_cfg)
    for trial, (label, value) in enumerate(
            [("norm_n1", n1.value), ("norm_nn", nn.value), ("op_norm", opv.value)]):
        violation = abs(value - 1.0)
        rec.record(violation, tol, {"which": label, "value": value}, trial)
    return rec.result(statement)


def _run_fnorm_divergence(cfg: SuiteConfig, prop_id: str, statement: str) -> PropertyResult:
    threshold = cfg.tolerance(prop_id)
    rec = _Recorder(cfg, prop_id)
    spc = SpaceSpec(2, PExponent(2.0))
    T = np.zeros((2, 2))
    T[0, 1] = 1.0
    f = MultiFunctional(T, spc)
    eps = 1e-8
    x = Vector(np.array([1.0, 1.0]), spc)
    y = Vector(np.array([1.0, 1.0 + eps]), spc)
    numerator = abs(evaluate(f, (x, y)))
    denominator = gahler_n_norm_euclidean((x, y))
    ratio = numerator / denominator
    violation = 0.0 if ratio > threshold else threshold - ratio
    rec.record(violation, 0.0, {"epsilon": eps, "ratio": ratio,
                                "numerator": numerator,
                                "denominator": denominator}, 0)
    return rec.result(statement)


# ---------------------------------------------------------------------------
# registry and entry point
# ---------------------------------------------------------------------------

def _registry() -> list[tuple[str, str, Callable[..., PropertyResult]]]:
    return [
        ("axioms.lp.degeneracy",
         "||x1,...,xn||_p = 0 exactly on linearly dependent tuples",
         lambda cfg, pid, st, mut: _run_axiom(
             cfg, pid, st, _check_degeneracy,
             evaluator=_mutant_sum_of_norms if mut else None)),
        ("axioms.lp.permutation",
         "||x1,...,xn||_p is invariant under argument permutations",
         lambda cfg, pid, st, mut: _run_axiom(cfg, pid, st, _check_permutation)),
        ("axioms.lp.homogeneity",
         "||a x1, x2,...||_p = |a| ||x1, x2,...||_p",
         lambda cfg, pid, st, mut: _run_axiom(cfg, pid, st, _check_homogeneity)),
        ("axioms.lp.triangle",
         "||x1 + x', x2,...||_p <= ||x1, x2,...||_p + ||x', x2,...||_p",
         lambda cfg, pid, st, mut: _run_axiom(cfg, pid, st, _check_triangle)),
        ("gahler.euclidean_exact",
         "p = 2: the G-norm estimate matches sqrt(det Gram)",
         lambda cfg, pid, st, mut: _run_gahler_euclidean_exact(cfg, pid, st)),
        ("gahler.sandwich",
         "product of orthogonalized norms <= G-norm estimate <= n! product of norms",
         lambda cfg, pid, st, mut: _run_gahler_sandwich(cfg, pid, st)),
        ("gahler.orth_invariance_euclidean",
         "p = 2: the G-norm is unchanged by left g-orthogonalization",
         lambda cfg, pid, st, mut: _run_gahler_orth_invariance(cfg, pid, st)),
        ("gahler.orth_invariance_general_p",
         "advisory: G-norm estimates before/after orthogonalization agree",
         lambda cfg, pid, st, mut: _run_gahler_orth_invariance_general(cfg, pid, st)),
        ("gahler.n1_equals_lp",
         "n = 1: the G-norm equals ||x||_p",
         lambda cfg, pid, st, mut: _run_gahler_n1(cfg, pid, st)),
        ("sip.closed_vs_numeric",
         "closed-form g agrees with the tangent-average oracle",
         lambda cfg, pid, st, mut: _run_sip_closed_vs_numeric(cfg, pid, st)),
        ("sip.g_properties",
         "g satisfies identities G1-G4 and is linear in its second slot",
         lambda cfg, pid, st, mut: _run_sip_properties(cfg, pid, st)),
        ("ortho.left_orthogonality",
         "g(orthogonalized xi, orthogonalized xj) = 0 for i < j",
         lambda cfg, pid, st, mut: _run_ortho_left(cfg, pid, st)),
        ("ortho.bordered_oracle",
         "bordered-determinant projection equals the linear-solve projection",
         lambda cfg, pid, st, mut: _run_ortho_bordered(cfg, pid, st)),
        ("ortho.euclidean_gram_schmidt",
         "p = 2: left g-orthogonalization is classical Gram-Schmidt",
         lambda cfg, pid, st, mut: _run_ortho_euclidean(cfg, pid, st)),
        ("fnorm.norm_sandwich",
         "antisymmetric f: ||f||_nn <= ||f||_n1 <= n! ||f||_nn",
         lambda cfg, pid, st, mut: _run_fnorm_sandwich(cfg, pid, st, False)),
        ("fnorm.operator_sandwich",
         "||u||_G <= ||u||_op <= n! ||u||_G through curry/uncurry",
         lambda cfg, pid, st, mut: _run_fnorm_sandwich(cfg, pid, st, True)),
        ("fnorm.isometry",
         "||f||_n1 = ||u_f||_op and curry/uncurry round trips are exact",
         lambda cfg, pid, st, mut: _run_fnorm_isometry(cfg, pid, st)),
        ("fnorm.desk_values",
         "the R^2 determinant functional has unit n1, nn and op norms",
         lambda cfg, pid, st, mut: _run_fnorm_desk_values(cfg, pid, st)),
        ("fnorm.divergence_witness",
         "a non-antisymmetric functional has unbounded |f| / G-norm ratio",
         lambda cfg, pid, st, mut: _run_fnorm_divergence(cfg, pid, st)),
    ]


def property_ids() -> list[str]:
    return [pid for pid, _, _ in _registry()]


def run_suite(cfg: SuiteConfig, only: Sequence[str] | None = None,
              mutate: str | None = None) -> VerificationReport:
    """Run every property suite and assemble the deterministic report.

    only restricts to the named property ids; mutate swaps in a known-bad
    evaluator for a supported property, for exercising the failure path
    end to end.
    """
    registry = _registry()
    known = {pid for pid, _, _ in registry}
    if only is not None:
        missing = set(only) - known
        if missing:
            raise ConfigError(f"unknown property ids {sorted(missing)}")
        registry = [entry for entry in registry if entry[0] in set(only)]
    if mutate is not None and mutate not in MUTABLE_PROPERTIES:
        raise ConfigError(
            f"mutation supported only for {sorted(MUTABLE_PROPERTIES)}, got {mutate!r}")
    start = time.perf_counter()
    results = []
    for pid, statement, runner in registry:
        results.append(runner(cfg, pid, statement, mutate == pid))
    wall_ms = (time.perf_counter() - start) * 1000.0
    return VerificationReport(cfg.to_dict(), tuple(results), wall_ms)
