"""Multilinear n-functionals as coefficient tensors.

An order-n functional is an order-n tensor over R^d contracted against the
slot vectors.  Currying exposes the same tensor as a linear map into the
order-(n-1) functionals; the two norm estimators bound the supremum of |f|
against the product of norms (norm_n1) and against the Gaehler n-norm
(norm_nn, antisymmetric functionals only).
"""

from __future__ import annotations

import dataclasses
import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    NotAntisymmetricError,
    RangeError,
    RankError,
    ShapeError,
    UnsupportedSizeError,
)
from .nnorms import (
    DEFAULT_NNORM_CONFIG,
    NNormConfig,
    gahler_n_norm_estimate,
    gahler_n_norm_euclidean,
)
from .spaces import (
    PExponent,
    SpaceSpec,
    Vector,
    lp_norm_array,
    q_norming_array,
)

ANTISYM_MAX_ORDER = 6
DET_FUNCTIONAL_MAX_DIM = 6
DEGENERATE_DENOMINATOR = 1e-10


@dataclass(frozen=True, eq=False)
class MultiFunctional:
    """Order-n coefficient tensor; evaluation is full tensor contraction."""

    coeffs: np.ndarray
    space: SpaceSpec

    def __post_init__(self) -> None:
        arr = np.asarray(self.coeffs, dtype=float)
        if any(s != self.space.d for s in arr.shape):
            raise ShapeError(
                f"tensor axes {arr.shape} do not all match dimension {self.space.d}")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "coeffs", arr)

    @property
    def order(self) -> int:
        return self.coeffs.ndim

    def __call__(self, xs: Sequence[Vector]) -> float:
        return evaluate(self, xs)

    def to_dict(self) -> dict:
        return {"order": self.order, "space": self.space.to_dict(),
                "coeffs": self.coeffs.tolist()}

    @staticmethod
    def from_dict(data: dict) -> "MultiFunctional":
        spc = SpaceSpec.from_dict(data["space"])
        arr = np.asarray(data["coeffs"], dtype=float)
        if arr.ndim != int(data["order"]):
            raise ShapeError(
                f"declared order {data['order']} but coefficients have {arr.ndim} axes")
        return MultiFunctional(arr, spc)


def _eval_arrays(T: np.ndarray, xs_arrays: Sequence[np.ndarray]) -> float:
    res = T
    for x in xs_arrays:
        res = np.tensordot(res, x, axes=([0], [0]))
    return float(res)


def _partial_contraction(T: np.ndarray, xs_arrays: Sequence[np.ndarray],
                         j: int) -> np.ndarray:
    """Contract every slot except j; the result represents x_j -> f(...)."""
    res = T
    for m in range(len(xs_arrays)):
        if m == j:
            continue
        axis = 0 if m < j else 1
        res = np.tensordot(res, xs_arrays[m], axes=([axis], [0]))
    return res


def evaluate(f: MultiFunctional, xs: Sequence[Vector]) -> float:
    """f(x_1, ..., x_n) by tensor contraction."""
    xs = tuple(xs)
    if len(xs) != f.order:
        raise ShapeError(f"functional of order {f.order} applied to {len(xs)} vectors")
    for x in xs:
        if x.space.d != f.space.d:
            raise ShapeError("vector dimension does not match the functional")
    return _eval_arrays(f.coeffs, [x.coords for x in xs])


def add(f: MultiFunctional, h: MultiFunctional) -> MultiFunctional:
    if f.order != h.order or f.space.d != h.space.d:
        raise ShapeError("cannot add functionals of different order or dimension")
    return MultiFunctional(f.coeffs + h.coeffs, f.space)


def scale(alpha: float, f: MultiFunctional) -> MultiFunctional:
    return MultiFunctional(float(alpha) * f.coeffs, f.space)


def _perm_sign(perm: Sequence[int]) -> int:
    inversions = sum(1 for a in range(len(perm)) for b in range(a + 1, len(perm))
                     if perm[a] > perm[b])
    return 1 if inversions % 2 == 0 else -1


def antisymmetrize(f: MultiFunctional) -> MultiFunctional:
    """Signed average over all argument permutations; a projection onto
    the antisymmetric functionals (the 1/n! makes it idempotent)."""
    n = f.order
    if n > ANTISYM_MAX_ORDER:
        raise UnsupportedSizeError(f"antisymmetrize supports order <= {ANTISYM_MAX_ORDER}")
    if n <= 1:
        return f
    acc = np.zeros_like(f.coeffs)
    for perm in itertools.permutations(range(n)):
        acc += _perm_sign(perm) * f.coeffs.transpose(perm)
    return MultiFunctional(acc / math.factorial(n), f.space)


def is_antisymmetric(f: MultiFunctional, trials: int = 20, seed: int = 0,
                     tol: float = 1e-10) -> bool:
    """Randomized antisymmetry check.

    Samples tuples and transpositions, and also requires f to vanish on
    linearly dependent tuples; violations are normalized by the Frobenius
    size of the tensor times the product of vector norms.
    """
    n = f.order
    if n <= 1:
        return True
    T = f.coeffs
    frob = float(np.sqrt((T * T).sum()))
    if frob == 0.0:
        return True
    rng = np.random.default_rng([seed & 0xFFFFFFFF, 0xA517])
    d = f.space.d
    for _ in range(trials):
        xs = [rng.standard_normal(d) for _ in range(n)]
        scale_ = frob * math.prod(float(np.linalg.norm(x)) for x in xs) + 1.0
        i, j = rng.choice(n, size=2, replace=False)
        swapped = list(xs)
        swapped[i], swapped[j] = swapped[j], swapped[i]
        if abs(_eval_arrays(T, xs) + _eval_arrays(T, swapped)) > tol * scale_:
            return False
        mix = rng.uniform(-1.0, 1.0, size=n - 1)
        dep = list(xs)
        dep[-1] = sum(c * x for c, x in zip(mix, xs[:-1]))
        if abs(_eval_arrays(T, dep)) > tol * scale_:
            return False
    return True


@dataclass(frozen=True, eq=False)
class CurriedOperator:
    """The tensor of an order-n functional viewed as a linear map
    z -> f(..., z) into the order-(n-1) functionals."""

    inner: MultiFunctional

    def apply(self, z: Vector) -> "MultiFunctional | float":
        if z.space.d != self.inner.space.d:
            raise ShapeError("vector dimension does not match the operator")
        n = self.inner.order
        contracted = np.tensordot(self.inner.coeffs, z.coords, axes=([n - 1], [0]))
        if n == 1:
            return float(contracted)
        return MultiFunctional(contracted, self.inner.space)

    def __call__(self, z: Vector) -> "MultiFunctional | float":
        return self.apply(z)


def curry(f: MultiFunctional) -> CurriedOperator:
    """View f as the linear map z -> f(x_1, ..., x_{n-1}, z)."""
    if f.order < 1:
        raise ShapeError("curry needs order >= 1")
    return CurriedOperator(f)


def uncurry(u: CurriedOperator) -> MultiFunctional:
    """Inverse of curry; round trips are exact because both are views of
    one tensor."""
    return u.inner


def det_functional(d: int) -> MultiFunctional:
    """The order-d determinant functional on R^d: the canonical
    antisymmetric fixture."""
    if not (1 <= d <= DET_FUNCTIONAL_MAX_DIM):
        raise RangeError(f"det_functional supports 1 <= d <= {DET_FUNCTIONAL_MAX_DIM}")
    T = np.zeros((d,) * d)
    for perm in itertools.permutations(range(d)):
        T[perm] = _perm_sign(perm)
    return MultiFunctional(T, SpaceSpec(d, PExponent(2.0)))


# ---------------------------------------------------------------------------
# norm estimators
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class FunctionalNormEstimate:
    """Lower-bound estimate of a functional norm with its attaining witness."""

    value: float
    witness: tuple[Vector, ...]
    mode: str
    denominator_exact: bool
    restarts: int
    iterations_per_restart: tuple[int, ...]
    converged: bool

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "witness": [v.to_dict() for v in self.witness],
            "mode": self.mode,
            "denominator_exact": self.denominator_exact,
            "restarts": self.restarts,
            "iterations_per_restart": list(self.iterations_per_restart),
            "converged": self.converged,
        }


def _unit_slots(xs: Sequence[Vector] | Sequence[np.ndarray], pe: PExponent,
                d: int) -> list[np.ndarray] | None:
    out = []
    for x in xs:
        arr = x.coords if isinstance(x, Vector) else np.asarray(x, dtype=float)
        if arr.shape != (d,):
            return None
        nrm = lp_norm_array(arr, pe)
        if nrm == 0.0:
            return None
        out.append(arr / nrm)
    return out


def norm_n1(f: MultiFunctional, p: PExponent | float | None = None,
            cfg: NNormConfig = DEFAULT_NNORM_CONFIG,
            extra_starts: Sequence[Sequence[Vector]] = ()) -> FunctionalNormEstimate:
    """Estimate sup |f| over unit tuples by alternating slot maximization.

    With all slots but one frozen, f is linear in the free slot with a dual
    coefficient vector given by partial contraction; the exact slot optimum
    is its q-to-p norming vector.  Monotone ascent from cfg.restarts random
    unit starts (plus any caller-provided starts); value is a lower bound
    on the norm of f against the product of l^p norms.
    """
    pe = f.space.exponent if p is None else PExponent.of(p)
    n = f.order
    d = f.space.d
    slot_space = SpaceSpec(d, pe)
    if n == 0:
        return FunctionalNormEstimate(abs(float(f.coeffs)), (), "n1", True, 0, (), True)
    T = f.coeffs
    if not np.any(T):
        witness = tuple(Vector(np.eye(d)[0], slot_space) for _ in range(n))
        return FunctionalNormEstimate(0.0, witness, "n1", True, 0, (), True)

    rng = np.random.default_rng([cfg.seed & 0xFFFFFFFF, 0x51A1])
    starts: list[list[np.ndarray]] = []
    for _ in range(cfg.restarts):
        xs = _unit_slots([rng.standard_normal(d) for _ in range(n)], pe, d)
        if xs is not None:
            starts.append(xs)
    for extra in extra_starts:
        xs = _unit_slots(extra, pe, d)
        if xs is not None:
            starts.append(xs)
    if not starts:
        starts.append([np.eye(d)[k % d].copy() for k in range(n)])

    best_value = -1.0
    best_xs: list[np.ndarray] | None = None
    best_converged = True
    iteration_counts: list[int] = []
    for xs in starts:
        value = abs(_eval_arrays(T, xs))
        iters = 0
        converged = False
        for it in range(cfg.max_iters):
            previous = value
            stalled = True
            for j in range(n):
                phi = _partial_contraction(T, xs, j)
                if not np.any(phi):
                    continue
                stalled = False
                xs[j] = q_norming_array(phi, pe)
            value = abs(_eval_arrays(T, xs))
            iters = it + 1
            if stalled or value - previous <= cfg.conv_tol * max(previous, 1e-300):
                converged = True
                break
        iteration_counts.append(iters)
        if value > best_value:
            best_value, best_xs, best_converged = value, xs, converged

    assert best_xs is not None
    witness = tuple(Vector(x, slot_space) for x in best_xs)
    value = abs(_eval_arrays(T, best_xs))
    return FunctionalNormEstimate(value, witness, "n1", True, len(starts),
                                  tuple(iteration_counts), best_converged)


def _nn_denominator(rows_vectors: tuple[Vector, ...], pe: PExponent,
                    cfg: NNormConfig) -> tuple[float, bool]:
    if pe.p == 2.0:
        return gahler_n_norm_euclidean(rows_vectors), True
    inner_cfg = NNormConfig(restarts=2, max_iters=cfg.max_iters,
                            conv_tol=cfg.conv_tol, seed=cfg.seed,
                            witness_seeding=True)
    return gahler_n_norm_estimate(rows_vectors, pe, inner_cfg).value, False


def nn_ratio(f: MultiFunctional, xs: Sequence[Vector],
             p: PExponent | float | None = None,
             cfg: NNormConfig = DEFAULT_NNORM_CONFIG) -> float:
    """|f(xs)| over the Gaehler n-norm of xs, the quantity norm_nn maximizes."""
    pe = f.space.exponent if p is None else PExponent.of(p)
    xs = tuple(xs)
    denom, _ = _nn_denominator(xs, pe, cfg)
    if denom <= DEGENERATE_DENOMINATOR:
        raise ZeroDivisionError("tuple too close to dependent for the ratio")
    return abs(evaluate(f, xs)) / denom


_REFINE_DELTAS = (0.5, 0.1, 0.02)


def norm_nn(f: MultiFunctional, p: PExponent | float | None = None,
            cfg: NNormConfig = DEFAULT_NNORM_CONFIG,
            extra_starts: Sequence[Sequence[Vector]] = ()) -> FunctionalNormEstimate:
    """Estimate sup |f| / ||x_1, ..., x_n||_G for antisymmetric f.

    Random unit tuples (tuples with near-vanishing denominator are
    rejected) refined by coordinate-wise pattern search on each slot.  At
    p = 2 the denominator is the exact parallelepiped volume
    (denominator_exact); otherwise it is itself a lower-bound estimate and
    the ratio may overestimate, which the flag records.
    """
    pe = f.space.exponent if p is None else PExponent.of(p)
    if not is_antisymmetric(f, trials=24, seed=cfg.seed, tol=1e-8):
        raise NotAntisymmetricError("norm against the n-norm needs an antisymmetric functional")
    n = f.order
    d = f.space.d
    if n > d:
        raise RankError(f"order {n} exceeds dimension {d}")
    slot_space = SpaceSpec(d, pe)
    T = f.coeffs
    exact = pe.p == 2.0
    if n == 0 or not np.any(T):
        witness = tuple(Vector(np.eye(d)[k % d], slot_space) for k in range(n))
        return FunctionalNormEstimate(0.0, witness, "nn", exact, 0, (), True)

    def ratio(xs_arrays: list[np.ndarray]) -> float:
        vecs = tuple(Vector(x, slot_space) for x in xs_arrays)
        denom, _ = _nn_denominator(vecs, pe, cfg)
        if denom <= DEGENERATE_DENOMINATOR:
            return -math.inf
        return abs(_eval_arrays(T, xs_arrays)) / denom

    rng = np.random.default_rng([cfg.seed & 0xFFFFFFFF, 0x51A2])
    starts: list[list[np.ndarray]] = []
    for _ in range(cfg.restarts):
        for _attempt in range(8):
            xs = _unit_slots([rng.standard_normal(d) for _ in range(n)], pe, d)
            if xs is not None and ratio(xs) > -math.inf:
                starts.append(xs)
                break
    for extra in extra_starts:
        xs = _unit_slots(extra, pe, d)
        if xs is not None and ratio(xs) > -math.inf:
            starts.append(xs)
    if not starts:
        # coordinate tuple: unit denominator at p = 2, safe everywhere
        starts.append([np.eye(d)[k].copy() for k in range(n)])

    basis = np.eye(d)
    best_value = -math.inf
    best_xs: list[np.ndarray] | None = None
    iteration_counts: list[int] = []
    for xs in starts:
        value = ratio(xs)
        sweeps = 0
        for delta in _REFINE_DELTAS:
            improving = True
            while improving and sweeps < cfg.max_iters:
                improving = False
                sweeps += 1
                for j in range(n):
                    for k in range(d):
                        for sgn in (1.0, -1.0):
                            cand = xs[j] + sgn * delta * basis[k]
                            nrm = lp_norm_array(cand, pe)
                            if nrm == 0.0:
                                continue
                            trial = list(xs)
                            trial[j] = cand / nrm
                            r = ratio(trial)
                            if r > value * (1.0 + 1e-12):
                                xs = trial
                                value = r
                                improving = True
        iteration_counts.append(sweeps)
        if value > best_value:
            best_value, best_xs = value, xs

    assert best_xs is not None and best_value > -math.inf
    witness = tuple(Vector(x, slot_space) for x in best_xs)
    return FunctionalNormEstimate(float(best_value), witness, "nn", exact,
                                  len(starts), tuple(iteration_counts), True)


def op_norm(u: CurriedOperator, p: PExponent | float | None = None,
            cfg: NNormConfig = DEFAULT_NNORM_CONFIG,
            extra_starts: Sequence[Sequence[Vector]] = ()) -> FunctionalNormEstimate:
    """Operator norm of u; by the currying isometry this is norm_n1 of the
    underlying functional, shared code path and all."""
    est = norm_n1(uncurry(u), p, cfg, extra_starts)
    return dataclasses.replace(est, mode="op")


def op_norm_G(u: CurriedOperator, p: PExponent | float | None = None,
              cfg: NNormConfig = DEFAULT_NNORM_CONFIG,
              extra_starts: Sequence[Sequence[Vector]] = ()) -> FunctionalNormEstimate:
    """Norm of u against the Gaehler n-norm; norm_nn of the underlying
    functional, which must be antisymmetric."""
    est = norm_nn(uncurry(u), p, cfg, extra_starts)
    return dataclasses.replace(est, mode="opG")
