"""The two n-norms on l^p.

lp_n_norm is the determinant power-sum formula, reduced to strictly
increasing coordinate index tuples.  The Gaehler n-norm is a supremum of
|det [f_j(x_i)]| over n-tuples of dual unit-ball functionals; it has no
finite formula for general p, so gahler_n_norm_estimate reports a
certified lower bound computed by alternating maximization, bracketed by
the a priori sandwich bounds.  For p = 2 the supremum collapses to the
parallelepiped volume, which serves as an exact oracle.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .errors import DependentFamilyError, RankError, UnsupportedError
from .ortho import left_g_orthogonalize
from .spaces import (
    DualFunctional,
    PExponent,
    SpaceSpec,
    Vector,
    check_common_space,
    lp_norm,
    lp_norm_array,
    norming_functional_array,
    random_vector_from,
)

RANK_DEFICIENCY_TOL = 1e-12


def _minor_determinants(rows: np.ndarray, n: int) -> np.ndarray:
    """All n x n column-minor determinants of the n x d matrix rows."""
    d = rows.shape[1]
    if n == 1:
        return rows[0].copy()
    if n == 2:
        M = np.outer(rows[0], rows[1])
        D = M - M.T
        return D[np.triu_indices(d, k=1)]
    combos = list(itertools.combinations(range(d), n))
    stack = np.stack([rows[:, c] for c in combos])
    return np.linalg.det(stack)


def lp_n_norm(xs: Sequence[Vector], p: PExponent | float | None = None) -> float:
    """Determinant-formula n-norm on l^p.

    Power sum of |det| over strictly increasing coordinate index tuples;
    terms with repeated indices vanish and permuted tuples contribute equal
    absolute values, so this matches the all-tuples sum carrying a 1/n!
    factor.
    """
    xs = tuple(xs)
    spc = check_common_space(xs)
    pe = spc.exponent if p is None else PExponent.of(p)
    n = len(xs)
    if n > spc.d:
        raise RankError(f"{n} vectors in dimension {spc.d}")
    rows = np.array([v.coords for v in xs])
    dets = np.abs(_minor_determinants(rows, n))
    return lp_norm_array(dets, pe)


def gahler_n_norm_euclidean(xs: Sequence[Vector]) -> float:
    """Exact Gaehler n-norm at p = 2: the parallelepiped volume.

    Equals the square root of the Euclidean Gram determinant; computed as
    the product of singular values, which stays accurate for nearly
    dependent tuples where forming the Gram matrix would cancel.
    """
    xs = tuple(xs)
    spc = check_common_space(xs)
    if spc.exponent.p != 2.0:
        raise UnsupportedError("closed-form Gaehler norm requires p = 2")
    if len(xs) > spc.d:
        raise RankError(f"{len(xs)} vectors in dimension {spc.d}")
    rows = np.array([v.coords for v in xs])
    svals = np.linalg.svd(rows, compute_uv=False)
    return float(np.prod(svals))


@dataclass(frozen=True)
class NNormConfig:
    """Optimizer knobs shared by the Gaehler and functional-norm estimators."""

    restarts: int = 8
    max_iters: int = 100
    conv_tol: float = 1e-10
    seed: int = 0
    witness_seeding: bool = True

    def __post_init__(self) -> None:
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.conv_tol <= 0.0:
            raise ValueError("conv_tol must be positive")


DEFAULT_NNORM_CONFIG = NNormConfig()


@dataclass(frozen=True, eq=False)
class GahlerEstimate:
    """Certified lower bound for the Gaehler n-norm plus diagnostics.

    value is |det [f_j(x_i)]| at the returned functionals, each of dual
    norm at most 1, so it is a true lower bound on the supremum;
    lower_bound and upper_bound are the sandwich-bound brackets.
    """

    value: float
    functionals: tuple[DualFunctional, ...]
    lower_bound: float
    upper_bound: float
    iterations_per_restart: tuple[int, ...] = ()
    converged: bool = True

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "functionals": [f.to_dict() for f in self.functionals],
            "lower_bound": self.lower_bound,
            "upper_bound": self.upper_bound,
            "iterations_per_restart": list(self.iterations_per_restart),
            "converged": self.converged,
        }


def _cofactor_column(A: np.ndarray, j: int) -> np.ndarray:
    """Column j of the cofactor matrix of A."""
    n = A.shape[0]
    if n == 1:
        return np.ones(1)
    if n == 2:
        k = 1 - j
        sign = 1.0 if j % 2 == 0 else -1.0
        return sign * np.array([A[1, k], -A[0, k]])
    if n == 3:
        cols = [c for c in range(3) if c != j]
        out = np.empty(3)
        for i in range(3):
            r0, r1 = [r for r in range(3) if r != i]
            minor = A[r0, cols[0]] * A[r1, cols[1]] - A[r0, cols[1]] * A[r1, cols[0]]
            out[i] = minor if (i + j) % 2 == 0 else -minor
        return out
    B = np.delete(A, j, axis=1)
    minors = np.stack([np.delete(B, i, axis=0) for i in range(n)])
    dets = np.linalg.det(minors)
    signs = np.where((np.arange(n) + j) % 2 == 0, 1.0, -1.0)
    return signs * dets


def _alternating_ascent(rows: np.ndarray, W: np.ndarray, pe: PExponent,
                        max_iters: int, conv_tol: float,
                        trace: list[float] | None = None,
                        ) -> tuple[float, np.ndarray, int, bool]:
    """Cyclic exact slot maximization of |det(rows @ W.T)|.

    Each slot subproblem is linear in one functional, solved exactly by the
    norming functional of the cofactor contraction; the objective never
    decreases.  When given, trace collects the objective after every slot
    update.
    """
    n = rows.shape[0]
    A = rows @ W.T
    best = abs(float(np.linalg.det(A)))
    if trace is not None:
        trace.append(best)
    iters = 0
    converged = False
    for it in range(max_iters):
        previous = best
        stalled = True
        for j in range(n):
            cof = _cofactor_column(A, j)
            v = rows.T @ cof
            objective = lp_norm_array(v, pe)
            if objective == 0.0:
                continue
            stalled = False
            W[j] = norming_functional_array(v, pe)
            A[:, j] = rows @ W[j]
            if trace is not None:
                trace.append(objective)
        best = abs(float(np.linalg.det(A)))
        iters = it + 1
        if stalled or best - previous <= conv_tol * max(previous, 1e-300):
            converged = True
            break
    return best, W, iters, converged


def _zero_estimate(xs: tuple[Vector, ...], spc: SpaceSpec, pe: PExponent,
                   upper: float) -> GahlerEstimate:
    dual_space = SpaceSpec(spc.d, pe)
    zeros = tuple(DualFunctional(np.zeros(spc.d), dual_space) for _ in xs)
    return GahlerEstimate(0.0, zeros, 0.0, upper, (), True)


def gahler_n_norm_estimate(xs: Sequence[Vector],
                           p: PExponent | float | None = None,
                           cfg: NNormConfig = DEFAULT_NNORM_CONFIG) -> GahlerEstimate:
    """Alternating maximization of |det [f_j(x_i)]| over dual unit balls.

    Runs cfg.restarts random starts plus, when cfg.witness_seeding, one
    start at the norming functionals of the left g-orthogonalized tuple.
    That start already evaluates to the product of the orthogonalized norms,
    so the returned value is guaranteed to sit inside the sandwich brackets
    rather than merely expected to.  Exactly rank-deficient tuples yield
    value 0 with converged = True.
    """
    xs = tuple(xs)
    spc = check_common_space(xs)
    pe = spc.exponent if p is None else PExponent.of(p)
    n = len(xs)
    if n > spc.d:
        raise RankError(f"{n} vectors in dimension {spc.d}")
    rows = np.array([v.coords for v in xs])
    upper = float(math.factorial(n)) * math.prod(lp_norm(v, pe) for v in xs)

    svals = np.linalg.svd(rows, compute_uv=False)
    if svals[0] == 0.0 or svals[-1] <= RANK_DEFICIENCY_TOL * svals[0]:
        return _zero_estimate(xs, spc, pe, upper)

    lower = 0.0
    starts: list[np.ndarray] = []
    if cfg.witness_seeding:
        try:
            ores = left_g_orthogonalize(xs, pe)
        except DependentFamilyError:
            ores = None
        if ores is not None:
            lower = math.prod(lp_norm(v, pe) for v in ores.orthogonalized)
            starts.append(np.stack([
                norming_functional_array(v.coords, pe) for v in ores.orthogonalized]))

    rng = np.random.default_rng([cfg.seed & 0xFFFFFFFF, 0x6E4E])
    for _ in range(cfg.restarts):
        for _attempt in range(4):
            W0 = np.stack([
                norming_functional_array(rng.standard_normal(spc.d), pe)
                for _ in range(n)])
            if abs(np.linalg.det(rows @ W0.T)) > 0.0 or _attempt == 3:
                break
        starts.append(W0)

    best_value = -1.0
    best_W: np.ndarray | None = None
    best_converged = True
    iteration_counts: list[int] = []
    for W0 in starts:
        value, W, iters, converged = _alternating_ascent(
            rows, W0.copy(), pe, cfg.max_iters, cfg.conv_tol)
        iteration_counts.append(iters)
        if value > best_value:
            best_value, best_W, best_converged = value, W, converged

    assert best_W is not None
    dual_space = SpaceSpec(spc.d, pe)
    functionals = tuple(DualFunctional(w, dual_space) for w in best_W)
    value = abs(float(np.linalg.det(rows @ best_W.T)))
    return GahlerEstimate(value, functionals, lower, upper,
                          tuple(iteration_counts), best_converged)


def sandwich_bounds(xs: Sequence[Vector],
                    p: PExponent | float | None = None) -> tuple[float, float]:
    """(product of orthogonalized norms, n! times product of norms).

    The lower bound degrades to 0 on dependent tuples.
    """
    xs = tuple(xs)
    spc = check_common_space(xs)
    pe = spc.exponent if p is None else PExponent.of(p)
    upper = float(math.factorial(len(xs))) * math.prod(lp_norm(v, pe) for v in xs)
    try:
        ores = left_g_orthogonalize(xs, pe)
    except DependentFamilyError:
        return 0.0, upper
    lower = math.prod(lp_norm(v, pe) for v in ores.orthogonalized)
    return lower, upper


# ---------------------------------------------------------------------------
# axiom checking
# ---------------------------------------------------------------------------

AXIOM_NAMES = ("degeneracy", "permutation", "homogeneity", "triangle")


@dataclass(frozen=True)
class AxiomRecord:
    trials: int
    passes: int
    worst_violation: float

    @property
    def passed(self) -> bool:
        return self.passes == self.trials

    def to_dict(self) -> dict:
        return {"trials": self.trials, "passes": self.passes,
                "worst_violation": self.worst_violation}


@dataclass(frozen=True)
class AxiomReport:
    degeneracy: AxiomRecord
    permutation: AxiomRecord
    homogeneity: AxiomRecord
    triangle: AxiomRecord

    @property
    def all_passed(self) -> bool:
        return all(getattr(self, name).passed for name in AXIOM_NAMES)

    def to_dict(self) -> dict:
        return {name: getattr(self, name).to_dict() for name in AXIOM_NAMES}


def _normalize_tols(tol: float | Mapping[str, float]) -> dict[str, float]:
    if isinstance(tol, Mapping):
        missing = [name for name in AXIOM_NAMES if name not in tol]
        if missing:
            raise ValueError(f"tolerance map missing {missing}")
        return {name: float(tol[name]) for name in AXIOM_NAMES}
    return {name: float(tol) for name in AXIOM_NAMES}


def check_n_norm_axioms(norm: Callable[[tuple[Vector, ...]], float],
                        spec: SpaceSpec, n: int, trials: int, seed: int,
                        tol: float | Mapping[str, float]) -> AxiomReport:
    """Randomized check of the four n-norm axioms against an evaluator.

    degeneracy: exactly dependent tuples evaluate below tolerance and
    generic tuples above it; permutation: invariance under random
    reorderings; homogeneity: |alpha| scaling in the first slot; triangle:
    subadditivity in the first slot.  Violations are normalized by the
    scale of the quantities compared.
    """
    if n > spec.d:
        raise RankError(f"{n} vectors in dimension {spec.d}")
    tols = _normalize_tols(tol)
    rng = np.random.default_rng([seed & 0xFFFFFFFF, 0xA210])
    counts = {name: 0 for name in AXIOM_NAMES}
    worst = {name: 0.0 for name in AXIOM_NAMES}

    for _ in range(trials):
        xs = tuple(random_vector_from(rng, spec) for _ in range(n))
        base = norm(xs)

        if n == 1:
            dep = (Vector(np.zeros(spec.d), spec),)
        else:
            mix = rng.uniform(-1.0, 1.0, size=n - 1)
            last = np.zeros(spec.d)
            for c, v in zip(mix, xs[:-1]):
                last += c * v.coords
            dep = xs[:-1] + (Vector(last, spec),)
        dep_value = abs(norm(dep))
        ok = dep_value <= tols["degeneracy"] and base > tols["degeneracy"]
        counts["degeneracy"] += ok
        worst["degeneracy"] = max(worst["degeneracy"], dep_value)

        sigma = rng.permutation(n)
        permuted = tuple(xs[k] for k in sigma)
        perm_violation = abs(norm(permuted) - base) / (1.0 + base)
        counts["permutation"] += perm_violation <= tols["permutation"]
        worst["permutation"] = max(worst["permutation"], perm_violation)

        alpha = float(rng.uniform(-3.0, 3.0))
        scaled = (alpha * xs[0],) + xs[1:]
        hom_violation = abs(norm(scaled) - abs(alpha) * base) / (1.0 + abs(alpha) * base)
        counts["homogeneity"] += hom_violation <= tols["homogeneity"]
        worst["homogeneity"] = max(worst["homogeneity"], hom_violation)

        extra = random_vector_from(rng, spec)
        lhs = norm((xs[0] + extra,) + xs[1:])
        rhs = base + norm((extra,) + xs[1:])
        tri_violation = max(0.0, lhs - rhs) / (1.0 + rhs)
        counts["triangle"] += tri_violation <= tols["triangle"]
        worst["triangle"] = max(worst["triangle"], tri_violation)

    records = {name: AxiomRecord(trials, counts[name], worst[name])
               for name in AXIOM_NAMES}
    return AxiomReport(**records)
