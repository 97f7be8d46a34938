"""Finite-dimensional real l^p spaces.

Vectors, l^p norms, Hoelder duality (norming functionals), small exact
determinants, permutation signs, and seeded random vector generators.
Everything here is a pure function of its arguments; the types are
immutable after construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import (
    DimensionError,
    RangeError,
    ShapeError,
    ZeroVectorError,
)

P_MIN = 1.0
P_MAX = 16.0
DET_MAX_SIZE = 8

Conditioning = Literal["generic", "near_dependent", "unit_sphere"]


@dataclass(frozen=True)
class PExponent:
    """An l^p exponent together with its Hoelder-dual exponent q.

    1/p + 1/q = 1; p = 1 pairs with q = inf.  p is capped at 16 because
    the (p-1)-power formulas used for norming functionals lose double
    precision beyond that.
    """

    p: float
    q: float = field(init=False)

    def __post_init__(self) -> None:
        p = float(self.p)
        if not (P_MIN <= p <= P_MAX):
            raise RangeError(f"p must lie in [{P_MIN}, {P_MAX}], got {p}")
        object.__setattr__(self, "p", p)
        q = math.inf if p == 1.0 else p / (p - 1.0)
        object.__setattr__(self, "q", q)

    @property
    def is_one(self) -> bool:
        return self.p == 1.0

    def to_dict(self) -> dict:
        # q = inf has no portable JSON encoding, so it goes out as "inf"
        return {"p": self.p, "q": "inf" if math.isinf(self.q) else self.q}

    @staticmethod
    def of(p: "PExponent | float | int") -> "PExponent":
        return p if isinstance(p, PExponent) else PExponent(float(p))


def dual_exponent(p: float) -> PExponent:
    """Exponent object for p, carrying q with 1/p + 1/q = 1 (q = inf at p = 1)."""
    return PExponent(float(p))


@dataclass(frozen=True)
class SpaceSpec:
    """Dimension d plus the l^p exponent; tags every Vector."""

    d: int
    exponent: PExponent

    def __post_init__(self) -> None:
        if int(self.d) < 1:
            raise DimensionError(f"dimension must be >= 1, got {self.d}")
        object.__setattr__(self, "d", int(self.d))
        object.__setattr__(self, "exponent", PExponent.of(self.exponent))

    @property
    def p(self) -> float:
        return self.exponent.p

    def to_dict(self) -> dict:
        return {"d": self.d, "p": self.p}

    @staticmethod
    def from_dict(data: dict) -> "SpaceSpec":
        return SpaceSpec(int(data["d"]), PExponent(float(data["p"])))


def space(d: int, p: float = 2.0) -> SpaceSpec:
    return SpaceSpec(d, PExponent.of(p))


def _frozen_array(values: Iterable[float]) -> np.ndarray:
    arr = np.array(list(values) if not isinstance(values, np.ndarray) else values,
                   dtype=float)
    if arr.ndim != 1:
        raise DimensionError(f"expected a 1-d coordinate list, got shape {arr.shape}")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Vector:
    """A point of R^d tagged with its l^p space."""

    coords: np.ndarray
    space: SpaceSpec

    def __post_init__(self) -> None:
        arr = _frozen_array(self.coords)
        if arr.shape[0] != self.space.d:
            raise DimensionError(
                f"vector has {arr.shape[0]} coordinates, space expects {self.space.d}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("vector coordinates must be finite")
        object.__setattr__(self, "coords", arr)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, Vector) and self.space == other.space
                and np.array_equal(self.coords, other.coords))

    def __add__(self, other: "Vector") -> "Vector":
        _check_same_space(self, other)
        return Vector(self.coords + other.coords, self.space)

    def __sub__(self, other: "Vector") -> "Vector":
        _check_same_space(self, other)
        return Vector(self.coords - other.coords, self.space)

    def __mul__(self, scalar: float) -> "Vector":
        return Vector(self.coords * float(scalar), self.space)

    __rmul__ = __mul__

    def __neg__(self) -> "Vector":
        return Vector(-self.coords, self.space)

    def norm(self) -> float:
        return lp_norm(self)

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "coords": [float(c) for c in self.coords]}

    @staticmethod
    def from_dict(data: dict) -> "Vector":
        return Vector(data["coords"], SpaceSpec.from_dict(data["space"]))


def vector(coords: Sequence[float], p: float = 2.0) -> Vector:
    """Convenience constructor: wraps coords in a SpaceSpec of matching dimension."""
    arr = np.asarray(coords, dtype=float)
    return Vector(arr, space(arr.shape[0], p))


@dataclass(frozen=True, eq=False)
class DualFunctional:
    """Element of the dual space, acting by the coefficient dot pairing.

    Its functional norm is the l^q norm of the coefficients, q dual to the
    space exponent.
    """

    coeffs: np.ndarray
    space: SpaceSpec

    def __post_init__(self) -> None:
        arr = _frozen_array(self.coeffs)
        if arr.shape[0] != self.space.d:
            raise DimensionError(
                f"functional has {arr.shape[0]} coefficients, space expects {self.space.d}")
        object.__setattr__(self, "coeffs", arr)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, DualFunctional) and self.space == other.space
                and np.array_equal(self.coeffs, other.coeffs))

    def __call__(self, v: Vector) -> float:
        if v.space.d != self.space.d:
            raise DimensionError("functional and vector dimensions differ")
        return float(self.coeffs @ v.coords)

    def __neg__(self) -> "DualFunctional":
        return DualFunctional(-self.coeffs, self.space)

    def norm(self) -> float:
        return dual_norm_array(self.coeffs, self.space.exponent)

    def to_dict(self) -> dict:
        return {"space": self.space.to_dict(), "coords": [float(c) for c in self.coeffs]}

    @staticmethod
    def from_dict(data: dict) -> "DualFunctional":
        return DualFunctional(data["coords"], SpaceSpec.from_dict(data["space"]))


def _check_same_space(a: Vector, b: Vector) -> None:
    if a.space != b.space:
        raise DimensionError(f"vectors live in different spaces: {a.space} vs {b.space}")


def check_common_space(vectors: Sequence[Vector]) -> SpaceSpec:
    """SpaceSpec shared by all vectors; DimensionError on a mixed family."""
    if not vectors:
        raise DimensionError("empty vector family")
    first = vectors[0].space
    for v in vectors[1:]:
        if v.space != first:
            raise DimensionError("vectors live in different spaces")
    return first


# ---------------------------------------------------------------------------
# norms and norming functionals
# ---------------------------------------------------------------------------

def lp_norm_array(arr: np.ndarray, p: PExponent | float) -> float:
    """(sum |a_k|^p)^(1/p), max-scaled so large p neither overflows nor underflows."""
    pe = PExponent.of(p)
    a = np.abs(np.asarray(arr, dtype=float))
    if a.size == 0:
        return 0.0
    if pe.p == 1.0:
        return float(a.sum())
    if pe.p == 2.0:
        return math.sqrt(float(a @ a))
    m = float(a.max())
    if m == 0.0:
        return 0.0
    return m * float(((a / m) ** pe.p).sum()) ** (1.0 / pe.p)


def dual_norm_array(arr: np.ndarray, p: PExponent | float) -> float:
    """l^q norm of arr, q dual to p (max norm at p = 1)."""
    pe = PExponent.of(p)
    a = np.abs(np.asarray(arr, dtype=float))
    if a.size == 0:
        return 0.0
    if pe.is_one:
        return float(a.max())
    m = float(a.max())
    if m == 0.0:
        return 0.0
    return m * float(((a / m) ** pe.q).sum()) ** (1.0 / pe.q)


def lp_norm(x: Vector, p: PExponent | float | None = None) -> float:
    """l^p norm of x; p defaults to the exponent of x's own space."""
    pe = x.space.exponent if p is None else PExponent.of(p)
    return lp_norm_array(x.coords, pe)


def norming_functional_array(v: np.ndarray, p: PExponent | float) -> np.ndarray:
    """Coefficients of the dual unit functional attaining the l^p norm of v.

    For p > 1 the Hoelder equality case |v_k|^(p-1) sgn(v_k) / ||v||^(p-1);
    for p = 1 the sign vector with sgn(0) = 0.
    """
    pe = PExponent.of(p)
    arr = np.asarray(v, dtype=float)
    nrm = lp_norm_array(arr, pe)
    if nrm == 0.0:
        raise ZeroVectorError("norming functional undefined at the zero vector")
    if pe.is_one:
        return np.sign(arr)
    return (np.abs(arr) / nrm) ** (pe.p - 1.0) * np.sign(arr)


def norming_functional(v: Vector, p: PExponent | float | None = None) -> DualFunctional:
    """Dual functional f with ||f||_q = 1 and f(v) = ||v||_p."""
    pe = v.space.exponent if p is None else PExponent.of(p)
    coeffs = norming_functional_array(v.coords, pe)
    return DualFunctional(coeffs, SpaceSpec(v.space.d, pe))


def q_norming_array(phi: np.ndarray, p: PExponent | float) -> np.ndarray:
    """Unit-l^p vector x maximizing phi . x, so that phi . x = ||phi||_q.

    The reverse direction of norming_functional_array: phi is a coefficient
    vector acting by the dot pairing, and the maximizer over the l^p unit
    ball is returned.  At p = 1 this is a signed coordinate vertex
    (lowest index on ties, for determinism).
    """
    pe = PExponent.of(p)
    arr = np.asarray(phi, dtype=float)
    a = np.abs(arr)
    m = float(a.max()) if a.size else 0.0
    if m == 0.0:
        raise ZeroVectorError("q-norming vector undefined at the zero functional")
    if pe.is_one:
        k = int(np.argmax(a))
        out = np.zeros_like(arr)
        out[k] = math.copysign(1.0, arr[k])
        return out
    nq = dual_norm_array(arr, pe)
    return (a / nq) ** (pe.q - 1.0) * np.sign(arr)


# ---------------------------------------------------------------------------
# determinants
# ---------------------------------------------------------------------------

def _det_exact_integer(mat: np.ndarray) -> float:
    # LU with partial pivoting over exact rationals; keeps small integer
    # determinants and row-swap antisymmetry exact.
    n = mat.shape[0]
    rows = [[Fraction(int(round(v))) for v in row] for row in mat]
    sign = 1
    for k in range(n):
        piv = max(range(k, n), key=lambda i: abs(rows[i][k]))
        if rows[piv][k] == 0:
            return 0.0
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            sign = -sign
        for i in range(k + 1, n):
            m = rows[i][k] / rows[k][k]
            if m:
                rows[i] = [a - m * b for a, b in zip(rows[i], rows[k])]
    prod = Fraction(sign)
    for k in range(n):
        prod *= rows[k][k]
    return float(prod)


def det(M: Sequence[Sequence[float]] | np.ndarray) -> float:
    """Determinant by LU with partial pivoting, n <= 8.

    Integer-valued matrices take an exact rational elimination path, so
    small integer determinants come out exact and row swaps negate the
    value exactly.
    """
    A = np.asarray(M, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError(f"determinant needs a square matrix, got shape {A.shape}")
    n = A.shape[0]
    if n > DET_MAX_SIZE:
        raise ShapeError(f"determinant supports n <= {DET_MAX_SIZE}, got {n}")
    if n == 0:
        return 1.0
    if np.all(A == np.round(A)) and np.all(np.abs(A) < 2.0 ** 53):
        return _det_exact_integer(A)
    return float(np.linalg.det(A))


# ---------------------------------------------------------------------------
# permutations
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Permutation:
    """Bijection of {1, ..., n}, stored as the image tuple (sigma(1), ..., sigma(n))."""

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(int(i) for i in self.images)
        n = len(images)
        if sorted(images) != list(range(1, n + 1)):
            raise ValueError(f"not a bijection of 1..{n}: {images}")
        object.__setattr__(self, "images", images)

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def compose(self, other: "Permutation") -> "Permutation":
        """self after other: (self . other)(i) = self(other(i))."""
        if len(self) != len(other):
            raise ValueError("permutation sizes differ")
        return Permutation(tuple(self(other(i)) for i in range(1, len(self) + 1)))

    def apply(self, items: Sequence) -> tuple:
        """(x_sigma(1), ..., x_sigma(n)) for items (x_1, ..., x_n)."""
        if len(items) != len(self):
            raise ValueError("permutation and tuple sizes differ")
        return tuple(items[self.images[k] - 1] for k in range(len(self)))

    @property
    def sign(self) -> int:
        return permutation_sign(self)


def permutation_sign(sigma: Permutation) -> int:
    """+1 for even permutations, -1 for odd ones."""
    images = sigma.images
    n = len(images)
    inversions = sum(
        1 for i in range(n) for j in range(i + 1, n) if images[i] > images[j])
    return 1 if inversions % 2 == 0 else -1


# ---------------------------------------------------------------------------
# random generation
# ---------------------------------------------------------------------------

NEAR_DEPENDENT_SCALE = 1e-6


def shared_direction(d: int) -> np.ndarray:
    """The common base direction used by near_dependent conditioning."""
    return np.ones(d) / math.sqrt(d)


def random_vector(spec: SpaceSpec, rng_seed: int,
                  conditioning: Conditioning = "generic") -> Vector:
    """Deterministic random vector for a fixed seed.

    generic: standard normal coordinates.  unit_sphere: normalized to
    ||x||_p = 1.  near_dependent: a positive multiple of the shared base
    direction plus a unit perturbation scaled by 1e-6, so the angle to the
    base stays below ~2e-6 rad.
    """
    rng = np.random.default_rng(rng_seed)
    return random_vector_from(rng, spec, conditioning)


def random_vector_from(rng: np.random.Generator, spec: SpaceSpec,
                       conditioning: Conditioning = "generic") -> Vector:
    """Like random_vector but drawing from a caller-owned generator."""
    z = rng.standard_normal(spec.d)
    if conditioning == "generic":
        coords = z
    elif conditioning == "unit_sphere":
        nrm = lp_norm_array(z, spec.exponent)
        while nrm == 0.0:
            z = rng.standard_normal(spec.d)
            nrm = lp_norm_array(z, spec.exponent)
        coords = z / nrm
    elif conditioning == "near_dependent":
        w = z / math.sqrt(float(z @ z))
        s = rng.uniform(0.5, 2.0)
        coords = s * shared_direction(spec.d) + NEAR_DEPENDENT_SCALE * w
    else:
        raise ValueError(f"unknown conditioning {conditioning!r}")
    return Vector(coords, spec)
