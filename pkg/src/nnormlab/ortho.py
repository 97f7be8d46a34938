"""Gram machinery for the semi-inner product.

Gram matrices and determinants built from g, the bordered-determinant
projection (kept as a small-size oracle), the linear-solve projection used
in production, and left g-orthogonal sequences.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DependentFamilyError, UnsupportedSizeError
from .sip import g
from .spaces import PExponent, Vector, check_common_space, det, lp_norm

DEPENDENCE_GUARD = 1e-12
INDEPENDENCE_PIVOT_TOL = 1e-10
BORDERED_MAX_SIZE = 3


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """entries[i][j] = g(y_i, y_j); not symmetric in general for p != 2."""

    entries: np.ndarray
    family: tuple[Vector, ...]
    p: PExponent

    def __post_init__(self) -> None:
        arr = np.asarray(self.entries, dtype=float)
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)
        object.__setattr__(self, "family", tuple(self.family))

    @property
    def determinant(self) -> float:
        return float(np.linalg.det(self.entries))


def _resolve_p(vectors: tuple[Vector, ...], p: PExponent | float | None) -> PExponent:
    spc = check_common_space(vectors)
    return spc.exponent if p is None else PExponent.of(p)


def gram_matrix(Y: tuple[Vector, ...], p: PExponent | float | None = None) -> GramMatrix:
    """Gram matrix of the family Y under g."""
    Y = tuple(Y)
    pe = _resolve_p(Y, p)
    n = len(Y)
    entries = np.empty((n, n))
    for i in range(n):
        for j in range(n):
            entries[i, j] = g(Y[i], Y[j], pe)
    return GramMatrix(entries, Y, pe)


def gram_determinant(Y: tuple[Vector, ...], p: PExponent | float | None = None) -> float:
    """det [g(y_i, y_j)]; vanishes on dependent families."""
    return gram_matrix(Y, p).determinant


def _projection_coefficients(x: Vector, Y: tuple[Vector, ...],
                             pe: PExponent) -> tuple[np.ndarray, float]:
    gm = gram_matrix(Y, pe)
    gamma = gm.determinant
    scale = 1.0
    for y in Y:
        scale *= lp_norm(y, pe) ** 2
    if abs(gamma) < DEPENDENCE_GUARD * scale or scale == 0.0:
        raise DependentFamilyError(
            f"Gram determinant {gamma:.3e} below the dependence guard")
    b = np.array([g(y, x, pe) for y in Y])
    return np.linalg.solve(gm.entries, b), gamma


def project(x: Vector, Y: tuple[Vector, ...],
            p: PExponent | float | None = None) -> Vector:
    """Projection of x on span(Y) solving g(y_i, x - x_Y) = 0 for every i."""
    Y = tuple(Y)
    pe = _resolve_p(Y + (x,), p)
    coeffs, _ = _projection_coefficients(x, Y, pe)
    coords = np.zeros(x.space.d)
    for c, y in zip(coeffs, Y):
        coords += c * y.coords
    return Vector(coords, x.space)


def bordered_determinant_project(x: Vector, Y: tuple[Vector, ...],
                                 p: PExponent | float | None = None) -> Vector:
    """Projection evaluated through the literal bordered determinant.

    The (n+1) x (n+1) array has a zero corner, the family's vectors along
    the top row, g(y_i, x) down the first column and the Gram block inside;
    expanding formally along the vector row and dividing by -Gamma gives
    the projection.  Kept as an oracle for |Y| <= 3, where the cofactor
    expansion is cheap and transparent.
    """
    Y = tuple(Y)
    if len(Y) > BORDERED_MAX_SIZE:
        raise UnsupportedSizeError(
            f"bordered-determinant oracle supports |Y| <= {BORDERED_MAX_SIZE}")
    pe = _resolve_p(Y + (x,), p)
    n = len(Y)
    gm = gram_matrix(Y, pe).entries
    gamma = float(np.linalg.det(gm))
    scale = 1.0
    for y in Y:
        scale *= lp_norm(y, pe) ** 2
    if abs(gamma) < DEPENDENCE_GUARD * scale or scale == 0.0:
        raise DependentFamilyError(
            f"Gram determinant {gamma:.3e} below the dependence guard")
    b = np.array([g(y, x, pe) for y in Y])
    # scalar block of the bordered array: first column b, then the Gram block
    block = np.hstack([b.reshape(n, 1), gm])
    coords = np.zeros(x.space.d)
    for j in range(1, n + 1):
        minor_cols = [c for c in range(n + 1) if c != j]
        minor = det(block[:, minor_cols])
        sign = -1.0 if j % 2 else 1.0
        coords += sign * minor * Y[j - 1].coords
    return Vector(-coords / gamma, x.space)


def _assert_independent(xs: tuple[Vector, ...]) -> None:
    # Row-scaled Gaussian elimination with partial pivoting; a pivot below
    # the tolerance flags the family as dependent.
    rows = np.array([v.coords for v in xs], dtype=float)
    n, d = rows.shape
    if n > d:
        raise DependentFamilyError(f"{n} vectors in dimension {d} are dependent")
    for i in range(n):
        sup = np.abs(rows[i]).max()
        if sup == 0.0:
            raise DependentFamilyError("zero vector in the family")
        rows[i] /= sup
    col = 0
    for k in range(n):
        while col < d:
            piv = k + int(np.argmax(np.abs(rows[k:, col])))
            if abs(rows[piv, col]) > INDEPENDENCE_PIVOT_TOL:
                break
            col += 1
        if col == d:
            raise DependentFamilyError("family is linearly dependent")
        rows[[k, piv]] = rows[[piv, k]]
        for i in range(k + 1, n):
            rows[i] -= (rows[i, col] / rows[k, col]) * rows[k]
        col += 1


@dataclass(frozen=True, eq=False)
class OrthogonalizationResult:
    """Left g-orthogonal sequence with per-step diagnostics.

    coefficients[i] holds the projection coefficients of x_i onto the
    previously orthogonalized vectors (empty for i = 0); step_gram_dets
    holds the Gram determinant used at each projection step.
    """

    originals: tuple[Vector, ...]
    orthogonalized: tuple[Vector, ...]
    coefficients: tuple[tuple[float, ...], ...]
    step_gram_dets: tuple[float, ...]

    def to_dict(self) -> dict:
        return {
            "originals": [v.to_dict() for v in self.originals],
            "orthogonalized": [v.to_dict() for v in self.orthogonalized],
            "coefficients": [list(c) for c in self.coefficients],
            "step_gram_dets": list(self.step_gram_dets),
        }


def left_g_orthogonalize(xs: tuple[Vector, ...],
                         p: PExponent | float | None = None) -> OrthogonalizationResult:
    """Left g-orthogonal sequence of an independent family.

    x_1 stays fixed; each later x_i sheds its projection onto the span of
    the vectors orthogonalized so far.  Projecting onto the orthogonalized
    prefix (rather than the raw one) is what makes g(x_i°, x_j°) = 0 hold
    for all i < j at every p; the two choices only coincide at p = 2.
    """
    xs = tuple(xs)
    pe = _resolve_p(xs, p)
    _assert_independent(xs)
    ortho: list[Vector] = [xs[0]]
    coeff_steps: list[tuple[float, ...]] = [()]
    gram_dets: list[float] = []
    for i in range(1, len(xs)):
        basis = tuple(ortho)
        coeffs, gamma = _projection_coefficients(xs[i], basis, pe)
        gram_dets.append(gamma)
        coords = xs[i].coords.copy()
        for c, y in zip(coeffs, basis):
            coords -= c * y.coords
        ortho.append(Vector(coords, xs[i].space))
        coeff_steps.append(tuple(float(c) for c in coeffs))
    return OrthogonalizationResult(xs, tuple(ortho), tuple(coeff_steps),
                                   tuple(gram_dets))
