"""Semi-inner product machinery on l^p.

The pairing g(x, y) averages the two one-sided directional derivatives of
the norm at x in direction y, scaled by ||x||.  On l^p it has a closed
form, which is the primary code path; the numeric tangent route (tau and
g_numeric) is kept as an independent oracle for tests.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DimensionError, ZeroVectorError
from .spaces import (
    DualFunctional,
    PExponent,
    SpaceSpec,
    Vector,
    lp_norm,
    lp_norm_array,
)

DEFAULT_TAU_STEPS = (1e-3, 1e-4, 1e-5)


@dataclass(frozen=True)
class SipConfig:
    """Controls the numeric tangent route.

    steps are the difference-quotient step sizes, strictly decreasing;
    extrapolation_order bounds the polynomial extrapolation degree.
    """

    method: str = "closed_form"
    steps: tuple[float, ...] = DEFAULT_TAU_STEPS
    extrapolation_order: int = 2

    def __post_init__(self) -> None:
        if self.method not in ("closed_form", "numeric"):
            raise ValueError(f"unknown method {self.method!r}")
        steps = tuple(float(s) for s in self.steps)
        if not steps or any(s <= 1e-9 for s in steps):
            raise ValueError("steps must all exceed 1e-9")
        if any(a <= b for a, b in zip(steps, steps[1:])):
            raise ValueError("steps must be strictly decreasing")
        object.__setattr__(self, "steps", steps)


DEFAULT_SIP_CONFIG = SipConfig()


@dataclass(frozen=True)
class TauPair:
    """One-sided tangents tau_minus <= tau_plus, with the quotient trace."""

    tau_minus: float
    tau_plus: float
    step_trace: tuple[tuple[float, float], ...] = ()

    def __post_init__(self) -> None:
        slack = 1e-8 * (1.0 + abs(self.tau_plus))
        if self.tau_minus > self.tau_plus + slack:
            raise ValueError(
                f"one-sided tangents out of order: {self.tau_minus} > {self.tau_plus}")
        object.__setattr__(self, "step_trace", tuple(self.step_trace))

    @property
    def average(self) -> float:
        return 0.5 * (self.tau_minus + self.tau_plus)


def _extrapolate_to_zero(ts: Sequence[float], qs: Sequence[float], order: int) -> float:
    # Neville's scheme on the nodes ts, evaluated at 0.
    k = min(order + 1, len(ts))
    t = list(ts[:k])
    v = list(qs[:k])
    for level in range(1, k):
        for i in range(k - level):
            v[i] = (t[i] * v[i + 1] - t[i + level] * v[i]) / (t[i] - t[i + level])
    return v[0]


def tau(x: Vector, y: Vector, p: PExponent | float | None = None,
        cfg: SipConfig = DEFAULT_SIP_CONFIG) -> TauPair:
    """Extrapolated one-sided difference quotients of t -> ||x + t y|| at 0.

    Plain quotients lose about six digits near t = 0; polynomial
    extrapolation over cfg.steps recovers a ~1e-6 absolute target for
    vectors of norm up to ~10.
    """
    if x.space.d != y.space.d:
        raise DimensionError("tau needs vectors of equal dimension")
    pe = x.space.exponent if p is None else PExponent.of(p)
    nx = lp_norm(x, pe)
    if nx == 0.0:
        raise ZeroVectorError("tau undefined at x = 0")
    xa = x.coords
    ya = y.coords
    trace: list[tuple[float, float]] = []
    extrapolated = {}
    for side in (-1.0, 1.0):
        ts, qs = [], []
        for h in cfg.steps:
            t = side * h
            q = (lp_norm_array(xa + t * ya, pe) - nx) / t
            ts.append(t)
            qs.append(q)
            trace.append((t, q))
        extrapolated[side] = _extrapolate_to_zero(ts, qs, cfg.extrapolation_order)
    return TauPair(extrapolated[-1.0], extrapolated[1.0], tuple(trace))


def g(x: Vector, y: Vector, p: PExponent | float | None = None) -> float:
    """Closed-form semi-inner product on l^p.

    p > 1:  ||x||^(2-p) * sum_k |x_k|^(p-1) sgn(x_k) y_k
    p = 1:  ||x||_1 * sum over x_k != 0 of sgn(x_k) y_k
    g(0, y) = 0 by the homogeneity property with alpha = 0.
    """
    if x.space.d != y.space.d:
        raise DimensionError("g needs vectors of equal dimension")
    pe = x.space.exponent if p is None else PExponent.of(p)
    xa = x.coords
    ya = y.coords
    nx = lp_norm_array(xa, pe)
    if nx == 0.0:
        return 0.0
    if pe.is_one:
        return nx * float(np.sign(xa) @ ya)
    weights = (np.abs(xa) / nx) ** (pe.p - 1.0) * np.sign(xa)
    return nx * float(weights @ ya)


def g_numeric(x: Vector, y: Vector, p: PExponent | float | None = None,
              cfg: SipConfig = DEFAULT_SIP_CONFIG) -> float:
    """Tangent-average oracle for g; test use only."""
    pe = x.space.exponent if p is None else PExponent.of(p)
    pair = tau(x, y, pe, cfg)
    return lp_norm(x, pe) * pair.average


def semi_inner(x: Vector, y: Vector, p: PExponent | float | None = None,
               cfg: SipConfig = DEFAULT_SIP_CONFIG) -> float:
    """g by the route selected in cfg.method."""
    if cfg.method == "numeric":
        return g_numeric(x, y, p, cfg)
    return g(x, y, p)


def g_functional(x: Vector, p: PExponent | float | None = None) -> DualFunctional:
    """The bounded functional y -> g(x, y) / ||x|| as a DualFunctional.

    Its coefficients are assembled coordinate by coordinate through g
    itself, independently of the Hoelder formula in spaces.norming_functional;
    the two routes agreeing is a test invariant, not a code-sharing fact.
    """
    pe = x.space.exponent if p is None else PExponent.of(p)
    nx = lp_norm(x, pe)
    if nx == 0.0:
        raise ZeroVectorError("g functional undefined at x = 0")
    spc = SpaceSpec(x.space.d, pe)
    basis_images = np.empty(x.space.d)
    for k in range(x.space.d):
        e_k = np.zeros(x.space.d)
        e_k[k] = 1.0
        basis_images[k] = g(x, Vector(e_k, x.space), pe)
    return DualFunctional(basis_images / nx, spc)


@dataclass(frozen=True)
class GPropertyReport:
    """One boolean per semi-inner-product property, with normalized violations."""

    g1: bool
    g2: bool
    g3: bool
    g4: bool
    linear_in_y: bool
    violations: dict

    @property
    def all_passed(self) -> bool:
        return self.g1 and self.g2 and self.g3 and self.g4 and self.linear_in_y

    def to_dict(self) -> dict:
        return {
            "g1": self.g1, "g2": self.g2, "g3": self.g3, "g4": self.g4,
            "linear_in_y": self.linear_in_y,
            "violations": {k: float(v) for k, v in self.violations.items()},
        }


def check_g_properties(x: Vector, y: Vector, alpha: float, beta: float,
                       p: PExponent | float | None = None, tol: float = 1e-8,
                       g_impl: Callable[..., float] = g) -> GPropertyReport:
    """Evaluate the defining properties of g on one instance.

    g_impl exists so tests can feed a deliberately corrupted pairing and
    watch the right flag drop.
    """
    pe = x.space.exponent if p is None else PExponent.of(p)
    nx = lp_norm(x, pe)
    ny = lp_norm(y, pe)
    gxy = g_impl(x, y, pe)
    gxx = g_impl(x, x, pe)

    v1 = abs(gxx - nx ** 2) / (1.0 + nx ** 2)

    scaled = g_impl(alpha * x, beta * y, pe)
    v2 = abs(scaled - alpha * beta * gxy) / (1.0 + abs(alpha * beta * gxy))

    shifted = g_impl(x, x + y, pe)
    v3 = abs(shifted - (nx ** 2 + gxy)) / (1.0 + nx ** 2 + abs(gxy))

    v4 = max(0.0, abs(gxy) - nx * ny) / (1.0 + nx * ny)

    combo = g_impl(x, alpha * y + beta * x, pe)
    expected = alpha * gxy + beta * gxx
    v5 = abs(combo - expected) / (1.0 + abs(expected))

    violations = {"g1": v1, "g2": v2, "g3": v3, "g4": v4, "linear_in_y": v5}
    return GPropertyReport(
        g1=v1 <= tol, g2=v2 <= tol, g3=v3 <= tol, g4=v4 <= tol,
        linear_in_y=v5 <= tol, violations=violations)


def is_g_orthogonal(x: Vector, y: Vector, p: PExponent | float | None = None,
                    tol: float = 1e-8) -> bool:
    """True iff |g(x, y)| <= tol * (1 + ||x|| ||y||)."""
    pe = x.space.exponent if p is None else PExponent.of(p)
    return abs(g(x, y, pe)) <= tol * (1.0 + lp_norm(x, pe) * lp_norm(y, pe))
