"""Auxiliary lattice-sum inequalities.

Two testable inequality evaluators used by the proof machinery:

* a unimodal lattice sum is dominated by its integral plus twice the largest
  sampled value;
* a midpoint Riemann sum of the normal density deviates from the matching
  integral by at most (h^2/12) * [integral of |phi''| + (4+h) * max |phi''|].

These are support infrastructure, not part of the bound pipeline; each
returns the (lhs, rhs) pair so callers can assert lhs <= rhs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

from scipy.integrate import quad

from . import gaussian

_UNIMODAL_SAMPLES = 10_001


@dataclass(frozen=True)
class LatticeSumCase:
    """Lattice description: start b, step h > 0, k steps, declared peak."""

    b: float
    h: float
    k: int
    peak: float

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise ValueError(f"step h must be positive, got {self.h}")
        if self.k < 0:
            raise ValueError(f"step count k must be >= 0, got {self.k}")


def _check_unimodal(case: LatticeSumCase, g: Callable[[float], float]) -> None:
    """Sampled monotonicity check against the declared peak.

    Dense sampling is a test-time proxy for the analytic hypothesis
    (nondecreasing left of the peak, nonincreasing right of it).
    """
    lo = min(case.b, case.peak)
    hi = max(case.b + case.h * case.k, case.peak)
    if hi <= lo:
        return
    xs = [lo + (hi - lo) * i / (_UNIMODAL_SAMPLES - 1) for i in range(_UNIMODAL_SAMPLES)]
    vals = [g(x) for x in xs]
    scale = max(1.0, max(abs(v) for v in vals))
    tol = 1e-9 * scale
    for x0, x1, v0, v1 in zip(xs, xs[1:], vals, vals[1:]):
        if v0 < -tol or v1 < -tol:
            raise ValueError("g must be nonnegative")
        if x1 <= case.peak and v1 < v0 - tol:
            raise ValueError(
                f"g decreases left of declared peak near x={x0:.6g}"
            )
        if x0 >= case.peak and v1 > v0 + tol:
            raise ValueError(
                f"g increases right of declared peak near x={x0:.6g}"
            )


def monotone_sum_bound(
    case: LatticeSumCase, g: Callable[[float], float]
) -> tuple[float, float]:
    """lhs = sum_{i=0..k} g(b+ih); rhs = (1/h) * int_b^{b+hk} g + 2*max_i g(b+ih)."""
    _check_unimodal(case, g)
    points = [case.b + i * case.h for i in range(case.k + 1)]
    values = [g(x) for x in points]
    lhs = sum(values)
    if case.k == 0:
        integral = 0.0
    else:
        integral, _ = quad(g, case.b, case.b + case.h * case.k, limit=500)
    rhs = integral / case.h + 2.0 * max(values)
    return lhs, rhs


# ---------------------------------------------------------------------------
# |phi''| helpers (closed forms, plus a step-halving cross-check)
# ---------------------------------------------------------------------------

def _phi_dd_antiderivative(x: float) -> float:
    # d/dx (-x * phi(x)) = (x^2 - 1) * phi(x)
    return -x * gaussian.phi(x)


def phi_dd_abs_integral(lo: float, hi: float) -> float:
    """Integral of |phi''| over [lo, hi], exact piecewise closed form.

    phi'' changes sign only at x = -1 and x = 1.
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    cuts = sorted({lo, hi, *(c for c in (-1.0, 1.0) if lo < c < hi)})
    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        total += abs(_phi_dd_antiderivative(b) - _phi_dd_antiderivative(a))
    return total


def phi_dd_abs_integral_simpson(
    lo: float, hi: float, rtol: float = 1e-10, max_panels: int = 1 << 20
) -> float:
    """Same integral by composite Simpson with step halving.

    Splits at the kinks of |phi''| so each piece is smooth; doubles the panel
    count until successive estimates agree to ``rtol`` (absolute, since the
    value is O(1)).  Used as the quadrature self-consistency gate.
    """
    if hi < lo:
        raise ValueError("need lo <= hi")
    cuts = sorted({lo, hi, *(c for c in (-1.0, 1.0) if lo < c < hi)})

    def simpson(a: float, b: float, panels: int) -> float:
        if b <= a:
            return 0.0
        h = (b - a) / panels
        s = abs(gaussian.phi_dd(a)) + abs(gaussian.phi_dd(b))
        for i in range(1, panels):
            s += (4 if i % 2 else 2) * abs(gaussian.phi_dd(a + i * h))
        return s * h / 3.0

    total = 0.0
    for a, b in zip(cuts, cuts[1:]):
        panels = 8
        prev = simpson(a, b, panels)
        while panels < max_panels:
            panels *= 2
            cur = simpson(a, b, panels)
            if abs(cur - prev) < rtol:
                prev = cur
                break
            prev = cur
        else:
            raise RuntimeError("Simpson step-halving failed to stabilize")
        total += prev
    return total


def phi_dd_abs_max(lo: float, hi: float) -> float:
    """max |phi''| over [lo, hi]; interior candidates are 0 and +/- sqrt(3)."""
    if hi < lo:
        raise ValueError("need lo <= hi")
    candidates = [lo, hi]
    for c in (-gaussian.SQRT3, 0.0, gaussian.SQRT3):
        if lo < c < hi:
            candidates.append(c)
    return max(abs(gaussian.phi_dd(c)) for c in candidates)


def phi_riemann_bound(b: float, h: float, j0: int) -> tuple[float, float]:
    """Midpoint Riemann-sum deviation for phi and its certified bound.

    lhs = |h * sum_{i=0..j0} phi(b+ih) - int_{b-h/2}^{b+(j0+1/2)h} phi|
    rhs = (h^2/12) * [int |phi''| + (4+h) * max |phi''|] over the interval.
    """
    if b < 0:
        raise ValueError(f"b must be >= 0, got {b}")
    if not h > 0:
        raise ValueError(f"h must be positive, got {h}")
    if j0 < 1:
        raise ValueError(f"j0 must be >= 1, got {j0}")
    total = math.fsum(gaussian.phi(b + i * h) for i in range(j0 + 1))
    lo, hi = b - h / 2.0, b + (j0 + 0.5) * h
    lhs = abs(h * total - gaussian.phi_integral(lo, hi))
    rhs = (
        h * h / 12.0
        * (phi_dd_abs_integral(lo, hi) + (4.0 + h) * phi_dd_abs_max(lo, hi))
    )
    return lhs, rhs
