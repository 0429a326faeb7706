"""Standard normal kernel: density, distribution function, second derivative,
and the Mill's-ratio tail bound.

Phi goes through the library complementary error function (continued-fraction
quality, ~1 ulp), which keeps absolute error near 1e-16 across |x| <= 8 --
the far-tail accuracy the bound validation needs.  Everything here is plain
64-bit float; exactness lives in the rational backend of ``exact``.
"""
from __future__ import annotations

import math

SQRT2 = math.sqrt(2.0)
SQRT3 = math.sqrt(3.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)


def phi(x: float) -> float:
    """Standard normal density."""
    return INV_SQRT_2PI * math.exp(-0.5 * x * x)


def Phi(x: float) -> float:
    """Standard normal distribution function."""
    return 0.5 * math.erfc(-x / SQRT2)


def phi_dd(x: float) -> float:
    """Second derivative of the density: (x^2 - 1) * phi(x)."""
    return (x * x - 1.0) * phi(x)


def mills_upper_tail(x: float) -> float:
    """Mill's-ratio bound phi(x)/x; dominates 1 - Phi(x) for every x > 0."""
    if not x > 0:
        raise ValueError(f"mills_upper_tail requires x > 0, got {x}")
    return phi(x) / x


def phi_integral(lo: float, hi: float) -> float:
    """Integral of phi over [lo, hi]."""
    return Phi(hi) - Phi(lo)
