"""Certified pmf enclosures from the two-term log-pmf expansion.

The main-term value exp(-x^2/(2(1-f)) - log(2*pi*n*p*q*(1-f))/2) carries an
explicit remainder bound (a function of |a| = |x|/((1-f)*sqrt(npq)), the
half-width parameter delta, and n*p*q), valid whenever 6*min(np, nq) >= 1 and
|a| <= delta <= 1/2.  The exact pmf is then guaranteed to lie inside
[value*exp(-rem), value*exp(+rem)].

delta is caller-supplied: smaller delta tightens the remainder but shrinks
the certified window of lattice points.  The default 0.5 is the widest
window.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from . import gaussian
from .params import HypParams

#: one-shot upward-rounding slack applied to the remainder bound, keeping the
#: enclosure honest against float rounding without interval arithmetic.
REM_SLACK = 1.0 + 1e-12


class ApplicabilityError(ValueError):
    """Raised when a certified enclosure is requested outside its window."""

    def __init__(self, failed: list[str]):
        self.failed = failed
        super().__init__("applicability gate failed: " + ", ".join(failed))


@dataclass(frozen=True)
class Standardized:
    """Standardized coordinates of a lattice point k."""

    k: int
    x_kn: float       # (k - n*p) / sqrt(n*p*q)
    a_kn: float       # x_kn / ((1-f) * sqrt(n*p*q))
    x_tilde: float    # (k - n*p) / sigma  ==  x_kn / sqrt(1-f)


@dataclass(frozen=True)
class StirlingEps:
    """Two-sided bound on the Stirling error term for m!."""

    m: int
    lo: float   # 1 / (12m + 1)
    hi: float   # 1 / (12m)


@dataclass(frozen=True)
class CertifiedProb:
    """Main-term approximation plus rigorous multiplicative enclosure."""

    log_main: float
    rem_bound: float
    value: float
    lo: float
    hi: float


@dataclass(frozen=True)
class ApplicabilityFlags:
    f_in_range: bool
    p_in_range: bool
    min_npnq_ok: bool     # 6 * min(np, nq) >= 1
    a_within_delta: bool
    k_in_support: bool

    @property
    def ok(self) -> bool:
        return (
            self.f_in_range
            and self.p_in_range
            and self.min_npnq_ok
            and self.a_within_delta
            and self.k_in_support
        )

    def failed(self) -> list[str]:
        names = {
            "f_in_range": self.f_in_range,
            "p_in_range": self.p_in_range,
            "min_npnq_ok": self.min_npnq_ok,
            "a_within_delta": self.a_within_delta,
            "k_in_support": self.k_in_support,
        }
        return [name for name, ok in names.items() if not ok]


def standardize(params: HypParams, k: int) -> Standardized:
    n, M, N = params.n, params.M, params.N
    np_ = n * M / N
    root_npq = math.sqrt(params.npq)
    x = (k - np_) / root_npq
    one_minus_f = (N - n) / N
    a = x / (one_minus_f * root_npq)
    x_tilde = x / math.sqrt(one_minus_f)
    return Standardized(k=k, x_kn=x, a_kn=a, x_tilde=x_tilde)


def stirling_eps_bounds(m: int) -> StirlingEps:
    """The sandwich 1/(12m+1) <= eps_m <= 1/(12m) for log m!."""
    if not (isinstance(m, int) and m >= 1):
        raise ValueError(f"m must be a positive integer, got {m!r}")
    return StirlingEps(m=m, lo=1.0 / (12 * m + 1), hi=1.0 / (12 * m))


def _check_delta(delta: float) -> None:
    if not (0.0 < delta <= 0.5):
        raise ValueError(f"delta must lie in (0, 1/2], got {delta}")


def check_applicability(
    params: HypParams, k: int, delta: float = 0.5
) -> ApplicabilityFlags:
    _check_delta(delta)
    s = standardize(params, k)
    np_ = params.n * params.p
    nq_ = params.n * params.q
    return ApplicabilityFlags(
        f_in_range=0.0 < params.f < 1.0,
        p_in_range=0.0 < params.p < 1.0,
        min_npnq_ok=6.0 * min(np_, nq_) >= 1.0,
        a_within_delta=abs(s.a_kn) <= delta,
        k_in_support=params.in_support(k),
    )


def remainder_bound(params: HypParams, k: int, delta: float) -> float:
    """The explicit three-term remainder bound at lattice point k."""
    _check_delta(delta)
    s = standardize(params, k)
    npq = params.npq
    f = params.f
    one_minus_f = 1.0 - f
    a = abs(s.a_kn)
    term1 = 1.0 / (6.0 * npq * (1.0 - delta) * one_minus_f)
    term2 = 0.5 * a + a * a * (0.25 + 2.0 * delta / (1.0 - delta) ** 3)
    term3 = (
        a**3
        * npq
        * (f / 4.0 + 1.0)
        * (0.5 + 2.0 * (1.0 + delta) / (1.0 - delta) ** 3)
    )
    return (term1 + term2 + term3) * REM_SLACK


def log_main_term(params: HypParams, k: int) -> float:
    s = standardize(params, k)
    one_minus_f = 1.0 - params.f
    return -s.x_kn**2 / (2.0 * one_minus_f) - 0.5 * math.log(
        2.0 * math.pi * params.npq * one_minus_f
    )


def certified_pmf(params: HypParams, k: int, delta: float = 0.5) -> CertifiedProb:
    """Certified enclosure of P(X = k); refuses outside the applicability window."""
    flags = check_applicability(params, k, delta)
    if not flags.ok:
        raise ApplicabilityError(flags.failed())
    log_main = log_main_term(params, k)
    rem = remainder_bound(params, k, delta)
    value = math.exp(log_main)
    # a wide window on a large instance can make the bound vacuous; the
    # enclosure stays valid with an infinite upper edge
    try:
        hi = value * math.exp(rem)
    except OverflowError:
        hi = math.inf
    return CertifiedProb(
        log_main=log_main,
        rem_bound=rem,
        value=value,
        lo=value * math.exp(-rem),
        hi=hi,
    )


def gaussian_main_term(params: HypParams, k: int) -> float:
    """(1/sigma) * phi((k - n*p)/sigma); identical to exp(log_main) since
    sigma^2 = n*p*q*(1-f)."""
    s = standardize(params, k)
    return gaussian.phi(s.x_tilde) / params.sigma
