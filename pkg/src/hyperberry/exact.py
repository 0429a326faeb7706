"""Exact ground-truth oracle for the hypergeometric distribution.

Two backends:

* ``rational`` -- arbitrary-precision integers / fractions, for N up to
  :data:`RATIONAL_N_MAX`.  Used as the unimpeachable oracle everywhere the
  grid is small enough.
* ``logspace`` -- float log-probabilities for N up to ~1e9.  The log-pmf is
  computed with the ratio recurrence
  ``P(k+1)/P(k) = (M-k)(n-k) / ((k+1)(N-M-n+k+1))``
  anchored at the mode, where the anchor log-probability is evaluated with
  high-precision log-gamma.  This keeps tail values free of catastrophic
  cancellation; the accumulated relative error over a support sweep is
  bounded by roughly ``support_size * 1e-16``.

k outside the support always yields probability zero rather than an error:
callers routinely evaluate at ``floor(n*p + x*sigma)`` which may fall off
the support edge.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .params import HypParams

#: Largest N served by the exact rational backend by default.
RATIONAL_N_MAX = 5000


@dataclass(frozen=True)
class ExactProb:
    """A probability from one of the two backends.

    ``value`` is an exact Fraction in the rational backend (``log_value`` is
    then its float log, -inf for zero).  In the logspace backend ``value`` is
    None and ``log_value`` carries the natural log of the probability.
    """

    backend: str
    value: Fraction | None
    log_value: float

    def __float__(self) -> float:
        if self.value is not None:
            return float(self.value)
        return math.exp(self.log_value)

    @property
    def as_float(self) -> float:
        return float(self)


def _rational(value: Fraction) -> ExactProb:
    log_value = -math.inf if value == 0 else math.log(float(value)) if float(value) > 0 else -math.inf
    return ExactProb("rational", value, log_value)


def _logspace(log_value: float) -> ExactProb:
    return ExactProb("logspace", None, log_value)


def choose_backend(params: HypParams, backend: str | None = None) -> str:
    if backend is not None:
        if backend not in ("rational", "logspace"):
            raise ValueError(f"unknown backend {backend!r}")
        return backend
    return "rational" if params.N <= RATIONAL_N_MAX else "logspace"


# ---------------------------------------------------------------------------
# rational backend
# ---------------------------------------------------------------------------

def pmf_fraction(params: HypParams, k: int) -> Fraction:
    """Exact P(X = k) as a Fraction."""
    if not params.in_support(k):
        return Fraction(0)
    num = math.comb(params.M, k) * math.comb(params.N - params.M, params.n - k)
    return Fraction(num, math.comb(params.N, params.n))


def cdf_fraction(params: HypParams, k: int) -> Fraction:
    if k < params.support_min:
        return Fraction(0)
    if k >= params.support_max:
        return Fraction(1)
    den = math.comb(params.N, params.n)
    num = sum(
        math.comb(params.M, j) * math.comb(params.N - params.M, params.n - j)
        for j in range(params.support_min, k + 1)
    )
    return Fraction(num, den)


# ---------------------------------------------------------------------------
# logspace backend
# ---------------------------------------------------------------------------

def _log_binom_hp(a: int, b: int) -> float:
    """log C(a, b) via high-precision log-gamma (anchor-quality accuracy)."""
    with mpmath.workdps(40):
        v = (
            mpmath.loggamma(a + 1)
            - mpmath.loggamma(b + 1)
            - mpmath.loggamma(a - b + 1)
        )
        return float(v)


class LogPmfTable:
    """Log-pmf over the whole support, mode-anchored recurrence.

    Exposes numpy arrays ``ks``, ``logpmf``, ``pmf``, ``cdf`` (lower
    cumulative) and ``sf_incl`` (upper cumulative including the point).
    """

    MAX_SUPPORT = 20_000_000

    def __init__(self, params: HypParams):
        n, M, N = params.n, params.M, params.N
        lo, hi = params.support_min, params.support_max
        if hi - lo + 1 > self.MAX_SUPPORT:
            raise ValueError(
                f"support size {hi - lo + 1} exceeds logspace table cap"
            )
        self.params = params
        ks = np.arange(lo, hi + 1, dtype=np.int64)
        m = mode(params)
        anchor = (
            _log_binom_hp(M, m)
            + _log_binom_hp(N - M, n - m)
            - _log_binom_hp(N, n)
        )
        # log of P(k+1)/P(k) for k = lo .. hi-1
        kk = ks[:-1].astype(np.float64)
        logr = (
            np.log(M - kk)
            + np.log(n - kk)
            - np.log(kk + 1.0)
            - np.log(N - M - n + kk + 1.0)
        )
        logpmf = np.empty(ks.shape, dtype=np.float64)
        i = m - lo
        logpmf[i] = anchor
        if i < len(ks) - 1:
            logpmf[i + 1 :] = anchor + np.cumsum(logr[i:])
        if i > 0:
            logpmf[:i] = anchor - np.cumsum(logr[:i][::-1])[::-1]
        self.ks = ks
        self.logpmf = logpmf
        self.pmf = np.exp(logpmf)
        self.cdf = np.minimum(np.cumsum(self.pmf), 1.0)
        self.sf_incl = np.minimum(np.cumsum(self.pmf[::-1])[::-1], 1.0)
        self.total = float(self.pmf.sum())

    def log_at(self, k: int) -> float:
        if not self.params.in_support(k):
            return -math.inf
        return float(self.logpmf[k - self.params.support_min])

    def cdf_at(self, k: int) -> float:
        """P(X <= k), summed from the nearer tail and complemented."""
        p = self.params
        if k < p.support_min:
            return 0.0
        if k >= p.support_max:
            return 1.0
        i = k - p.support_min
        lower = float(self.cdf[i])
        upper = float(self.sf_incl[i + 1])
        # whichever tail is smaller was accumulated with less cancellation
        if lower <= upper:
            return lower
        return 1.0 - upper

    def sf_at(self, k: int) -> float:
        """P(X > k)."""
        p = self.params
        if k < p.support_min:
            return 1.0
        if k >= p.support_max:
            return 0.0
        i = k - p.support_min
        lower = float(self.cdf[i])
        upper = float(self.sf_incl[i + 1])
        if upper <= lower:
            return upper
        return 1.0 - lower


@lru_cache(maxsize=64)
def _table(params: HypParams) -> LogPmfTable:
    return LogPmfTable(params)


def log_pmf_table(params: HypParams) -> LogPmfTable:
    return _table(params)


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def pmf_exact(params: HypParams, k: int, backend: str | None = None) -> ExactProb:
    """Exact (or 1e-12-grade logspace) P(X = k); zero outside the support."""
    b = choose_backend(params, backend)
    if b == "rational":
        return _rational(pmf_fraction(params, k))
    return _logspace(_table(params).log_at(k))


def cdf_exact(params: HypParams, k: int, backend: str | None = None) -> ExactProb:
    """P(X <= k)."""
    b = choose_backend(params, backend)
    if b == "rational":
        return _rational(cdf_fraction(params, k))
    v = _table(params).cdf_at(k)
    return _logspace(-math.inf if v == 0.0 else math.log(v))


def sf_exact(params: HypParams, k: int, backend: str | None = None) -> ExactProb:
    """P(X > k), computed by summing the smaller tail."""
    b = choose_backend(params, backend)
    if b == "rational":
        return _rational(1 - cdf_fraction(params, k))
    v = _table(params).sf_at(k)
    return _logspace(-math.inf if v == 0.0 else math.log(v))


@dataclass(frozen=True)
class Moments:
    mean: Fraction
    variance: Fraction
    sigma2: Fraction


def moments(params: HypParams) -> Moments:
    """Exact mean, Var(X), and the scale sigma2 = N*p*q*f*(1-f).

    sigma2 equals (N-1)/N times the variance; both factorizations
    n*p*q*(1-f) and (N-n)*p*q*f agree with it exactly.
    """
    sigma2 = params.sigma2_exact
    variance = sigma2 * Fraction(params.N, params.N - 1)
    return Moments(mean=params.mean_exact, variance=variance, sigma2=sigma2)


def mode(params: HypParams) -> int:
    """Smallest maximizer of the pmf.

    The pmf is strictly increasing at j iff j < (M+1)(n+1)/(N+2) - 1, with
    equality exactly at the threshold (solving P(X=j+1) = P(X=j) for j), so
    the smallest maximizer is the ceiling of that threshold (clamped into
    the support).
    """
    m = math.ceil(mode_threshold(params))
    return max(params.support_min, min(params.support_max, m))


def mode_threshold(params: HypParams) -> Fraction:
    """The exact pmf-monotonicity threshold (M+1)(n+1)/(N+2) - 1."""
    n, M, N = params.n, params.M, params.N
    return Fraction((M + 1) * (n + 1), N + 2) - 1


def dual_leftover(params: HypParams) -> HypParams:
    """Parameters of Y = type-A count among the N-n unsampled objects.

    P(X = j) = P(Y = M - j) for all j, and Y has the same sigma2.
    """
    return HypParams(n=params.N - params.n, M=params.M, N=params.N)


def dual_reflect(params: HypParams) -> HypParams:
    """Parameters of V = n - X (type-B count in the sample).

    P(X = j) = P(V = n - j) for all j; on the standardized lattice
    (X - n*p)/sigma = -(V - n*q)/sigma.
    """
    return HypParams(n=params.n, M=params.N - params.M, N=params.N)
