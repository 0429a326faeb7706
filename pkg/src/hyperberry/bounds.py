"""Headline bound evaluation: the folded-fraction profile (f_bar, a1, delta),
the delta*sigma gate, the uniform C1/sigma bound, the non-uniform
sub-Gaussian bound, the tail inequality, and the CLT-condition diagnostics.

The universal constants C1..C6 are existential in the theory; a ConstantSet
carries numeric realizations with per-constant provenance, either
"proof-traced" (the 0.07 exponent rate composed with delta^2 (1-f)^2) or
"calibrated" (fitted over a declared grid, see ``lab.calibrate_constants``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace

from .params import HypParams

CONSTANT_NAMES = ("C1", "C2", "C3", "C4", "C5", "C6")

#: exponent rate appearing in the far-tail estimate of the proof chain.
PROOF_RATE = 0.07


class GateError(ValueError):
    """Raised when a bound is requested for parameters failing its gate."""


@dataclass(frozen=True)
class BoundProfile:
    f_bar: float      # folded sampling fraction, in (0, 1/2]
    a1: float         # (f_bar + 4) / (4 (1 - f_bar))
    delta: float      # (1/10) / max(a1, 2)
    sigma: float
    gate_ok: bool     # delta * sigma > 1


@dataclass(frozen=True)
class ConstantSet:
    """Numeric realization of the universal constants.

    Unset constants are None; evaluators that need one raise if missing.
    """

    C1: float | None = None
    C2: float | None = None
    C3: float | None = None
    C4: float | None = None
    C5: float | None = None
    C6: float | None = None
    provenance: dict[str, str] = field(default_factory=dict)
    calibration_grid: str | None = None
    timestamp: str | None = None

    def __post_init__(self) -> None:
        for name in CONSTANT_NAMES:
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise ValueError(f"{name} must be positive, got {v}")

    def require(self, *names: str) -> None:
        missing = [n for n in names if getattr(self, n) is None]
        if missing:
            raise ValueError(f"ConstantSet missing {', '.join(missing)}")

    def to_dict(self) -> dict:
        return {
            **{name: getattr(self, name) for name in CONSTANT_NAMES},
            "provenance": dict(self.provenance),
            "calibration_grid": self.calibration_grid,
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        # repr-based float serialization round-trips bit-exactly
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "ConstantSet":
        return cls(
            **{name: d.get(name) for name in CONSTANT_NAMES},
            provenance=dict(d.get("provenance", {})),
            calibration_grid=d.get("calibration_grid"),
            timestamp=d.get("timestamp"),
        )

    @classmethod
    def from_json(cls, text: str) -> "ConstantSet":
        return cls.from_dict(json.loads(text))

    def without_timestamp(self) -> "ConstantSet":
        return replace(self, timestamp=None)


def proof_traced_constants(params: HypParams) -> ConstantSet:
    """Partial constant set carrying only the proof-supplied exponent rate.

    The far-tail estimate gives the decay exp(-0.07 * delta^2 * lambda^2 *
    (1-f)^2 * x^2); with the lambda^2 factor already in the bound formula,
    the exponent constants become 0.07 * delta^2 * (1-f_bar)^2.  The
    prefactor constants have no proof-supplied numbers and stay unset.
    """
    prof = bound_profile(params)
    rate = PROOF_RATE * prof.delta**2 * (1.0 - prof.f_bar) ** 2
    return ConstantSet(
        C4=rate,
        C6=rate,
        provenance={"C4": "proof-traced", "C6": "proof-traced"},
        calibration_grid=None,
    )


def bound_profile(params: HypParams) -> BoundProfile:
    f = params.f
    f_bar = f if f <= 0.5 else 1.0 - f
    a1 = (f_bar + 4.0) / (4.0 * (1.0 - f_bar))
    delta = 0.1 / max(a1, 2.0)
    sigma = params.sigma
    return BoundProfile(
        f_bar=f_bar, a1=a1, delta=delta, sigma=sigma, gate_ok=delta * sigma > 1.0
    )


def uniform_bound(params: HypParams, consts: ConstantSet) -> float:
    """C1 / sigma."""
    consts.require("C1")
    return consts.C1 / params.sigma


def lambda_weight(params: HypParams, x: float) -> float:
    """q on the left tail, p on the right; min(p, q) at x = 0.

    At x = 0 both indicator branches fire; the smaller weight maximizes the
    prefactor, which keeps the bound conservative.
    """
    if math.isnan(x):
        raise ValueError("x must be a number")
    if x < 0:
        return params.q
    if x > 0:
        return params.p
    return min(params.p, params.q)


def _check_finite(x: float) -> None:
    if not math.isfinite(x):
        raise ValueError(f"x must be finite, got {x}")


def nonuniform_bound(params: HypParams, x: float, consts: ConstantSet) -> float:
    """(C3/sigma) * (1+x^2)/lambda(x) * exp(-C4 * x^2 * lambda(x)^2)."""
    _check_finite(x)
    consts.require("C3", "C4")
    prof = bound_profile(params)
    if not prof.gate_ok:
        raise GateError(
            f"gate delta*sigma > 1 fails: delta={prof.delta:.6g}, "
            f"sigma={prof.sigma:.6g}"
        )
    lam = lambda_weight(params, x)
    return (
        consts.C3
        / params.sigma
        * (1.0 + x * x)
        / lam
        * math.exp(-consts.C4 * x * x * lam * lam)
    )


def tail_bound(params: HypParams, x: float, consts: ConstantSet) -> float:
    """min(1, C5/min(p,q)^3 * exp(-C6 x^2 min(p,q)^2)) for x > 0."""
    _check_finite(x)
    if not x > 0:
        raise ValueError(f"tail_bound requires x > 0, got {x}")
    consts.require("C5", "C6")
    prof = bound_profile(params)
    if not prof.gate_ok:
        raise GateError(
            f"gate delta*sigma > 1 fails: delta={prof.delta:.6g}, "
            f"sigma={prof.sigma:.6g}"
        )
    mpq = min(params.p, params.q)
    return min(1.0, consts.C5 / mpq**3 * math.exp(-consts.C6 * x * x * mpq * mpq))


@dataclass(frozen=True)
class CltItem:
    params: HypParams
    sigma2: float
    n: int
    n_complement: int     # N - n
    M: int
    M_complement: int     # N - M


@dataclass(frozen=True)
class CltReport:
    items: tuple[CltItem, ...]
    sigma2_increasing: bool
    diverging: dict[str, bool]

    @property
    def all_diagnostics_diverge(self) -> bool:
        return all(self.diverging.values())


def clt_condition(params_sequence: list[HypParams]) -> CltReport:
    """Per-item sigma2 and the four necessity diagnostics.

    A normal limit along the sequence requires sigma2 -> infinity, which in
    turn forces n, N-n, M and N-M all to diverge.
    """
    if not params_sequence:
        raise ValueError("params_sequence must be nonempty")
    items = tuple(
        CltItem(
            params=p,
            sigma2=p.sigma2,
            n=p.n,
            n_complement=p.N - p.n,
            M=p.M,
            M_complement=p.N - p.M,
        )
        for p in params_sequence
    )

    def increasing(values: list[float]) -> bool:
        return all(b > a for a, b in zip(values, values[1:]))

    return CltReport(
        items=items,
        sigma2_increasing=increasing([it.sigma2 for it in items]),
        diverging={
            "n": increasing([it.n for it in items]),
            "N_minus_n": increasing([it.n_complement for it in items]),
            "M": increasing([it.M for it in items]),
            "N_minus_M": increasing([it.M_complement for it in items]),
        },
    )
