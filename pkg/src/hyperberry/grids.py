"""Declarative parameter grids and their flat key-value config format.

A grid declares a list of population sizes plus a rule each for the
proportion p and the sampling fraction f.  Rules:

* ``list v1, v2, ...``  -- explicit values, crossed with every N
* ``const v``           -- a single value
* ``powerlaw a=0.6``    -- value N**(-a), one per N (trajectories)

Integer realization rounds half up and clamps into [1, N-1], preserving the
parameter invariants.  Filters: ``min_sigma`` and ``require_gate``.

Config files are diff-friendly flat documents, one ``key = value`` per line,
``#`` comments::

    N = 100..2000 step 100
    p = list 0.05, 0.1, 0.5
    f = powerlaw a=0.6
    min_sigma = 3
    require_gate = false
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .bounds import bound_profile
from .params import HypParams


class GridConfigError(ValueError):
    pass


@dataclass(frozen=True)
class Rule:
    kind: str                      # "list" | "const" | "powerlaw"
    values: tuple[float, ...] = ()
    exponent: float = 0.0

    def values_for(self, N: int) -> tuple[float, ...]:
        if self.kind == "list":
            return self.values
        if self.kind == "const":
            return self.values
        if self.kind == "powerlaw":
            return (N ** (-self.exponent),)
        raise GridConfigError(f"unknown rule kind {self.kind!r}")

    def describe(self) -> str:
        if self.kind == "powerlaw":
            return f"powerlaw a={self.exponent:g}"
        return self.kind + " " + ", ".join(f"{v:g}" for v in self.values)


def rule_list(*values: float) -> Rule:
    return Rule(kind="list", values=tuple(values))


def rule_const(value: float) -> Rule:
    return Rule(kind="const", values=(value,))


def rule_powerlaw(exponent: float) -> Rule:
    return Rule(kind="powerlaw", exponent=exponent)


def round_count(ratio: float, N: int) -> int:
    """Half-up rounding of ratio*N, clamped to [1, N-1]."""
    return max(1, min(N - 1, int(math.floor(ratio * N + 0.5))))


@dataclass(frozen=True)
class SweepGrid:
    N_values: tuple[int, ...]
    p_rule: Rule
    f_rule: Rule
    min_sigma: float = 0.0
    require_gate: bool = False
    name: str = ""

    def instances(self) -> list[HypParams]:
        """Deterministic generation order: N ascending, then p, then f."""
        out: list[HypParams] = []
        seen: set[HypParams] = set()
        for N in self.N_values:
            for p in self.p_rule.values_for(N):
                for f in self.f_rule.values_for(N):
                    M = round_count(p, N)
                    n = round_count(f, N)
                    params = HypParams(n=n, M=M, N=N)
                    if params in seen:
                        continue
                    if params.sigma < self.min_sigma:
                        continue
                    if self.require_gate and not bound_profile(params).gate_ok:
                        continue
                    seen.add(params)
                    out.append(params)
        return out

    def describe(self) -> str:
        ns = ", ".join(str(N) for N in self.N_values)
        parts = [
            f"N = {ns}",
            f"p = {self.p_rule.describe()}",
            f"f = {self.f_rule.describe()}",
        ]
        if self.min_sigma:
            parts.append(f"min_sigma = {self.min_sigma:g}")
        if self.require_gate:
            parts.append("require_gate = true")
        return "; ".join(parts)


# ---------------------------------------------------------------------------
# config parsing
# ---------------------------------------------------------------------------

def _parse_N(text: str) -> tuple[int, ...]:
    text = text.strip()
    if ".." in text:
        # "100..2000 step 100"
        head, _, step_part = text.partition("step")
        lo_s, _, hi_s = head.partition("..")
        try:
            lo, hi = int(lo_s), int(hi_s)
            step = int(step_part) if step_part.strip() else 1
        except ValueError as err:
            raise GridConfigError(f"bad N range {text!r}") from err
        if step <= 0 or hi < lo:
            raise GridConfigError(f"bad N range {text!r}")
        return tuple(range(lo, hi + 1, step))
    try:
        return tuple(int(float(tok)) for tok in text.split(","))
    except ValueError as err:
        raise GridConfigError(f"bad N list {text!r}") from err


def _parse_rule(text: str) -> Rule:
    text = text.strip()
    if text.startswith("powerlaw"):
        rest = text[len("powerlaw"):].strip()
        if not rest.startswith("a="):
            raise GridConfigError(f"powerlaw rule needs a=..., got {text!r}")
        return rule_powerlaw(float(rest[2:]))
    if text.startswith("const"):
        return rule_const(float(text[len("const"):]))
    if text.startswith("list"):
        text = text[len("list"):]
    try:
        values = tuple(float(tok) for tok in text.split(","))
    except ValueError as err:
        raise GridConfigError(f"bad rule {text!r}") from err
    return rule_list(*values)


def parse_grid_config(text: str, name: str = "") -> SweepGrid:
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise GridConfigError(f"line {lineno}: expected key = value")
        fields[key.strip()] = value.strip()
    if "N" not in fields:
        raise GridConfigError("grid config must declare N")
    if "p" not in fields or "f" not in fields:
        raise GridConfigError("grid config must declare p and f rules")
    extra = set(fields) - {"N", "p", "f", "min_sigma", "require_gate"}
    if extra:
        raise GridConfigError(f"unknown keys: {', '.join(sorted(extra))}")
    require_gate = fields.get("require_gate", "false").lower()
    if require_gate not in ("true", "false"):
        raise GridConfigError("require_gate must be true or false")
    return SweepGrid(
        N_values=_parse_N(fields["N"]),
        p_rule=_parse_rule(fields["p"]),
        f_rule=_parse_rule(fields["f"]),
        min_sigma=float(fields.get("min_sigma", "0")),
        require_gate=require_gate == "true",
        name=name,
    )


def load_grid_config(path: str) -> SweepGrid:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_grid_config(fh.read(), name=path)
