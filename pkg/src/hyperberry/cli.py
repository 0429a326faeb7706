"""Command-line surface.

Commands: pmf, cdf, certify, bound, delta, sweep, calibrate, verify.
Exit codes: 0 ok, 1 invalid config, 2 gate/applicability refusal,
3 verification failure.  Output is deterministic; the optional timestamp in
artifacts is suppressible with --no-timestamp.

HYPERBERRY_THREADS caps sweep parallelism (0 = auto, default 1).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import random
import sys
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone

from . import exact, lab, lattice, stirling
from .bounds import ConstantSet, GateError, bound_profile
from .grids import GridConfigError, SweepGrid, load_grid_config
from .params import HypParams
from .stirling import ApplicabilityError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_GATE = 2
EXIT_VERIFY = 3

SWEEP_COLUMNS = [
    "instance_id",
    "n",
    "M",
    "N",
    "p",
    "f",
    "sigma2",
    "sigma",
    "delta_r",
    "delta_times_sigma",
    "gate_ok",
    "delta_param",
    "a1",
    "uniform_bound",
    "max_nonuniform_violation",
    "tail_bound_at_3",
]


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; the contract reserves 2 for gate
    # refusals, so remap usage errors to exit code 1.
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def fmt(x: float) -> str:
    return f"{x:.12g}"


def _params_from(args) -> HypParams:
    try:
        return HypParams(n=args.n, M=args.M, N=args.N)
    except (TypeError, ValueError) as err:
        raise ConfigError(str(err)) from err


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _prob_str(prob: exact.ExactProb) -> str:
    if prob.value is not None:
        return str(prob.value)
    return fmt(math.exp(prob.log_value))


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_pmf(args) -> int:
    params = _params_from(args)
    prob = exact.pmf_exact(params, args.k)
    _emit(_prob_str(prob) + "\n", args.out)
    return EXIT_OK


def cmd_cdf(args) -> int:
    params = _params_from(args)
    prob = exact.cdf_exact(params, args.k)
    _emit(_prob_str(prob) + "\n", args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    params = _params_from(args)
    cert = stirling.certified_pmf(params, args.k, args.delta)
    payload = {
        "value": cert.value,
        "log_main": cert.log_main,
        "rem_bound": cert.rem_bound,
        "lo": cert.lo,
        "hi": cert.hi,
    }
    if args.json:
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = [f"{key} = {fmt(val)}" for key, val in payload.items()]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _load_constants(path: str | None) -> ConstantSet | None:
    if path is None:
        return None
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return ConstantSet.from_json(fh.read())
    except (OSError, ValueError) as err:
        raise ConfigError(f"cannot load constants from {path}: {err}") from err


def cmd_bound(args) -> int:
    from . import bounds

    params = _params_from(args)
    prof = bound_profile(params)
    consts = _load_constants(args.constants)
    payload: dict = {
        "f_bar": prof.f_bar,
        "a1": prof.a1,
        "delta": prof.delta,
        "sigma": prof.sigma,
        "gate_ok": prof.gate_ok,
    }
    if consts is not None:
        if consts.C1 is not None:
            payload["uniform_bound"] = bounds.uniform_bound(params, consts)
        for x in args.x or []:
            payload[f"nonuniform_bound[{fmt(x)}]"] = bounds.nonuniform_bound(
                params, x, consts
            )
            if x > 0:
                payload[f"tail_bound[{fmt(x)}]"] = bounds.tail_bound(
                    params, x, consts
                )
    elif args.x:
        raise ConfigError("--x requires --constants")
    if args.json:
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = []
        for key, val in payload.items():
            lines.append(f"{key} = {val if isinstance(val, bool) else fmt(val)}")
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def cmd_delta(args) -> int:
    params = _params_from(args)
    report = lab.delta_exact(params)
    payload = {
        "delta_sup": report.delta_sup,
        "argmax_k": report.argmax_k,
        "side": report.side,
        "delta_times_sigma": report.delta_times_sigma,
        "backend": report.backend,
    }
    if args.json:
        _emit(json.dumps(payload, indent=2) + "\n", args.out)
    else:
        lines = [
            f"delta_sup = {fmt(report.delta_sup)}",
            f"argmax_k = {report.argmax_k}",
            f"side = {report.side}",
            f"delta_times_sigma = {fmt(report.delta_times_sigma)}",
            f"backend = {report.backend}",
        ]
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _sweep_row(task) -> dict:
    params, consts_dict, compute_delta = task
    from . import bounds

    prof = bound_profile(params)
    row = {
        "instance_id": params.instance_id,
        "n": params.n,
        "M": params.M,
        "N": params.N,
        "p": fmt(params.p),
        "f": fmt(params.f),
        "sigma2": fmt(params.sigma2),
        "sigma": fmt(params.sigma),
        "delta_r": "",
        "delta_times_sigma": "",
        "gate_ok": str(prof.gate_ok).lower(),
        "delta_param": fmt(prof.delta),
        "a1": fmt(prof.a1),
        "uniform_bound": "",
        "max_nonuniform_violation": "",
        "tail_bound_at_3": "",
    }
    if compute_delta:
        d = lab.delta_exact(params)
        row["delta_r"] = fmt(d.delta_sup)
        row["delta_times_sigma"] = fmt(d.delta_times_sigma)
    if consts_dict is not None:
        consts = ConstantSet.from_dict(consts_dict)
        if consts.C1 is not None:
            row["uniform_bound"] = fmt(bounds.uniform_bound(params, consts))
        if prof.gate_ok and consts.C3 is not None and consts.C4 is not None:
            row["max_nonuniform_violation"] = fmt(
                lab.max_nonuniform_violation(params, consts)
            )
        if prof.gate_ok and consts.C5 is not None and consts.C6 is not None:
            row["tail_bound_at_3"] = fmt(bounds.tail_bound(params, 3.0, consts))
    return row


def _thread_count() -> int:
    raw = os.environ.get("HYPERBERRY_THREADS", "1")
    try:
        value = int(raw)
    except ValueError as err:
        raise ConfigError(f"HYPERBERRY_THREADS must be an integer, got {raw!r}") from err
    if value < 0:
        raise ConfigError("HYPERBERRY_THREADS must be >= 0")
    if value == 0:
        return os.cpu_count() or 1
    return value


def cmd_sweep(args) -> int:
    try:
        grid = load_grid_config(args.grid)
    except (OSError, GridConfigError) as err:
        raise ConfigError(str(err)) from err
    consts = _load_constants(args.constants)
    consts_dict = consts.to_dict() if consts is not None else None
    instances = grid.instances()
    tasks = [(p, consts_dict, not args.no_delta) for p in instances]
    workers = _thread_count()
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_sweep_row, tasks))
    else:
        rows = [_sweep_row(t) for t in tasks]
    # deterministic reduction order regardless of scheduling
    rows.sort(key=lambda r: r["instance_id"])
    buf = io.StringIO()
    if not args.no_timestamp:
        stamp = datetime.now(timezone.utc).isoformat()
        buf.write(f"# generated {stamp}\n")
    writer = csv.DictWriter(buf, fieldnames=SWEEP_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_calibrate(args) -> int:
    try:
        grid = load_grid_config(args.grid)
    except (OSError, GridConfigError) as err:
        raise ConfigError(str(err)) from err
    instances = grid.instances()
    stamp = None
    if not args.no_timestamp:
        stamp = datetime.now(timezone.utc).isoformat()
    try:
        consts = lab.calibrate_constants(
            instances, grid_description=grid.describe(), timestamp=stamp
        )
    except lab.CalibrationError as err:
        raise ConfigError(str(err)) from err
    _emit(consts.to_json() + "\n", args.out)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_checks():
    """Curated property suite; yields (name, passed, detail)."""
    from . import gaussian

    # normalization + backend agreement on a small grid
    ok = True
    detail = ""
    for N, M, n in [(30, 10, 7), (50, 25, 25), (200, 20, 150)]:
        params = HypParams(n=n, M=M, N=N)
        total = sum(
            exact.pmf_fraction(params, k)
            for k in range(params.support_min, params.support_max + 1)
        )
        if total != 1:
            ok, detail = False, f"{params.instance_id} sums to {total}"
            break
        table = exact.log_pmf_table(params)
        for k in range(params.support_min, params.support_max + 1):
            r = exact.pmf_fraction(params, k)
            rel = abs(math.exp(table.log_at(k)) - float(r)) / float(r)
            if rel > 1e-12:
                ok, detail = False, f"{params.instance_id} backend drift {rel:.2g}"
                break
    yield "normalization and backend agreement", ok, detail

    # Stirling sandwich
    ok = True
    detail = ""
    for m in range(1, 201):
        eps = math.lgamma(m + 1) - (
            0.5 * math.log(2 * math.pi) - m + (m + 0.5) * math.log(m)
        )
        b = stirling.stirling_eps_bounds(m)
        if not (b.lo <= eps <= b.hi):
            ok, detail = False, f"m={m}: eps={eps!r} outside [{b.lo!r}, {b.hi!r}]"
            break
    yield "stirling sandwich (m = 1..200)", ok, detail

    # certified enclosures contain the exact pmf
    ok = True
    detail = ""
    for N in (50, 100, 200):
        for p in (0.1, 0.5):
            for f in (0.1, 0.5):
                params = HypParams(
                    n=max(1, round(f * N)), M=max(1, round(p * N)), N=N
                )
                for delta in (0.25, 0.5):
                    for k in range(params.support_min, params.support_max + 1):
                        if not stirling.check_applicability(params, k, delta).ok:
                            continue
                        cert = stirling.certified_pmf(params, k, delta)
                        v = float(exact.pmf_fraction(params, k))
                        if not (cert.lo <= v <= cert.hi):
                            ok = False
                            detail = f"{params.instance_id} k={k} delta={delta}"
    yield "certified enclosure containment", ok, detail

    # delta law and gate
    prof_half = bound_profile(HypParams(n=100, M=100, N=200))
    ok = abs(prof_half.delta - 1 / 22.5) < 1e-16
    prof_small = bound_profile(HypParams(n=10, M=50, N=100))
    ok = ok and prof_small.delta == 0.05
    yield "delta law (1/22.5 at f=1/2; 1/20 for small f)", ok, ""

    # duality
    report = lab.duality_suite(
        [HypParams(30, 50, 100), HypParams(10, 20, 100), HypParams(2, 2, 4)]
    )
    yield "duality identities", not report.violations, "; ".join(report.violations)

    # Mill's ratio domination
    # compare against the cancellation-free upper-tail form
    ok = all(
        gaussian.mills_upper_tail(x) >= 0.5 * math.erfc(x / math.sqrt(2.0))
        for x in [0.01 * i for i in range(1, 1001)]
    )
    yield "Mill's ratio tail bound", ok, ""

    # lattice-sum inequalities, seeded random sample
    rng = random.Random(20240817)
    ok = True
    detail = ""
    for _ in range(50):
        a = rng.uniform(-3, 3)
        case = lattice.LatticeSumCase(
            b=rng.uniform(-8, 4),
            h=rng.uniform(0.05, 2.0),
            k=rng.randrange(0, 200),
            peak=a,
        )
        lhs, rhs = lattice.monotone_sum_bound(case, lambda x, a=a: gaussian.phi(x - a))
        if lhs > rhs:
            ok, detail = False, f"monotone sum case {case}"
            break
        lhs, rhs = lattice.phi_riemann_bound(
            rng.uniform(0, 5), rng.uniform(0.02, 1.0), rng.randrange(1, 150)
        )
        if lhs > rhs:
            ok, detail = False, "riemann bound case"
            break
    yield "lattice-sum inequalities (random sample)", ok, detail


def cmd_verify(args) -> int:
    failures = 0
    for name, passed, detail in _verify_checks():
        status = "PASS" if passed else "FAIL"
        line = f"{status} {name}"
        if detail and not passed:
            line += f" ({detail})"
        print(line)
        if not passed:
            failures += 1
    if failures:
        print(f"{failures} check(s) failed", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hyperberry")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_point(name, help_text, with_k=True):
        sp = sub.add_parser(name, help=help_text)
        sp.add_argument("--n", type=int, required=True)
        sp.add_argument("--M", type=int, required=True)
        sp.add_argument("--N", type=int, required=True)
        if with_k:
            sp.add_argument("--k", type=int, required=True)
        sp.add_argument("--out", default=None)
        sp.add_argument("--json", action="store_true")
        return sp

    add_point("pmf", "exact point probability").set_defaults(func=cmd_pmf)
    add_point("cdf", "exact lower cumulative probability").set_defaults(func=cmd_cdf)
    sp = add_point("certify", "certified pmf enclosure")
    sp.add_argument("--delta", type=float, default=0.5)
    sp.set_defaults(func=cmd_certify)

    sp = add_point("bound", "bound profile and bound evaluations", with_k=False)
    sp.add_argument("--constants", default=None)
    sp.add_argument("--x", type=float, action="append")
    sp.set_defaults(func=cmd_bound)

    sp = add_point("delta", "exact Kolmogorov distance", with_k=False)
    sp.set_defaults(func=cmd_delta)

    sp = sub.add_parser("sweep", help="evaluate a grid, one CSV row per instance")
    sp.add_argument("--grid", required=True)
    sp.add_argument("--constants", default=None)
    sp.add_argument("--out", default=None)
    sp.add_argument("--no-delta", action="store_true")
    sp.add_argument("--no-timestamp", action="store_true")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("calibrate", help="fit constants over a grid")
    sp.add_argument("--grid", required=True)
    sp.add_argument("--out", default=None)
    sp.add_argument("--no-timestamp", action="store_true")
    sp.set_defaults(func=cmd_calibrate)

    sp = sub.add_parser("verify", help="run the property suite")
    sp.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return err.code if isinstance(err.code, int) else EXIT_CONFIG
    try:
        return args.func(args)
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG
    except (ApplicabilityError, GateError) as err:
        print(f"refused: {err}", file=sys.stderr)
        return EXIT_GATE
    except lab.BudgetError as err:
        print(f"refused: {err}", file=sys.stderr)
        return EXIT_GATE
    except (TypeError, ValueError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
