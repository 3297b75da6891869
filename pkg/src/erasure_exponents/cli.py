"""Command-line front end.

    erasure-exponents bound new      --channel bsc:0.1 --rate 0.13 --threshold 0.05
    erasure-exponents bound forney   --channel bsc:0.1 --rate 0.13 --threshold 0.05
    erasure-exponents bound compare  --channel bsc:0.1 --rates 0.02:0.36:10 --thresholds 0,0.05,0.1
    erasure-exponents bound sweep    --channel chan.json --rates 0.05,0.1 --thresholds 0
    erasure-exponents check symmetry --channel chan.json
    erasure-exponents moments verify --ns 48,96,192 --rate 0.2 --s-values 0.3,0.7 --deltas 0.05,0.5
    erasure-exponents oracle types   --channel bsc:0.1 --rates 0.2 --s-values 0.2,0.5,0.8
    erasure-exponents simulate       --channel bsc:0.1 --n 60 --rate 0.1 --threshold 0.05 --trials 100000

Exit status: 0 on success, 1 for invalid input or a violated precondition,
2 for I/O failures. When --out names a file, a ``<file>.manifest.json``
describing the run is written next to it.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import bsc as bsc_mod
from . import exponents, forney, moments, simulator, type_oracle
from .ensemble import check_symmetry, load_channel
from .errors import DomainError, ExponentError

LN2 = math.log(2.0)
FLOAT_FMT = ".12g"

# output fields measured in nats (converted by --bits); everything else is dimensionless
NAT_FIELDS = {
    "R", "T", "e1_star", "e2_star", "forney_e1", "gap", "e1", "predicted", "oracle",
    "abs_error", "lambda_closed", "lambda_oracle", "max_deviation", "tol",
}

SWEEP_COLUMNS = ["R", "T", "s_R", "s_opt", "branch", "e1_star", "e2_star"]
COMPARE_COLUMNS = SWEEP_COLUMNS + ["forney_e1", "gap"]
MOMENT_COLUMNS = ["n", "R", "s", "delta", "regime", "predicted", "oracle", "abs_error"]
ORACLE_COLUMNS = ["R", "s", "s_R", "lambda_closed", "lambda_oracle", "abs_error", "on_boundary"]
SIM_COLUMNS = ["n", "R", "T", "seed", "codebooks", "trials", "count_e1", "count_e2", "count_erase",
               "p_e1", "p_e1_lo", "p_e1_hi", "p_e2", "p_e2_lo", "p_e2_hi", "p_r0", "p_r0_lo", "p_r0_hi",
               "exp_e1", "exp_e1_one_sided", "exp_e2", "exp_e2_one_sided", "exp_r0", "exp_r0_one_sided",
               "backend"]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage; 2 is reserved for I/O here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# -- argument parsing helpers --------------------------------------------------

def parse_list(text: str) -> list[float]:
    """``lo:hi:count`` (inclusive, evenly spaced) or a comma-separated list."""
    text = text.strip()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError(f"range {text!r} must look like lo:hi:count")
        lo, hi, count = float(parts[0]), float(parts[1]), int(parts[2])
        if count < 1:
            raise UsageError(f"range {text!r} needs count >= 1")
        return [float(v) for v in np.linspace(lo, hi, count)]
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse number list {text!r}") from None


def parse_ints(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"cannot parse integer list {text!r}") from None


def _nats(values, bits: bool) -> list[float]:
    return [v * LN2 for v in values] if bits else list(values)


def _check_nonneg(name: str, values) -> None:
    for v in values:
        if not math.isfinite(v) or v < 0:
            raise DomainError(f"{name} must be finite and >= 0, got {v}")


def _check_unit(name: str, values, lo_open: bool = True) -> None:
    for v in values:
        if not (0.0 < v <= 1.0 if lo_open else 0.0 <= v <= 1.0):
            raise DomainError(f"{name} must lie in {'(0, 1]' if lo_open else '[0, 1]'}, got {v}")


# -- output --------------------------------------------------------------------

def _to_bits(row: dict) -> dict:
    out = dict(row)
    for k, v in row.items():
        if k in NAT_FIELDS and isinstance(v, float):
            out[k] = v / LN2
    return out


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), FLOAT_FMT)
    return str(v)


def render_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, (np.floating, float)):
        v = float(v)
        return v if math.isfinite(v) else None
    if isinstance(v, np.integer):
        return int(v)
    if isinstance(v, np.bool_):
        return bool(v)
    return v


def render_json(payload) -> str:
    return json.dumps(_jsonable(payload), indent=2, sort_keys=False) + "\n"


def _out_format(out: str | None, default: str) -> tuple[str, Path | None]:
    if out is None:
        return default, None
    if out in ("csv", "json"):
        return out, None
    path = Path(out)
    suffix = path.suffix.lower()
    return (suffix[1:] if suffix in (".csv", ".json") else default), path


def emit(args, rows: list[dict], columns: list[str] | None, default: str = "csv",
         single: bool = False, convert: bool = True) -> None:
    if args.bits and convert:
        rows = [_to_bits(r) for r in rows]
    fmt, path = _out_format(args.out, default)
    if fmt == "csv":
        if columns is None:
            columns = list(rows[0].keys())
        text = render_csv(rows, columns)
    else:
        text = render_json(rows[0] if single else rows)
    if path is None:
        sys.stdout.write(text)
        return
    path.write_text(text)
    manifest = {
        "command_line": ["erasure-exponents", *args.argv],
        "config": {k: v for k, v in vars(args).items() if k not in ("func", "argv", "t0")},
        "seeds": [args.seed] if getattr(args, "seed", None) is not None else [],
        "tool_version": _version(),
        "wall_time_s": time.perf_counter() - args.t0,
        "units": "bits" if args.bits else "nats",
    }
    Path(str(path) + ".manifest.json").write_text(render_json(manifest))


def _version() -> str:
    from importlib.metadata import PackageNotFoundError, version
    try:
        return version("erasure-exponents")
    except PackageNotFoundError:
        return "unknown"


def _is_bsc(spec: str) -> bool:
    return spec.startswith("bsc:")


# -- commands ------------------------------------------------------------------

def cmd_bound_new(args) -> None:
    R, T = _nats([args.rate], args.bits)[0], _nats([args.threshold], args.bits)[0]
    _check_nonneg("rate", [R])
    _check_nonneg("threshold", [T])
    ens = load_channel(args.channel)
    if _is_bsc(args.channel) and not args.generic:
        res = bsc_mod.e1_star_bsc(float(args.channel[4:]), R, T)
    else:
        res = exponents.e1_star(ens, R, T, s_max=args.s_max)
    emit(args, [res.to_dict()], None, default="json", single=True)


def cmd_bound_forney(args) -> None:
    R, T = _nats([args.rate], args.bits)[0], _nats([args.threshold], args.bits)[0]
    _check_nonneg("rate", [R])
    _check_nonneg("threshold", [T])
    ens = load_channel(args.channel)
    res = forney.e1_forney(ens, R, T, coarse_n=args.coarse_n, refine_iters=args.refine_iters)
    d = {"R": R, "T": T, **res.to_dict()}
    emit(args, [d], None, default="json", single=True)


def _sweep(args, with_forney: bool) -> None:
    Rs = _nats(parse_list(args.rates), args.bits)
    Ts = _nats(parse_list(args.thresholds), args.bits)
    _check_nonneg("rate", Rs)
    _check_nonneg("threshold", Ts)
    ens = load_channel(args.channel)
    rows = exponents.sweep(ens, Rs, Ts, forney=with_forney, s_max=args.s_max)
    out = []
    for r in rows:
        d = r.to_dict()
        d["s_R"] = d.pop("s_r")
        out.append(d)
    for r in rows:
        if r.error:
            print(f"warning: R={r.R:g}, T={r.T:g}: {r.error}", file=sys.stderr)
    emit(args, out, COMPARE_COLUMNS if with_forney else SWEEP_COLUMNS)


def cmd_bound_compare(args) -> None:
    _sweep(args, True)


def cmd_bound_sweep(args) -> None:
    _sweep(args, False)


def cmd_check_symmetry(args) -> None:
    ens = load_channel(args.channel)
    grid = parse_list(args.s_grid) if args.s_grid else None
    rep = check_symmetry(ens, grid, args.tol)
    d = {"channel": args.channel, "max_deviation": rep.max_deviation, "tol": rep.tol,
         "is_symmetric": rep.is_symmetric, "s_grid": list(rep.s_grid)}
    emit(args, [d], None, default="json", single=True)


def cmd_moments_verify(args) -> None:
    ns = parse_ints(args.ns)
    R = _nats([args.rate], args.bits)[0]
    s_list = parse_list(args.s_values)
    deltas = parse_list(args.deltas)
    if not 0.0 <= R <= LN2:
        raise DomainError(f"rate must lie in [0, ln 2], got {R}")
    _check_unit("s", s_list)
    _check_unit("delta", deltas, lo_open=False)
    for n in ns:
        moments.MomentQuery(n, R, s_list[0] if s_list else 1.0, 0.5)  # range-check n up front
    reports = moments.verify_ladder(ns, R, s_list, deltas, tail_tol=args.tail_tol)
    emit(args, [r.to_dict() for r in reports], MOMENT_COLUMNS)


def cmd_oracle_types(args) -> None:
    Rs = _nats(parse_list(args.rates), args.bits)
    s_list = parse_list(args.s_values)
    _check_nonneg("rate", Rs)
    _check_nonneg("s", s_list)
    if args.grid_res is not None and not 0.0 < args.grid_res <= 0.5:
        raise DomainError(f"grid resolution must lie in (0, 0.5], got {args.grid_res}")
    ens = load_channel(args.channel)
    for R in Rs:
        exponents.check_rate(ens, R)
    rows = type_oracle.compare_lambda(ens, Rs, s_list, args.grid_res)
    out = [{"R": r.R, "s": r.s, "s_R": r.s_r, "lambda_closed": r.lambda_closed,
            "lambda_oracle": r.lambda_oracle, "abs_error": r.abs_error,
            "on_boundary": r.on_boundary} for r in rows]
    emit(args, out, ORACLE_COLUMNS)


def cmd_simulate(args) -> None:
    R, T = _nats([args.rate], args.bits)[0], _nats([args.threshold], args.bits)[0]
    _check_nonneg("rate", [R])
    _check_nonneg("threshold", [T])
    for name in ("n", "trials", "codebooks", "workers"):
        if getattr(args, name) < 1:
            raise DomainError(f"--{name} must be >= 1, got {getattr(args, name)}")
    if args.seed < 0:
        raise DomainError(f"--seed must be >= 0, got {args.seed}")
    ens = load_channel(args.channel)
    res = simulator.run(ens, args.n, R, T, args.trials, seed=args.seed,
                        codebooks_per_run=args.codebooks, workers=args.workers)
    d = res.to_dict()
    if args.bits:
        d = _to_bits(d)
        for ex in d["empirical_exponents"].values():
            ex["value"] /= LN2
    fmt, _ = _out_format(args.out, "json")
    if fmt == "json":
        emit(args, [d], None, default="json", single=True, convert=False)
        return
    flat = {k: v for k, v in d.items() if k not in ("ci_e1", "ci_e2", "ci_r0", "empirical_exponents")}
    for ev in ("e1", "e2", "r0"):
        flat[f"p_{ev}_lo"], flat[f"p_{ev}_hi"] = d[f"ci_{ev}"]
        flat[f"exp_{ev}"] = d["empirical_exponents"][ev]["value"]
        flat[f"exp_{ev}_one_sided"] = d["empirical_exponents"][ev]["one_sided"]
    emit(args, [flat], SIM_COLUMNS, default="json", convert=False)


# -- parser --------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, channel: bool = True) -> None:
    if channel:
        p.add_argument("--channel", required=True, help="bsc:<p> or a JSON channel file")
    p.add_argument("--bits", action="store_true", help="rates, thresholds and exponents in bits")
    p.add_argument("--out", help="csv, json, or an output path (format from .csv/.json)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="erasure-exponents", description="Error exponents for decoding with erasures.")
    top = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    bound = top.add_parser("bound", help="exponent bounds").add_subparsers(dest="cmd", required=True)
    p = bound.add_parser("new", help="single-parameter bound E1*, E2* at one (R, T)")
    _common(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--s-max", type=float, default=1.0)
    p.add_argument("--generic", action="store_true", help="skip the BSC closed form")
    p.set_defaults(func=cmd_bound_new)

    p = bound.add_parser("forney", help="two-parameter reference bound at one (R, T)")
    _common(p)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--coarse-n", type=int, default=400)
    p.add_argument("--refine-iters", type=int, default=6)
    p.set_defaults(func=cmd_bound_forney)

    for name, func, text in (("compare", cmd_bound_compare, "E1* against the reference bound"),
                             ("sweep", cmd_bound_sweep, "E1* over a rate/threshold grid")):
        p = bound.add_parser(name, help=text)
        _common(p)
        p.add_argument("--rates", required=True, help="lo:hi:count or comma list")
        p.add_argument("--thresholds", required=True, help="lo:hi:count or comma list")
        p.add_argument("--s-max", type=float, default=1.0)
        p.set_defaults(func=func)

    check = top.add_parser("check", help="ensemble checks").add_subparsers(dest="cmd", required=True)
    p = check.add_parser("symmetry", help="is gamma_y(s) independent of y?")
    _common(p)
    p.add_argument("--s-grid", help="probe points (default: 21 points on [0, 1])")
    p.add_argument("--tol", type=float, default=1e-9)
    p.set_defaults(func=cmd_check_symmetry)

    mom = top.add_parser("moments", help="distance-enumerator moments").add_subparsers(dest="cmd", required=True)
    p = mom.add_parser("verify", help="exact binomial moments against their exponential rate")
    _common(p, channel=False)
    p.add_argument("--ns", default="48,96,192")
    p.add_argument("--rate", type=float, default=0.2)
    p.add_argument("--s-values", default="0.3,0.7")
    p.add_argument("--deltas", default="0.05,0.5")
    p.add_argument("--tail-tol", type=float, default=1e-15)
    p.set_defaults(func=cmd_moments_verify)

    orc = top.add_parser("oracle", help="brute-force checks").add_subparsers(dest="cmd", required=True)
    p = orc.add_parser("types", help="Lambda(R, s) by grid search over conditional types")
    _common(p)
    p.add_argument("--rates", required=True)
    p.add_argument("--s-values", required=True)
    p.add_argument("--grid-res", type=float)
    p.set_defaults(func=cmd_oracle_types)

    p = top.add_parser("simulate", help="Monte Carlo decoding with an erasure option")
    _common(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--rate", type=float, required=True)
    p.add_argument("--threshold", type=float, required=True)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--codebooks", type=int, default=32)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args.argv = argv
    args.t0 = time.perf_counter()
    try:
        args.func(args)
    except (ExponentError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
