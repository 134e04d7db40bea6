"""Batch command-line front end.

Every subcommand writes ``<command>.csv`` plus ``<command>.manifest.json``
into ``--out``. Exit codes: 0 success, 1 numerical failure, 2 usage error.

Passing a previously written manifest to ``--config`` re-runs the command
with the recorded parameters; flags given on the command line still win.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analytic import (
    SystemParams,
    adiabatic_delta_coefficient,
    commutator_cutoff,
    correlation_exact,
    d_bound,
)
from .errors import BoundInvalidError, ConvergenceError, PreconditionError
from .expansion import KERNELS, TestFunction, convolution_expansion_check
from .moments import compare_eliminated
from .noise import mc_correlation
from .quadrature import QuadratureConfig, integrate_f, integrate_lorentzian, residue_check

log = logging.getLogger("cavity_elimination")

HEADERS = {
    "sweep-commutator": ["omega_cap_ratio", "commutator_closed_form", "commutator_quadrature", "abs_diff"],
    "dbound-sweep": ["omega_cap_ratio", "d_bound", "valid"],
    "correlation": ["lag", "real", "imag", "stderr"],
    "eliminate-compare": ["g", "full_occupation", "eliminated_occupation", "rel_error"],
    "residue-check": ["omega_cap_ratio", "lag", "f_real", "f_imag", "leading", "deviation", "s_bound", "pass"],
    "expansion-check": ["kappa", "order", "t_eval", "convolution", "expansion", "residual"],
    "noise-mc": ["lag", "mc_real", "mc_imag", "stderr", "quad_real", "quad_imag", "z_score"],
}
_NOT_PARAMS = {"command", "config", "out", "handler"}


class UsageError(Exception):
    pass


@dataclass
class Outcome:
    rows: list
    results: dict = field(default_factory=dict)
    failed: bool = False


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    return format(value, ".16e")


def float_list(text):
    if isinstance(text, (list, tuple)):
        return [float(v) for v in text]
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def int_list(text):
    return [int(v) for v in float_list(text)]


def sweep_grid(x_min, x_max, points, scale):
    if not x_min > 0 or not x_max > x_min:
        raise UsageError("need 0 < x-min < x-max")
    if points < 2:
        raise UsageError("need at least 2 points")
    if scale == "log":
        return np.geomspace(x_min, x_max, points)
    return np.linspace(x_min, x_max, points)


def _quad_cfg(args):
    return QuadratureConfig(rel_tol=args.rel_tol)


def _pool_map(args, fn, items):
    with ThreadPoolExecutor(max_workers=max(1, args.threads)) as pool:
        return list(pool.map(fn, items))


def run_sweep_commutator(args) -> Outcome:
    xs = sweep_grid(args.x_min, args.x_max, args.points, args.scale)
    cfg = _quad_cfg(args)

    def row(x):
        closed = commutator_cutoff(args.omega_c, x)
        try:
            quad = integrate_lorentzian(args.omega_c, x, cfg)
        except ConvergenceError as exc:
            log.error("quadrature failed at x=%g: %s", x, exc)
            return [x, closed, None, None], True
        return [x, closed, quad, abs(quad - closed)], False

    log.info("commutator sweep: %d points, omega_c/kappa=%g", len(xs), args.omega_c)
    done = _pool_map(args, row, xs)
    rows = [r for r, _ in done]
    diffs = [r[3] for r in rows if r[3] is not None]
    results = {"max_abs_diff": max(diffs) if diffs else None}
    return Outcome(rows, results, failed=any(bad for _, bad in done))


def run_dbound_sweep(args) -> Outcome:
    rows = []
    for x in sweep_grid(args.x_min, args.x_max, args.points, args.scale):
        try:
            rows.append([x, d_bound(args.omega_c, x), True])
        except BoundInvalidError:
            rows.append([x, None, False])
    log.info("d-bound sweep: %d rows, %d valid", len(rows), sum(r[2] for r in rows))
    return Outcome(rows)


def run_correlation(args) -> Outcome:
    method = args.method
    if method != "cutoff-mc":
        extra = [name for name in ("n_traj", "d_omega") if getattr(args, name) is not None]
        if extra:
            raise UsageError(f"--{extra[0].replace('_', '-')} only applies to --method cutoff-mc")
    lags = args.lags
    results = {}
    if method == "exact":
        rows = [[lag, correlation_exact(args.n_th, lag), 0.0, None] for lag in lags]
    elif method == "cutoff-quad":
        cfg = _quad_cfg(args)
        scale = args.n_th / (2 * math.pi)
        values = _pool_map(args, lambda lag: integrate_f(lag, args.omega_c, args.omega_cap, cfg), lags)
        rows = [[lag, scale * v.real, scale * v.imag, None] for lag, v in zip(lags, values)]
    elif method == "cutoff-mc":
        missing = [name for name in ("seed", "n_traj", "d_omega") if getattr(args, name) is None]
        if missing:
            raise UsageError("cutoff-mc requires " + ", ".join("--" + m.replace("_", "-") for m in missing))
        series = mc_correlation(args.omega_cap, args.d_omega, args.n_th, args.n_traj, lags, args.seed,
                                omega_c=args.omega_c, threads=args.threads)
        rows = [[lag, v.real, v.imag, se] for lag, v, se in zip(lags, series.values, series.stderr)]
        if series.warnings:
            results["warnings"] = series.warnings
    else:
        coeff = adiabatic_delta_coefficient(args.n_th)
        rows = [[lag, coeff if lag == 0 else 0.0, 0.0, None] for lag in lags]
        results["delta_coefficient"] = coeff
        results["note"] = ("adiabatic correlation is (4 n_th / kappa) delta(t - t'); "
                           "the lag-0 row holds the delta weight, pointwise values are distributional")
        log.info("adiabatic: delta weight %g, values are distributional", coeff)
    log.info("correlation (%s): %d lags", method, len(rows))
    return Outcome(rows, results)


def run_eliminate_compare(args) -> Outcome:
    if not args.g_list or any(g <= 0 for g in args.g_list):
        raise UsageError("--g-list must be non-empty and positive")
    base = SystemParams(gamma=args.gamma, n_th_b=args.n_b, n_th_a=args.n_a, g_coupling=0.0)
    report = compare_eliminated(base, args.g_list, threads=args.threads)
    rows = [list(r) for r in zip(report.g_values, report.full_occupation,
                                 report.eliminated_occupation, report.rel_errors)]
    log.info("elimination comparison: exponent %.4f", report.scaling_exponent)
    return Outcome(rows, {"scaling_exponent": report.scaling_exponent})


def run_residue_check(args) -> Outcome:
    cfg = _quad_cfg(args)
    try:
        reports = _pool_map(args, lambda x: residue_check(args.omega_c, x, args.lags, cfg), args.x_list)
    except (PreconditionError, BoundInvalidError) as exc:
        raise UsageError(str(exc))
    rows = []
    for rep in reports:
        for i, lag in enumerate(rep.lags):
            rows.append([rep.omega_cap, lag, rep.f_values[i].real, rep.f_values[i].imag,
                         rep.leading[i], rep.deviations[i], rep.s_bound, bool(rep.passed[i])])
    failed = not all(rep.all_passed for rep in reports)
    log.info("residue check: %d rows, %s", len(rows), "FAIL" if failed else "all pass")
    return Outcome(rows, {"max_deviation": [rep.max_deviation for rep in reports]}, failed)


def run_expansion_check(args) -> Outcome:
    g = TestFunction(args.test_function, width=args.width, rate=args.rate, scale=args.scale_factor)
    rows = []
    for kappa in args.kappas:
        for order in args.orders:
            rep = convolution_expansion_check(g, order, args.t_eval, kappa, args.kernel)
            rows.append([kappa, order, args.t_eval, rep.convolution, rep.expansion, rep.residual])
    log.info("expansion check: %d rows (%s kernel)", len(rows), args.kernel)
    return Outcome(rows)


def run_noise_mc(args) -> Outcome:
    if args.seed is None:
        raise UsageError("noise-mc requires --seed")
    lags = args.lags
    log.info("noise-mc: %d trajectories, %d lags", args.n_traj, len(lags))
    series = mc_correlation(args.omega_cap, args.d_omega, args.n_th, args.n_traj, lags, args.seed,
                            omega_c=args.omega_c, threads=args.threads)
    cfg = _quad_cfg(args)
    quad = _pool_map(args, lambda lag: integrate_f(lag, args.omega_c, args.omega_cap, cfg), lags)
    scale = args.n_th / (2 * math.pi)
    rows = []
    worst = 0.0
    for lag, v, se, q in zip(lags, series.values, series.stderr, quad):
        q = scale * q
        z = abs(v - q) / se if se > 0 else (0.0 if v == q else math.inf)
        worst = max(worst, z)
        rows.append([lag, v.real, v.imag, se, q.real, q.imag, z])
    results = {"max_z_score": worst}
    if series.warnings:
        results["warnings"] = series.warnings
    return Outcome(rows, results, failed=worst > 3)


def _global_flags():
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--out", default=".", help="output directory")
    g.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")
    g.add_argument("--rel-tol", type=float, default=1e-10, help="quadrature relative tolerance")
    g.add_argument("--threads", type=int, default=1, help="worker threads")
    g.add_argument("--config", default=None, help="JSON file of flag values, or a run manifest")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cavity-elim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    common = [_global_flags()]
    parser.commands = {}

    p = sub.add_parser("sweep-commutator", parents=common, help="cut-off commutator vs Omega/kappa")
    p.add_argument("--omega-c", type=float, default=1e3)
    p.add_argument("--x-min", type=float, default=10.0)
    p.add_argument("--x-max", type=float, default=1e6)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--scale", choices=["linear", "log"], default="log")
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_sweep_commutator)

    p = sub.add_parser("dbound-sweep", parents=common, help="bound on the correlation difference D")
    p.add_argument("--omega-c", type=float, default=1e3)
    p.add_argument("--x-min", type=float, default=1e3)
    p.add_argument("--x-max", type=float, default=1e7)
    p.add_argument("--points", type=int, default=200)
    p.add_argument("--scale", choices=["linear", "log"], default="log")
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_dbound_sweep)

    p = sub.add_parser("correlation", parents=common, help="cavity correlation by one method")
    p.add_argument("--method", choices=["exact", "cutoff-quad", "cutoff-mc", "adiabatic"], required=True)
    p.add_argument("--n-th", type=float, default=1.0)
    p.add_argument("--omega-c", type=float, default=1e3)
    p.add_argument("--omega-cap", type=float, default=1e4)
    p.add_argument("--lags", type=float_list, default=[0.0, 1.0, 2.0, 5.0])
    p.add_argument("--d-omega", type=float, default=None)
    p.add_argument("--n-traj", type=int, default=None)
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_correlation)

    p = sub.add_parser("eliminate-compare", parents=common, help="full vs eliminated occupation")
    p.add_argument("--gamma", type=float, default=1e-3)
    p.add_argument("--n-b", type=float, default=1.0)
    p.add_argument("--n-a", type=float, default=0.0)
    p.add_argument("--g-list", type=float_list, default=[0.1, 0.05, 0.02, 0.01])
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_eliminate_compare)

    p = sub.add_parser("residue-check", parents=common, help="quadrature kernel vs pole term and arc bound")
    p.add_argument("--omega-c", type=float, default=1e3)
    p.add_argument("--x-list", type=float_list, default=[5e3, 1e4, 1e5])
    p.add_argument("--lags", type=float_list, default=[0.0, 1.0, 2.0, 5.0])
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_residue_check)

    p = sub.add_parser("expansion-check", parents=common, help="delta expansion of the exponential kernel")
    p.add_argument("--test-function", choices=["constant", "gaussian", "exponential"], default="gaussian")
    p.add_argument("--width", type=float, default=100.0)
    p.add_argument("--rate", type=float, default=0.01)
    p.add_argument("--scale-factor", type=float, default=1.0)
    p.add_argument("--t-eval", type=float, default=100.0)
    p.add_argument("--kappas", type=float_list, default=[1.0, 2.0, 4.0])
    p.add_argument("--orders", type=int_list, default=[1, 2])
    p.add_argument("--kernel", choices=list(KERNELS), default="retarded")
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_expansion_check)

    p = sub.add_parser("noise-mc", parents=common, help="Monte Carlo cut-off correlation vs quadrature")
    p.add_argument("--omega-c", type=float, default=1e3)
    p.add_argument("--omega-cap", type=float, default=1e4)
    p.add_argument("--d-omega", type=float, default=0.25)
    p.add_argument("--n-th", type=float, default=1.0)
    p.add_argument("--n-traj", type=int, default=10_000)
    p.add_argument("--lags", type=float_list, default=[0.0, 1.0, 2.0, 5.0])
    parser.commands[p.prog.split()[-1]] = p
    p.set_defaults(handler=run_noise_mc)
    return parser


def _load_config(path, command):
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}")
    if not isinstance(data, dict):
        raise UsageError("config must be a JSON object")
    if "params" in data:
        if data.get("command") not in (None, command):
            raise UsageError(f"manifest is for {data['command']!r}, not {command!r}")
        flat = dict(data["params"])
        flat.setdefault("seed", data.get("seed"))
        tol = data.get("tolerances") or {}
        if "rel_tol" in tol:
            flat.setdefault("rel_tol", tol["rel_tol"])
        data = flat
    return {key.replace("-", "_"): value for key, value in data.items()}


def parse_args(argv):
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    pre, _ = _global_flags().parse_known_args(argv)
    command = next((a for a in argv if a in parser.commands), None)
    if pre.config and command:
        config = _load_config(pre.config, command)
        sub = parser.commands[command]
        known = {a.dest for a in sub._actions}
        unknown = sorted(set(config) - known - _NOT_PARAMS)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(unknown)}")
        values = {k: v for k, v in config.items() if k in known and k not in _NOT_PARAMS}
        # a value from the config satisfies a required flag
        for action in sub._actions:
            if action.dest in values:
                action.required = False
        sub.set_defaults(**values)
    return parser.parse_args(argv)


def render_csv(header, rows) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) for v in row])
    return buf.getvalue().encode("utf-8")


def _jsonable(value):
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def write_outputs(args, outcome: Outcome) -> Path:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{args.command}.csv"
    payload = render_csv(HEADERS[args.command], outcome.rows)
    csv_path.write_bytes(payload)
    params = {k: _jsonable(v) for k, v in vars(args).items() if k not in _NOT_PARAMS}
    manifest = {
        "command": args.command,
        "params": params,
        "seed": args.seed,
        "tolerances": {"rel_tol": args.rel_tol, "abs_tol": QuadratureConfig().abs_tol,
                       "max_subdivisions": QuadratureConfig().max_subdivisions},
        "version": __version__,
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
        "outputs": [{"path": csv_path.name, "sha256": hashlib.sha256(payload).hexdigest()}],
        "results": {k: _jsonable(v) for k, v in outcome.results.items()},
    }
    manifest_path = out_dir / f"{args.command}.manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=2, default=_jsonable) + "\n")
    log.info("wrote %s and %s", csv_path, manifest_path)
    return manifest_path


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(message)s")
    try:
        args = parse_args(argv)
        if args.threads < 1:
            raise UsageError("--threads must be >= 1")
        if args.seed is not None and not 0 <= args.seed < 2**64:
            raise UsageError("--seed must be an unsigned 64-bit integer")
        outcome = args.handler(args)
        write_outputs(args, outcome)
    except UsageError as exc:
        log.error("usage error: %s", exc)
        return 2
    except OSError as exc:
        log.error("cannot write outputs: %s", exc)
        return 2
    except (ArithmeticError, RuntimeError, ValueError) as exc:
        log.error("numerical failure: %s", exc)
        return 1
    return 1 if outcome.failed else 0


if __name__ == "__main__":
    sys.exit(main())
