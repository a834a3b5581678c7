"""Command-line interface.

Subcommands:

* ``run``     — execute the experiment named in a config file.
* ``compare`` — analytic-vs-numeric agreement report.
* ``probe``   — self-similarity zoom cascade into a detuning interval.
* ``dim``     — box-counting dimension of a scan's singular set.

Exit codes: 0 success, 2 config error, 3 runtime failure, 4 partial
results (some cells failed).  All experiments are deterministic; the
``--seed`` flag is reserved.  Parallel grid cells are merged by index,
so results never depend on ``--threads``.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
import warnings

import numpy as np

from . import analytic
from .analytic import DopplerFrame, ResonantOrbit, ValidityWarning
from .config import ConfigError, load_config
from .integrate import IntegrationError, integrate
from .lyapunov import lyapunov_bloch_map, lyapunov_parameter_map
from .poincare import EnergyShell, fibonacci_sphere, poincare_map, \
    shell_initial_conditions
from .scattering import CavitySpec, box_counting_dimension, exit_time_scan, \
    exit_time_surface, self_similarity_probe
from .serialize import write_csv, write_envelope

__all__ = ["main"]

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3
EXIT_PARTIAL = 4


def _emit(args, cfg, header, rows, t_start, partial=False):
    """Write a result table as CSV or as a JSON envelope."""
    wall = time.monotonic() - t_start
    snapshot = cfg.canonical_dict()
    if args.format == "csv":
        write_csv(args.out, header, rows, config=snapshot)
    else:
        payload = {"header": list(header),
                   "rows": [list(map(_jsonable, r)) for r in rows]}
        write_envelope(args.out, snapshot, payload, wall)
    return EXIT_PARTIAL if partial else EXIT_OK


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (np.floating, float)):
        f = float(v)
        return f if math.isfinite(f) else None
    return v


def _run_trajectory(args, cfg):
    t0 = time.monotonic()
    traj = integrate(cfg.initial, cfg.params, cfg.options["tau_end"],
                     cfg.integrator, sampling=cfg.options["sampling"])
    rows = [
        (traj.tau[i], *traj.states[i]) for i in range(len(traj))
    ]
    return _emit(args, cfg, ("tau", "x", "p", "u", "v", "z"), rows, t0)


def _run_lyapunov_map(args, cfg):
    t0 = time.monotonic()
    wr_vals = cfg.options["omega_r_values"]
    d_vals = cfg.options["delta_values"]
    lam = lyapunov_parameter_map(
        wr_vals, d_vals, s0=cfg.initial,
        total_tau=cfg.options["total_tau"], cfg=cfg.integrator,
        renorm_interval=cfg.options["renorm_interval"],
        threads=args.threads)
    rows = [
        (wr, d, lam[i, j])
        for i, wr in enumerate(wr_vals) for j, d in enumerate(d_vals)
    ]
    partial = bool(np.any(np.isnan(lam)))
    return _emit(args, cfg, ("omega_r", "delta", "lambda"), rows, t0,
                 partial=partial)


def _run_bloch_map(args, cfg):
    t0 = time.monotonic()
    v_vals, z_vals, lam = lyapunov_bloch_map(
        cfg.params, cfg.options["energy"], n=cfg.options["n"],
        x0=cfg.options["x0"], total_tau=cfg.options["total_tau"],
        cfg=cfg.integrator,
        renorm_interval=cfg.options["renorm_interval"],
        threads=args.threads)
    rows = [
        (v_vals[i], z_vals[j], lam[i, j])
        for i in range(len(v_vals)) for j in range(len(z_vals))
    ]
    return _emit(args, cfg, ("v0", "z0", "lambda"), rows, t0)


def _run_poincare(args, cfg):
    t0 = time.monotonic()
    shell = EnergyShell(W=cfg.options["energy"], params=cfg.params)
    seeds = fibonacci_sphere(cfg.options["n_seeds"])
    states, rejected = shell_initial_conditions(shell, seeds,
                                                x0=cfg.options["x0"])
    pts = poincare_map(states, shell, tau_max=cfg.options["tau_max"],
                       max_crossings=cfg.options["max_crossings"],
                       cfg=cfg.integrator, threads=args.threads)
    rows = [
        (int(p["trajectory_id"]), p["tau"], p["p"], p["u"], p["v"], p["z"],
         str(p["hemisphere"]))
        for p in pts
    ]
    return _emit(args, cfg,
                 ("trajectory_id", "tau", "p", "u", "v", "z", "hemisphere"),
                 rows, t0, partial=False)


_EXIT_HEADER = ("delta", "p0", "T", "m_minus_1", "outcome",
                "classification", "valid")


def _exit_row(rec):
    return (rec.delta, rec.p0, rec.T, rec.m_minus_1, rec.outcome,
            rec.classification, rec.valid)


def _run_exit_scan(args, cfg):
    t0 = time.monotonic()
    cavity = CavitySpec(**cfg.options["cavity"])
    recs = exit_time_scan(cfg.options["delta_values"], cfg.initial,
                          cfg.options["omega_r"], cavity, cfg.integrator,
                          threads=args.threads)
    rows = [_exit_row(r) for r in recs]
    partial = any(not r.valid for r in recs)
    return _emit(args, cfg, _EXIT_HEADER, rows, t0, partial=partial)


def _run_exit_surface(args, cfg):
    t0 = time.monotonic()
    cavity = CavitySpec(**cfg.options["cavity"])
    grid = exit_time_surface(
        cfg.options["delta_values"], cfg.options["p0_values"],
        cfg.options["bloch0"], cfg.options["omega_r"], cavity,
        cfg.integrator, threads=args.threads)
    rows = []
    partial = False
    for row in grid:
        for rec in row:
            rows.append(_exit_row(rec))
            partial = partial or not rec.valid
    return _emit(args, cfg, _EXIT_HEADER, rows, t0, partial=partial)


def _analytic_prediction(cfg, tau, x_numeric):
    """Analytic channel predictions for the configured branch."""
    s0 = cfg.initial
    params = cfg.params
    branch = cfg.options["branch"]
    if branch == "resonant":
        if params.delta != 0.0:
            raise ConfigError("[analytic-compare] branch 'resonant' "
                              "requires [params].delta = 0")
        orbit = ResonantOrbit(p0=s0.p, u0=s0.u, omega_r=params.omega_r)
        x, p = analytic.resonant_position_momentum(
            tau, s0.p, s0.u, params.omega_r)
        z = analytic.resonant_inversion(tau, orbit, s0.z, s0.v)
        return {"x": x, "p": p, "z": z}
    if branch == "raman-nath":
        z = analytic.raman_nath_inversion(tau, s0.z, s0.v, s0.p,
                                          params.omega_r)
        return {"z": z}
    if branch in ("far-detuned", "fast-atom"):
        x = x_numeric if branch == "far-detuned" else None
        z = analytic.limit_inversion(tau, s0, params, branch, x=x)
        return {"z": z}
    frame = DopplerFrame.from_params(params, s0.p)
    return {"z": analytic.doppler_rabi_inversion(tau, s0, frame)}


def _run_compare(args, cfg, report_only):
    t0 = time.monotonic()
    tau_end = cfg.options["tau_end"]
    traj = integrate(cfg.initial, cfg.params, tau_end, cfg.integrator)
    n = min(cfg.options["n_samples"], len(traj))
    idx = np.linspace(0, len(traj) - 1, n).astype(int)
    tau = traj.tau[idx]
    sub = traj.states[idx]
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", ValidityWarning)
        pred = _analytic_prediction(cfg, tau, sub[:, 0])
    validity = [str(w.message) for w in caught
                if issubclass(w.category, ValidityWarning)]
    numeric = {"x": sub[:, 0], "p": sub[:, 1], "z": sub[:, 4]}
    summary = {}
    residuals = {}
    for chan, pvals in pred.items():
        res = numeric[chan] - np.asarray(pvals)
        scale = max(np.max(np.abs(numeric[chan])), 1e-300)
        residuals[chan] = res
        summary[chan] = {
            "max_abs_residual": float(np.max(np.abs(res))),
            "rms_residual": float(np.sqrt(np.mean(res**2))),
            "max_relative_residual": float(np.max(np.abs(res)) / scale),
        }
    wall = time.monotonic() - t0
    snapshot = cfg.canonical_dict()
    if report_only or args.format == "json":
        payload = {
            "branch": cfg.options["branch"],
            "validity_warnings": validity,
            "summary": summary,
        }
        if not report_only:
            payload["tau"] = [float(t) for t in tau]
            payload["residuals"] = {
                c: [_jsonable(v) for v in r] for c, r in residuals.items()
            }
        write_envelope(args.out, snapshot, payload, wall)
    else:
        chans = sorted(pred)
        header = ["tau"] + [f"residual_{c}" for c in chans]
        rows = [
            (tau[i], *(residuals[c][i] for c in chans))
            for i in range(len(tau))
        ]
        write_csv(args.out, header, rows, config=snapshot)
    for line in validity:
        print(f"validity: {line}", file=sys.stderr)
    for chan, s in summary.items():
        print(f"{chan}: max|res|={s['max_abs_residual']:.3e} "
              f"rel={s['max_relative_residual']:.3e}", file=sys.stderr)
    return EXIT_OK


def _require_exit_scan(cfg, command):
    if cfg.kind != "exit-scan":
        raise ConfigError(
            f"'{command}' needs an exit-scan config, got kind '{cfg.kind}'")


def _run_probe(args, cfg):
    _require_exit_scan(cfg, "probe")
    t0 = time.monotonic()
    deltas = cfg.options["delta_values"]
    interval = (args.interval[0], args.interval[1]) if args.interval \
        else (min(deltas), max(deltas))
    cavity = CavitySpec(**cfg.options["cavity"])
    levels = []
    for level in range(args.levels):
        n = len(deltas) * args.zoom ** (level + 1) \
            if args.samples is None else args.samples
        report = self_similarity_probe(
            interval, n, cfg.initial, cfg.options["omega_r"], cavity,
            cfg.integrator, threads=args.threads)
        levels.append({
            "interval": list(report.interval),
            "n_samples": n,
            "n_transitions": len(report.transitions),
            "transitions": report.transitions,
            "max_m_minus_1": report.max_m_minus_1,
            "n_censored": sum(r.censored for r in report.records),
        })
        if not report.unresolved_intervals:
            break
        interval = report.unresolved_intervals[0]
    payload = {"levels": levels}
    write_envelope(args.out, cfg.canonical_dict(), payload,
                   time.monotonic() - t0)
    for i, lv in enumerate(levels):
        print(f"level {i}: interval {lv['interval']} transitions "
              f"{lv['n_transitions']} max m-1 {lv['max_m_minus_1']}",
              file=sys.stderr)
    return EXIT_OK


def _run_dim(args, cfg):
    _require_exit_scan(cfg, "dim")
    t0 = time.monotonic()
    cavity = CavitySpec(**cfg.options["cavity"])
    recs = exit_time_scan(cfg.options["delta_values"], cfg.initial,
                          cfg.options["omega_r"], cavity, cfg.integrator,
                          threads=args.threads)
    # singular set: midpoints between cells that differ in m or outcome
    singular = []
    for i in range(len(recs) - 1):
        a, b = recs[i], recs[i + 1]
        if a.m_minus_1 != b.m_minus_1 or a.outcome != b.outcome:
            singular.append(0.5 * (a.delta + b.delta))
    if len(singular) < 100:
        print(f"only {len(singular)} singular points found; need >= 100 "
              "(increase the delta resolution)", file=sys.stderr)
        return EXIT_RUNTIME
    fit = box_counting_dimension(np.array(singular))
    lo, hi = fit.confidence_interval()
    payload = {
        "n_singular_points": len(singular),
        "dimension": fit.dimension,
        "stderr": fit.stderr,
        "r_squared": fit.r_squared,
        "confidence_interval_2sigma": [lo, hi],
        "degenerate": fit.degenerate,
        "singular_points": singular,
    }
    write_envelope(args.out, cfg.canonical_dict(), payload,
                   time.monotonic() - t0)
    print(f"dimension = {fit.dimension:.4f} +- {fit.stderr:.4f} "
          f"(R^2 = {fit.r_squared:.4f}, n = {len(singular)})",
          file=sys.stderr)
    return EXIT_PARTIAL if fit.degenerate else EXIT_OK


_RUNNERS = {
    "trajectory": _run_trajectory,
    "lyapunov-map": _run_lyapunov_map,
    "bloch-map": _run_bloch_map,
    "poincare": _run_poincare,
    "exit-scan": _run_exit_scan,
    "exit-surface": _run_exit_surface,
}


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="latticechaos",
        description="Numerical laboratory for a two-level atom in a "
                    "standing-wave optical lattice.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", required=True,
                        help="TOML experiment config")
        sp.add_argument("--out", required=True, help="output file path")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")
        sp.add_argument("--threads", type=int,
                        default=os.cpu_count() or 1,
                        help="worker threads (results are independent "
                             "of this)")
        sp.add_argument("--seed", type=int, default=None,
                        help="reserved; current experiments are "
                             "deterministic")

    common(sub.add_parser("run", help="execute the configured experiment"))
    common(sub.add_parser(
        "compare", help="analytic-vs-numeric agreement report"))
    probe = sub.add_parser(
        "probe", help="self-similarity zoom cascade (exit-scan config)")
    common(probe)
    probe.add_argument("--interval", type=float, nargs=2, default=None,
                       metavar=("LO", "HI"),
                       help="detuning interval to zoom into (default: the "
                            "configured scan range)")
    probe.add_argument("--levels", type=int, default=3)
    probe.add_argument("--zoom", type=int, default=10,
                       help="per-level resolution multiplier")
    probe.add_argument("--samples", type=int, default=None,
                       help="fixed sample count per level (overrides "
                            "--zoom scaling)")
    common(sub.add_parser(
        "dim", help="box-counting dimension of the scan's singular set"))
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_CONFIG
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        if args.command == "run":
            if cfg.kind == "analytic-compare":
                return _run_compare(args, cfg, report_only=False)
            return _RUNNERS[cfg.kind](args, cfg)
        if args.command == "compare":
            if cfg.kind != "analytic-compare":
                raise ConfigError("'compare' needs an analytic-compare "
                                  f"config, got kind '{cfg.kind}'")
            return _run_compare(args, cfg, report_only=True)
        if args.command == "probe":
            return _run_probe(args, cfg)
        return _run_dim(args, cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (IntegrationError, ValueError, RuntimeError) as exc:
        print(f"runtime failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
