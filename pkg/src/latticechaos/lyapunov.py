"""Maximum Lyapunov exponent estimation and parameter-space maps.

The estimator propagates the exact variational (tangent) flow jointly
with the trajectory and renormalizes the tangent vector at fixed
intervals; the exponent is the time average of the accumulated log
growth.  A two-trajectory shadowing estimator is provided as an
independent cross-check, and two map drivers scan the exponent over
the control-parameter plane and over the Bloch sphere of internal
initial conditions on a fixed energy shell.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import AtomState, SystemParams, TangentVector
from .integrate import (
    SWEEP_CONFIG,
    IntegrationError,
    IntegratorConfig,
    integrate_with_tangent,
)

__all__ = [
    "LyapunovEstimate",
    "max_lyapunov",
    "two_trajectory_lyapunov",
    "lyapunov_parameter_map",
    "lyapunov_bloch_map",
    "shell_momentum",
]

#: Floor on the chaos threshold; exponents below it are treated as zero.
LAMBDA_FLOOR = 1e-4

#: Number of blocks used for the standard-error estimate.
_N_BLOCKS = 20


@dataclass
class LyapunovEstimate:
    """Result of a tangent-flow Lyapunov run.

    ``value`` is the finite-time maximum exponent at the full horizon,
    ``stderr`` the standard error of the per-block growth rates over
    ``n_blocks`` equal sub-intervals, and ``series`` the running
    finite-time estimate at every renormalization checkpoint.
    """

    value: float
    stderr: float
    tau: np.ndarray
    series: np.ndarray
    n_blocks: int = _N_BLOCKS

    @property
    def is_chaotic(self) -> bool:
        """Positive beyond both statistical and floor thresholds."""
        return self.value > max(3.0 * self.stderr, LAMBDA_FLOOR)


def _block_stderr(tau, log_growth, n_blocks):
    """Standard error of the mean growth rate over equal time blocks."""
    edges = np.linspace(0.0, tau[-1], n_blocks + 1)
    idx = np.searchsorted(tau, edges[1:-1], side="left")
    sums = np.add.reduceat(log_growth, np.concatenate([[0], idx]))
    widths = np.diff(edges)
    rates = sums / widths
    return float(np.std(rates, ddof=1) / math.sqrt(n_blocks))


_DEFAULT_TANGENT = TangentVector(1.0, 1.0, 1.0, 1.0, 1.0)


def max_lyapunov(
    s0: AtomState,
    params: SystemParams,
    total_tau: float = 1e5,
    cfg: IntegratorConfig = SWEEP_CONFIG,
    renorm_interval: float = 5.0,
    tangent0: TangentVector = _DEFAULT_TANGENT,
    n_blocks: int = _N_BLOCKS,
) -> LyapunovEstimate:
    """Maximum Lyapunov exponent by tangent propagation.

    The initial tangent direction is irrelevant after the transient
    (it aligns with the most expanding direction); the default is a
    generic vector with all components equal.
    """
    if total_tau <= 0.0:
        raise ValueError("total_tau must be positive")
    if n_blocks < 2:
        raise ValueError("n_blocks must be at least 2")
    if total_tau / renorm_interval < n_blocks:
        raise ValueError("total_tau must cover at least one "
                         "renormalization interval per block")
    _, trace = integrate_with_tangent(
        s0, tangent0, params, total_tau, cfg,
        renorm_interval=renorm_interval, sampling=1_000_000_000)
    series = trace.finite_time_lambda()
    value = float(series[-1])
    stderr = _block_stderr(trace.tau, trace.log_growth, n_blocks)
    return LyapunovEstimate(value=value, stderr=stderr, tau=trace.tau,
                            series=series, n_blocks=n_blocks)


def two_trajectory_lyapunov(
    s0: AtomState,
    params: SystemParams,
    total_tau: float = 1e5,
    cfg: IntegratorConfig = SWEEP_CONFIG,
    renorm_interval: float = 5.0,
    separation: float = 1e-8,
) -> LyapunovEstimate:
    """Benettin shadowing estimator (finite-difference cross-check).

    Integrates a companion trajectory displaced by ``separation`` along
    x and rescales the difference vector back to ``separation`` at each
    interval.  Slower and less accurate than :func:`max_lyapunov` (the
    difference leaves the Bloch sphere constraint only to second
    order), but fully independent of the variational equations.
    """
    from . import _core
    if separation <= 0.0:
        raise ValueError("separation must be positive")
    n_intervals = int(round(total_tau / renorm_interval))
    if n_intervals < 1:
        raise ValueError("total_tau must cover one renormalization interval")
    ya = s0.as_array()
    yb = ya.copy()
    yb[0] += separation
    logs = np.empty(n_intervals)
    taus = np.empty(n_intervals)
    for i in range(n_intervals):
        t0 = i * renorm_interval
        t1 = (i + 1) * renorm_interval
        for y in (ya, yb):
            ts, ys, status, _ = _core._run_record(
                y, params.omega_r, params.delta, t0, t1,
                cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.initial_step,
                1_000_000_000, 500_000_000)
            if status != _core.OK:
                raise IntegrationError(f"companion run failed near tau={t1}")
            y[:] = ys[-1]
        diff = yb - ya
        dist = float(np.linalg.norm(diff))
        logs[i] = math.log(dist / separation)
        taus[i] = t1
        yb[:] = ya + diff * (separation / dist)
    series = np.cumsum(logs) / taus
    return LyapunovEstimate(
        value=float(series[-1]),
        stderr=_block_stderr(taus, logs, _N_BLOCKS),
        tau=taus, series=series)


def _map_worker(args):
    s0, params, total_tau, cfg, renorm = args
    try:
        est = max_lyapunov(s0, params, total_tau, cfg,
                           renorm_interval=renorm)
    except IntegrationError:
        return math.nan
    return est.value


def _run_grid(tasks, threads):
    if threads == 1:
        return [_map_worker(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(_map_worker, tasks))


def lyapunov_parameter_map(
    omega_r_values,
    delta_values,
    s0: AtomState = AtomState(0.0, 200.0, 0.0, 0.0, -1.0),
    total_tau: float = 1e4,
    cfg: IntegratorConfig = SWEEP_CONFIG,
    renorm_interval: float = 5.0,
    threads: int = 1,
) -> np.ndarray:
    """Exponent over the (omega_r, delta) control plane, fixed s0.

    Returns an array of shape (len(omega_r_values), len(delta_values)).
    Cells whose integration aborts are NaN.  The jitted kernels release
    the GIL, so ``threads`` > 1 gives near-linear speedup.
    """
    omega_r_values = np.asarray(omega_r_values, dtype=float)
    delta_values = np.asarray(delta_values, dtype=float)
    tasks = [
        (s0, SystemParams(omega_r=wr, delta=d), total_tau, cfg,
         renorm_interval)
        for wr in omega_r_values for d in delta_values
    ]
    flat = _run_grid(tasks, threads)
    return np.array(flat).reshape(len(omega_r_values), len(delta_values))


def shell_momentum(
    x: float, u: float, z: float, energy: float, params: SystemParams
) -> float:
    """Positive momentum on the energy shell W = ``energy`` at (x, u, z).

    Raises ValueError when the shell does not reach this configuration
    (kinetic energy would be negative).
    """
    kin = energy + u * math.cos(x) + 0.5 * params.delta * z
    if kin < 0.0:
        raise ValueError(
            f"energy shell W={energy} does not reach (x={x}, u={u}, z={z}): "
            f"required kinetic energy {kin} < 0")
    return math.sqrt(2.0 * kin / params.omega_r)


def lyapunov_bloch_map(
    params: SystemParams,
    energy: float,
    n: int = 41,
    x0: float = 0.0,
    total_tau: float = 1e4,
    cfg: IntegratorConfig = SWEEP_CONFIG,
    renorm_interval: float = 5.0,
    threads: int = 1,
):
    """Exponent over internal initial conditions on a fixed energy shell.

    Scans an n-by-n grid of (v0, z0) over the unit disk; u0 is the
    positive root sqrt(1 - v0^2 - z0^2) and p0 > 0 is solved from the
    shell condition.  Returns (v_values, z_values, lam) where cells
    outside the disk or off the shell are NaN.
    """
    v_values = np.linspace(-1.0, 1.0, n)
    z_values = np.linspace(-1.0, 1.0, n)
    tasks = []
    index = []
    for i, v0 in enumerate(v_values):
        for j, z0 in enumerate(z_values):
            r2 = v0 * v0 + z0 * z0
            if r2 > 1.0:
                continue
            u0 = math.sqrt(1.0 - r2)
            try:
                p0 = shell_momentum(x0, u0, z0, energy, params)
                s0 = AtomState(x0, p0, u0, v0, z0)
            except ValueError:
                continue
            tasks.append((s0, params, total_tau, cfg, renorm_interval))
            index.append((i, j))
    flat = _run_grid(tasks, threads)
    lam = np.full((n, n), math.nan)
    for (i, j), val in zip(index, flat):
        lam[i, j] = val
    return v_values, z_values, lam
