"""Poincare mapping on the lattice-node surface cos x = 1.

Because the potential is 2pi-periodic, the crossings of the lattice
nodes act as a stroboscope in space: the four remaining coordinates
(p, u, v, z) at each crossing form the section.  The Bloch-sphere part
is projected hemisphere by hemisphere (the full projection onto the
v-z plane is two-valued), while the p-z plane merges both hemispheres.
Initial-condition families live on a fixed energy shell W = const.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .dynamics import AtomState, SystemParams, TangentVector
from .integrate import (
    DEFAULT_CONFIG,
    IntegrationError,
    IntegratorConfig,
    find_crossings,
    integrate_with_tangent,
)
from .lyapunov import LAMBDA_FLOOR, shell_momentum

__all__ = [
    "EnergyShell",
    "SectionPoint",
    "StickingWindow",
    "fibonacci_sphere",
    "shell_initial_conditions",
    "poincare_map",
    "project",
    "radial_dispersion",
    "sticking_detector",
    "SECTION_DTYPE",
]

#: |u| at or below this is tagged as the hemisphere boundary.
BOUNDARY_TOL = 1e-12

#: Structured record for one section point.
SECTION_DTYPE = np.dtype([
    ("tau", np.float64),
    ("p", np.float64),
    ("u", np.float64),
    ("v", np.float64),
    ("z", np.float64),
    ("hemisphere", "U8"),
    ("trajectory_id", np.int64),
])


@dataclass(frozen=True)
class EnergyShell:
    """Constant-energy surface W = (omega_r/2) p_eff^2.

    p_eff is the momentum the atom would have where the potential
    vanishes; it is definitionally tied to W.
    """

    W: float
    params: SystemParams

    @property
    def p_eff(self) -> float:
        if self.W < 0.0:
            raise ValueError(f"shell energy W={self.W} < 0 has no "
                             "effective momentum")
        return math.sqrt(2.0 * self.W / self.params.omega_r)

    @classmethod
    def from_p_eff(cls, p_eff: float, params: SystemParams) -> "EnergyShell":
        return cls(W=0.5 * params.omega_r * p_eff**2, params=params)


#: alias kept for symmetry with the structured array records
SectionPoint = np.void


def fibonacci_sphere(n: int = 200) -> np.ndarray:
    """n near-uniform points (u, v, z) on the unit sphere.

    Golden-angle spiral lattice; deterministic.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    i = np.arange(n, dtype=float)
    z = 1.0 - (2.0 * i + 1.0) / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = i * math.pi * (3.0 - math.sqrt(5.0))
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def shell_initial_conditions(
    shell: EnergyShell,
    bloch_seeds=None,
    x0: float = 0.0,
):
    """Initial states on the shell for a family of Bloch triples.

    ``bloch_seeds`` is an iterable of unit (u0, v0, z0); the default is
    a 200-point Fibonacci lattice.  For each triple the momentum is the
    non-negative root of (omega_r/2) p0^2 = W + u0 cos x0 + (delta/2) z0.
    Returns (states, rejected) where ``rejected`` lists (index, reason)
    for seeds the shell cannot reach.
    """
    if bloch_seeds is None:
        bloch_seeds = fibonacci_sphere(200)
    states = []
    rejected = []
    for idx, (u0, v0, z0) in enumerate(bloch_seeds):
        norm = u0 * u0 + v0 * v0 + z0 * z0
        if abs(norm - 1.0) > 1e-9:
            rejected.append((idx, f"Bloch norm {norm} off unit sphere"))
            continue
        try:
            p0 = shell_momentum(x0, float(u0), float(z0), shell.W,
                                shell.params)
        except ValueError as exc:
            rejected.append((idx, str(exc)))
            continue
        states.append(AtomState(x0, p0, float(u0), float(v0), float(z0)))
    return states, rejected


def _hemisphere(u: float) -> str:
    if abs(u) <= BOUNDARY_TOL:
        return "boundary"
    return "west" if u < 0.0 else "east"


def _section_worker(args):
    traj_id, s0, params, tau_max, max_crossings, cfg = args
    try:
        cs = find_crossings(s0, params, tau_max, cfg,
                            max_crossings=max_crossings)
    except IntegrationError:
        return traj_id, np.empty(0, dtype=SECTION_DTYPE)
    out = np.empty(len(cs), dtype=SECTION_DTYPE)
    out["tau"] = cs.tau
    out["p"] = cs.states[:, 1]
    out["u"] = cs.states[:, 2]
    out["v"] = cs.states[:, 3]
    out["z"] = cs.states[:, 4]
    out["hemisphere"] = [_hemisphere(u) for u in cs.states[:, 2]]
    out["trajectory_id"] = traj_id
    return traj_id, out


def poincare_map(
    initial_states,
    shell: EnergyShell,
    tau_max: float = 1e6,
    max_crossings: int = 5000,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    threads: int = 1,
    shell_tol: float = 1e-8,
) -> np.ndarray:
    """Section points for an ensemble of on-shell initial states.

    Each trajectory is integrated until ``tau_max`` or ``max_crossings``
    node crossings; trajectories are independent, so ``threads`` > 1
    runs them concurrently.  The result is a structured array (fields
    of ``SECTION_DTYPE``) sorted by (trajectory_id, tau), identical
    across repeat runs.  Initial states more than ``shell_tol`` off the
    shell energy are rejected up front.
    """
    from .dynamics import total_energy
    initial_states = list(initial_states)
    for s in initial_states:
        w = total_energy(s, shell.params)
        if abs(w - shell.W) > shell_tol:
            raise ValueError(
                f"initial state {s} has W={w}, off the shell "
                f"W={shell.W} by more than {shell_tol}")
    tasks = [
        (i, s, shell.params, tau_max, max_crossings, cfg)
        for i, s in enumerate(initial_states)
    ]
    if threads == 1:
        chunks = [_section_worker(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunks = list(pool.map(_section_worker, tasks))
    chunks.sort(key=lambda pair: pair[0])  # merge by trajectory_id, then tau
    if not chunks:
        return np.empty(0, dtype=SECTION_DTYPE)
    return np.concatenate([c for _, c in chunks])


def project(points: np.ndarray, plane: str) -> np.ndarray:
    """Planar projection of section points.

    plane "v-z-west"/"v-z-east" select one Bloch hemisphere and return
    (v, z) pairs; "p-z" merges both hemispheres and returns (p, z).
    """
    if plane == "v-z-west":
        sel = points[points["hemisphere"] == "west"]
        return np.column_stack([sel["v"], sel["z"]])
    if plane == "v-z-east":
        sel = points[points["hemisphere"] == "east"]
        return np.column_stack([sel["v"], sel["z"]])
    if plane == "p-z":
        return np.column_stack([points["p"], points["z"]])
    raise ValueError(f"plane must be v-z-west|v-z-east|p-z, got {plane!r}")


def radial_dispersion(planar_points: np.ndarray, order: int = 8) -> float:
    """Scatter of planar section points about a fitted closed curve.

    Fits r(theta) around the centroid with a Fourier series up to
    ``order`` and returns std(residual) / mean(r).  Points of a
    regular trajectory lie on a closed (generally non-circular) curve
    and give values far below 1; area-filling chaotic points give
    order-one values.
    """
    pts = np.asarray(planar_points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("expected an (n, 2) array of planar points")
    if len(pts) < 4 * order + 4:
        raise ValueError(f"need at least {4 * order + 4} points to fit "
                         f"order {order}")
    a, b = pts[:, 0], pts[:, 1]
    ac, bc = a.mean(), b.mean()
    th = np.arctan2(b - bc, a - ac)
    r = np.hypot(a - ac, b - bc)
    rbar = r.mean()
    if rbar == 0.0:
        return 0.0
    cols = [np.ones_like(th)]
    for m in range(1, order + 1):
        cols.append(np.cos(m * th))
        cols.append(np.sin(m * th))
    design = np.column_stack(cols)
    coef, *_ = np.linalg.lstsq(design, r, rcond=None)
    resid = r - design @ coef
    return float(resid.std() / rbar)


@dataclass(frozen=True)
class StickingWindow:
    """One sliding-window interval of a sticking analysis."""

    tau_start: float
    tau_end: float
    finite_time_lambda: float
    tag: str  # "sticky" | "chaotic" | "regular"


def sticking_detector(
    s0: AtomState,
    params: SystemParams,
    tau_max: float,
    window: int = 50,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    renorm_interval: float = 5.0,
    max_crossings: int = 100_000,
    threshold: float = None,
):
    """Intermittency diagnosis along a single trajectory.

    Runs the joint tangent flow while recording section crossings, then
    estimates a finite-time Lyapunov exponent over sliding windows of
    ``window`` consecutive crossings.  Windows are tagged "sticky" when
    the local exponent falls below the threshold although the global
    exponent is above it, "chaotic"/"regular" otherwise.  The default
    threshold is half the global exponent (floored at LAMBDA_FLOOR).

    Returns (windows, global_lambda).
    """
    if window < 2:
        raise ValueError("window must be at least 2")
    _, trace, crossings = integrate_with_tangent(
        s0, TangentVector(1.0, 1.0, 1.0, 1.0, 1.0), params, tau_max, cfg,
        renorm_interval=renorm_interval, sampling=1_000_000_000,
        _record_crossings=True, _max_crossings=max_crossings)
    if len(crossings) < 10 * window:
        raise ValueError(
            f"only {len(crossings)} crossings recorded; need at least "
            f"10 windows of {window}")
    global_lambda = float(np.sum(trace.log_growth) / trace.tau[-1])
    if threshold is None:
        threshold = max(0.5 * abs(global_lambda), LAMBDA_FLOOR)
    cum = np.concatenate([[0.0], np.cumsum(trace.log_growth)])
    check_ts = np.concatenate([[0.0], trace.tau])
    glob_chaotic = global_lambda > threshold

    windows = []
    ctau = crossings.tau
    for k in range(0, len(ctau) - window + 1, window):
        t0, t1 = ctau[k], ctau[k + window - 1]
        if t1 <= t0:
            continue
        # interpolate accumulated log growth to the window edges
        g0 = np.interp(t0, check_ts, cum)
        g1 = np.interp(t1, check_ts, cum)
        lam = (g1 - g0) / (t1 - t0)
        if lam > threshold:
            tag = "chaotic"
        elif glob_chaotic:
            tag = "sticky"
        else:
            tag = "regular"
        windows.append(StickingWindow(tau_start=float(t0), tau_end=float(t1),
                                      finite_time_lambda=float(lam), tag=tag))
    return windows, global_lambda
