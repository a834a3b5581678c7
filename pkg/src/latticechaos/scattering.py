"""Exit-time chaotic scattering from a finite cavity.

An atom starts at x0 = 0 inside a cavity with detectors at x =
+-half_width; the observables are the exit time T and the number m-1 of
momentum sign changes before detection.  T as a function of detuning
(or of detuning and initial momentum) is a fractal scattering function;
the singular set is characterized by its box-counting dimension.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _core
from .dynamics import AtomState, SystemParams
from .integrate import DEFAULT_CONFIG, IntegratorConfig, _MAX_STEPS

__all__ = [
    "CavitySpec",
    "ExitRecord",
    "exit_time",
    "exit_time_scan",
    "exit_time_surface",
    "self_similarity_probe",
    "box_counting_dimension",
    "cantor_set",
    "BoxCountFit",
]

_OUTCOMES = {
    _core.EXIT_RIGHT: "right-detector",
    _core.EXIT_LEFT: "left-detector",
    _core.EXIT_CUTOFF: "trapped-at-cutoff",
}


@dataclass(frozen=True)
class CavitySpec:
    """Finite cavity: detectors at x = +-half_width, trapping horizon.

    The default spans two standing-wave periods (each 2 pi long)
    centered at the origin.
    """

    half_width: float = 2.0 * math.pi
    tau_cutoff: float = 1e7

    def __post_init__(self):
        if self.half_width <= 0.0:
            raise ValueError("half_width must be positive")
        if self.tau_cutoff <= 0.0:
            raise ValueError("tau_cutoff must be positive")


@dataclass(frozen=True)
class ExitRecord:
    """One cell of a scattering scan.

    ``T`` equals ``tau_cutoff`` for censored (trapped) records;
    ``m_minus_1`` counts strict momentum sign changes before detection.
    ``classification`` flags trajectories that look asymptotic to the
    separatrix ("separatrix-suspect"): censored with nearly zero final
    momentum near a potential maximum.
    """

    delta: float
    p0: float
    T: float
    m_minus_1: int
    outcome: str
    classification: str
    final_state: Optional[AtomState] = None
    valid: bool = True

    @property
    def censored(self) -> bool:
        return self.outcome == "trapped-at-cutoff"


def _classify(outcome_code, T, yfin, cavity, params):
    if outcome_code != _core.EXIT_CUTOFF:
        return "regular-exit"
    # separatrix suspects: momentum dying out on top of a potential hill
    p_scale = 2.0 / math.sqrt(params.omega_r)  # p_cr scale at u0=1
    near_max = math.cos(yfin[0]) < -0.5
    if abs(yfin[1]) <= 1e-3 * p_scale and near_max:
        return "separatrix-suspect"
    return "regular-exit"


def exit_time(
    s0: AtomState,
    params: SystemParams,
    cavity: CavitySpec = CavitySpec(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
) -> ExitRecord:
    """Exit time and direction-change count for one initial condition."""
    if abs(s0.x) >= cavity.half_width:
        raise ValueError(f"x0 = {s0.x} is not inside the cavity "
                         f"(half_width {cavity.half_width})")
    T, nsign, outcome_code, yfin, status, _ = _core._run_exit(
        s0.as_array(), params.omega_r, params.delta,
        cavity.half_width, cavity.tau_cutoff,
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.initial_step, _MAX_STEPS)
    if status != _core.OK:
        return ExitRecord(delta=params.delta, p0=s0.p, T=float(T),
                          m_minus_1=int(nsign), outcome="invalid",
                          classification="invalid", valid=False)
    return ExitRecord(
        delta=params.delta, p0=s0.p, T=float(T), m_minus_1=int(nsign),
        outcome=_OUTCOMES[outcome_code],
        classification=_classify(outcome_code, T, yfin, cavity, params),
        final_state=AtomState.from_array(yfin, renormalize=True))


def _scan_worker(args):
    idx, s0, params, cavity, cfg = args
    return idx, exit_time(s0, params, cavity, cfg)


def _run_cells(tasks, threads):
    if threads == 1:
        results = [_scan_worker(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_scan_worker, tasks))
    results.sort(key=lambda pair: pair[0])
    return [rec for _, rec in results]


def exit_time_scan(
    delta_values,
    s0: AtomState,
    omega_r: float,
    cavity: CavitySpec = CavitySpec(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    threads: int = 1,
):
    """T(delta) scan at fixed initial state; returns ordered ExitRecords."""
    delta_values = np.asarray(delta_values, dtype=float)
    if len(delta_values) < 2:
        raise ValueError("need at least 2 detuning samples")
    tasks = [
        (i, s0, SystemParams(omega_r=omega_r, delta=float(d)), cavity, cfg)
        for i, d in enumerate(delta_values)
    ]
    return _run_cells(tasks, threads)


def exit_time_surface(
    delta_values,
    p0_values,
    bloch0,
    omega_r: float,
    cavity: CavitySpec = CavitySpec(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    threads: int = 1,
):
    """T(delta, p0) matrix at fixed initial Bloch state (u0, v0, z0).

    Returns a nested list indexed [i_delta][j_p0], deterministic in
    cell order.
    """
    delta_values = np.asarray(delta_values, dtype=float)
    p0_values = np.asarray(p0_values, dtype=float)
    if len(delta_values) < 2 or len(p0_values) < 2:
        raise ValueError("both grid axes need at least 2 samples")
    u0, v0, z0 = (float(c) for c in bloch0)
    tasks = []
    for i, d in enumerate(delta_values):
        for j, p0 in enumerate(p0_values):
            s0 = AtomState(0.0, float(p0), u0, v0, z0)
            prm = SystemParams(omega_r=omega_r, delta=float(d))
            tasks.append((i * len(p0_values) + j, s0, prm, cavity, cfg))
    flat = _run_cells(tasks, threads)
    n = len(p0_values)
    return [flat[i * n:(i + 1) * n] for i in range(len(delta_values))]


def _transition_edges(records):
    """Indices i where cell i and i+1 differ in m or outcome."""
    edges = []
    for i in range(len(records) - 1):
        a, b = records[i], records[i + 1]
        if a.m_minus_1 != b.m_minus_1 or a.outcome != b.outcome:
            edges.append(i)
    return edges


@dataclass
class RefinementReport:
    """Result of one self-similarity zoom."""

    interval: tuple
    records: list
    transitions: list          # delta positions of m/outcome changes
    unresolved_intervals: list  # (lo, hi) sample gaps containing a change
    max_m_minus_1: int


def self_similarity_probe(
    interval,
    n_samples: int,
    s0: AtomState,
    omega_r: float,
    cavity: CavitySpec = CavitySpec(),
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    threads: int = 1,
) -> RefinementReport:
    """Rescan a detuning interval at higher resolution.

    Adjacent samples that differ in m or exit outcome bracket an
    unresolved sub-interval; these are reported for the next zoom.
    """
    lo, hi = (float(interval[0]), float(interval[1]))
    if not lo < hi:
        raise ValueError(f"empty interval {interval}")
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    deltas = np.linspace(lo, hi, n_samples)
    records = exit_time_scan(deltas, s0, omega_r, cavity, cfg, threads)
    edges = _transition_edges(records)
    transitions = [0.5 * (deltas[i] + deltas[i + 1]) for i in edges]
    unresolved = [(float(deltas[i]), float(deltas[i + 1])) for i in edges]
    return RefinementReport(
        interval=(lo, hi), records=records, transitions=transitions,
        unresolved_intervals=unresolved,
        max_m_minus_1=max(r.m_minus_1 for r in records))


@dataclass
class BoxCountFit:
    """Box-counting dimension estimate with fit diagnostics."""

    dimension: float
    stderr: float
    r_squared: float
    epsilons: np.ndarray
    counts: np.ndarray
    degenerate: bool = False

    def confidence_interval(self, n_sigma: float = 2.0):
        return (self.dimension - n_sigma * self.stderr,
                self.dimension + n_sigma * self.stderr)


def box_counting_dimension(
    points,
    n_scales: int = 12,
    eps_max: float = None,
    eps_min: float = None,
) -> BoxCountFit:
    """Box-counting dimension of a one-dimensional point set.

    Counts occupied boxes N(eps) over a geometric ladder of scales and
    fits log N against log(1/eps) by least squares.  The default scale
    range spans from 1/4 of the set extent down to 2x the smallest
    inter-point gap (at least 4 octaves are required).
    """
    points = np.sort(np.asarray(points, dtype=float))
    if len(points) < 100:
        raise ValueError(f"need at least 100 points, got {len(points)}")
    extent = points[-1] - points[0]
    if extent <= 0.0:
        raise ValueError("point set has zero extent")
    if eps_max is None:
        eps_max = extent / 4.0
    if eps_min is None:
        gaps = np.diff(points)
        gaps = gaps[gaps > 0.0]
        eps_min = max(2.0 * gaps.min(), extent * 1e-12) if len(gaps) \
            else extent * 1e-6
    if not 0.0 < eps_min < eps_max:
        raise ValueError(f"invalid scale range ({eps_min}, {eps_max})")
    if math.log2(eps_max / eps_min) < 4.0:
        raise ValueError("scale range must span at least 4 octaves")
    eps = np.geomspace(eps_max, eps_min, n_scales)
    counts = np.array([
        len(np.unique(np.floor((points - points[0]) / e))) for e in eps
    ])
    lx = np.log(1.0 / eps)
    ly = np.log(counts.astype(float))
    coef, cov = np.polyfit(lx, ly, 1, cov=True)
    slope = float(coef[0])
    stderr = float(math.sqrt(cov[0, 0]))
    pred = np.polyval(coef, lx)
    ss_res = float(np.sum((ly - pred) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0.0 else 0.0
    degenerate = ss_tot == 0.0 or not math.isfinite(slope)
    return BoxCountFit(dimension=slope, stderr=stderr, r_squared=r2,
                       epsilons=eps, counts=counts, degenerate=degenerate)


def cantor_set(levels: int = 10) -> np.ndarray:
    """Endpoints of the middle-thirds Cantor construction on [0, 1].

    Calibration target: box-counting dimension log 2 / log 3.
    """
    intervals = [(0.0, 1.0)]
    for _ in range(levels):
        nxt = []
        for a, b in intervals:
            third = (b - a) / 3.0
            nxt.append((a, a + third))
            nxt.append((b - third, b))
        intervals = nxt
    return np.unique(np.array(intervals).ravel())
