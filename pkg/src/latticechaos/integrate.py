"""Adaptive integration of the main and variational flows.

Wraps the jitted Dormand-Prince 8(5,3) kernels in ``_core`` behind typed
result objects.  The two conserved quantities (total energy and Bloch
vector length) are evaluated over the stored samples and reported as
drift bounds; NaN or step-size underflow aborts the run rather than
clamping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import _core
from .dynamics import AtomState, SystemParams, TangentVector

__all__ = [
    "IntegratorConfig",
    "Trajectory",
    "TangentTrace",
    "CrossingSet",
    "IntegrationError",
    "integrate",
    "integrate_with_tangent",
    "find_crossings",
    "DEFAULT_CONFIG",
    "SWEEP_CONFIG",
]

_MAX_STEPS = 500_000_000


class IntegrationError(RuntimeError):
    """Integration aborted (step-size underflow, NaN, or step budget)."""

    def __init__(self, message, tau=None, state=None):
        super().__init__(message)
        self.tau = tau
        self.state = state


@dataclass(frozen=True)
class IntegratorConfig:
    """Error-control settings for the embedded Runge-Kutta pair.

    The default max_step resolves the fastest internal oscillation
    (frequency ~ sqrt(delta^2+4) >= 2) into >= 30 steps, which keeps the
    secular drift of the two integrals far below the error-control
    level on long horizons.
    """

    rel_tol: float = 1e-10
    abs_tol: float = 1e-10
    max_step: float = 0.1
    initial_step: float = 1e-3

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            tol = getattr(self, name)
            if not (0.0 < tol <= 1e-2):
                raise ValueError(f"{name} must lie in (0, 1e-2], got {tol}")
        if self.max_step <= 0.0:
            raise ValueError("max_step must be positive")
        if self.initial_step <= 0.0:
            raise ValueError("initial_step must be positive")


#: tight tolerances for Poincare-section and exit-time-fractal work
DEFAULT_CONFIG = IntegratorConfig()
#: coarser tolerances for parameter sweeps
SWEEP_CONFIG = IntegratorConfig(rel_tol=1e-8, abs_tol=1e-8, max_step=0.5)


def _energy(tau, states, params):
    x, p, u, z = states[:, 0], states[:, 1], states[:, 2], states[:, 4]
    return (0.5 * params.omega_r * p**2 - u * np.cos(x)
            - 0.5 * params.delta * z)


def _bloch(states):
    return states[:, 2] ** 2 + states[:, 3] ** 2 + states[:, 4] ** 2


@dataclass
class Trajectory:
    """Sampled solution of the equations of motion.

    ``states`` has one row (x, p, u, v, z) per sample; drift fields are
    the maxima of |W - W(0)| and |u^2+v^2+z^2 - 1| over the stored
    samples.
    """

    tau: np.ndarray
    states: np.ndarray
    params: SystemParams
    step_count: int
    energy_drift: float = field(init=False)
    bloch_drift: float = field(init=False)

    def __post_init__(self):
        w = _energy(self.tau, self.states, self.params)
        self.energy_drift = float(np.max(np.abs(w - w[0])))
        self.bloch_drift = float(np.max(np.abs(_bloch(self.states) - 1.0)))

    def __len__(self):
        return len(self.tau)

    @property
    def x(self):
        return self.states[:, 0]

    @property
    def p(self):
        return self.states[:, 1]

    @property
    def u(self):
        return self.states[:, 2]

    @property
    def v(self):
        return self.states[:, 3]

    @property
    def z(self):
        return self.states[:, 4]

    def energy(self):
        return _energy(self.tau, self.states, self.params)

    def final_state(self, renormalize: bool = False) -> AtomState:
        return AtomState.from_array(self.states[-1], renormalize=renormalize)


@dataclass
class TangentTrace:
    """Tangent-norm bookkeeping from joint variational propagation."""

    tau: np.ndarray          # renormalization checkpoint times
    log_growth: np.ndarray   # ln of tangent norm growth per interval
    tangent_final: TangentVector

    def finite_time_lambda(self):
        """Running estimate lambda(tau) = cumsum(ln growth)/tau."""
        return np.cumsum(self.log_growth) / self.tau


@dataclass
class CrossingSet:
    """States captured on the lattice-node surface cos x = 1."""

    tau: np.ndarray
    states: np.ndarray
    truncated: bool = False

    def __len__(self):
        return len(self.tau)


def _check_status(status, tau, y):
    if status == _core.OK:
        return
    state = np.asarray(y)
    if status == _core.STEP_UNDERFLOW:
        raise IntegrationError(
            f"step size underflow near tau={tau} (stiffness or NaN); "
            f"last state {state}", tau=tau, state=state)
    raise IntegrationError(
        f"step budget exceeded near tau={tau}", tau=tau, state=state)


def _stride_of(sampling) -> int:
    if sampling == "dense":
        return 1
    stride = int(sampling)
    if stride < 1:
        raise ValueError(f"stride must be >= 1, got {sampling}")
    return stride


def integrate(
    s0: AtomState,
    params: SystemParams,
    tau_end: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    sampling="dense",
) -> Trajectory:
    """Integrate from tau=0 to tau_end, sampling accepted steps.

    ``sampling`` is "dense" (every accepted step) or an integer stride.
    """
    if tau_end <= 0.0:
        raise ValueError(f"tau_end must be positive, got {tau_end}")
    ts, ys, status, nacc = _core._run_record(
        s0.as_array(), params.omega_r, params.delta, 0.0, float(tau_end),
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.initial_step,
        _stride_of(sampling), _MAX_STEPS)
    _check_status(status, ts[-1], ys[-1])
    return Trajectory(tau=ts, states=ys, params=params, step_count=nacc)


def _integrate_span(s0_array, params, tau0, tau1, cfg, stride=1):
    """Internal: direction-agnostic integration on raw arrays.

    Used by property tests (time reversal) and the negative-time
    Lyapunov check; the public ``integrate`` enforces tau_end > 0.
    """
    ts, ys, status, nacc = _core._run_record(
        np.asarray(s0_array, dtype=float), params.omega_r, params.delta,
        float(tau0), float(tau1), cfg.rel_tol, cfg.abs_tol, cfg.max_step,
        cfg.initial_step, stride, _MAX_STEPS)
    _check_status(status, ts[-1], ys[-1])
    return ts, ys, nacc


def integrate_with_tangent(
    s0: AtomState,
    t0: TangentVector,
    params: SystemParams,
    tau_end: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    renorm_interval: float = 5.0,
    sampling="dense",
    _record_crossings: bool = False,
    _max_crossings: int = 200_000,
):
    """Propagate the combined 10-dimensional (state, tangent) system.

    The tangent is rescaled to unit norm at every ``renorm_interval``;
    the returned :class:`TangentTrace` holds the log growth per interval.
    tau_end may be negative (time-reversed propagation).
    """
    tvec = t0.as_array()
    if not np.any(tvec):
        raise ValueError("initial tangent vector must be nonzero")
    if tau_end == 0.0:
        raise ValueError("tau_end must be nonzero")
    if renorm_interval <= 0.0:
        raise ValueError("renorm_interval must be positive")
    y0 = np.concatenate([s0.as_array(), tvec])
    (check_ts, logs, sts, sys_, cts, cys, status, nacc, yfin) = \
        _core._run_tangent(
            y0, params.omega_r, params.delta, 0.0, float(tau_end),
            float(renorm_interval), cfg.rel_tol, cfg.abs_tol, cfg.max_step,
            cfg.initial_step, _stride_of(sampling), _record_crossings,
            _max_crossings, _MAX_STEPS)
    _check_status(status, sts[-1], yfin[:5])
    traj = Trajectory(tau=sts, states=sys_[:, :5], params=params,
                      step_count=nacc)
    trace = TangentTrace(
        tau=check_ts, log_growth=logs,
        tangent_final=TangentVector.from_array(yfin[5:]))
    if _record_crossings:
        return traj, trace, CrossingSet(tau=cts, states=cys)
    return traj, trace


def find_crossings(
    s0: AtomState,
    params: SystemParams,
    tau_end: float,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    direction: str = "any",
    max_crossings: int = 1_000_000,
) -> CrossingSet:
    """Times and states where the trajectory crosses x = 0 (mod 2pi).

    Crossings are localized on the step interpolant so that
    |x mod 2pi| <= 1e-10 at each reported tau.  ``direction`` selects
    the sign of the momentum at the crossing: "any", "up" or "down".
    """
    dir_code = {"any": 0, "up": 1, "down": -1}.get(direction)
    if dir_code is None:
        raise ValueError(f"direction must be any|up|down, got {direction!r}")
    if tau_end <= 0.0:
        raise ValueError(f"tau_end must be positive, got {tau_end}")
    cts, cys, status, nacc, tfin, yfin = _core._run_crossings(
        s0.as_array(), params.omega_r, params.delta, 0.0, float(tau_end),
        cfg.rel_tol, cfg.abs_tol, cfg.max_step, cfg.initial_step,
        dir_code, max_crossings, _MAX_STEPS)
    _check_status(status, tfin, yfin)
    return CrossingSet(tau=cts, states=cys,
                       truncated=len(cts) >= max_crossings)


def warm_up():
    """Trigger JIT compilation of all kernels on tiny problems."""
    from .dynamics import AtomState, SystemParams
    s = AtomState(0.0, 10.0, 0.0, 0.0, 1.0)
    prm = SystemParams(omega_r=1e-5, delta=-0.05)
    cfg = IntegratorConfig(rel_tol=1e-6, abs_tol=1e-6)
    integrate(s, prm, 1.0, cfg)
    integrate_with_tangent(s, TangentVector(1, 0, 0, 0, 0), prm, 1.0, cfg,
                           renorm_interval=0.5)
    find_crossings(s, prm, 1.0, cfg)
    _core._run_exit(s.as_array(), prm.omega_r, prm.delta, 2 * math.pi,
                    1.0, 1e-6, 1e-6, math.inf, 1e-3, _MAX_STEPS)
