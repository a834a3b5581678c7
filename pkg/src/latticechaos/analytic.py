"""Closed-form and limit-case solutions.

These serve both as standalone predictions and as independent oracles
for the numerical integrator: the exact pendulum solutions at zero
detuning (Jacobi elliptic functions), the inversion dynamics driven by
the translational motion, the far-detuned and fast-atom limits, the
Doppler-Rabi resonance, the pi-periodic effective potential and the
stochastic layer width estimate.

Validity preconditions of the limit formulas raise ``ValidityWarning``
(advisory, the value is still computed) so validity regions can be
mapped systematically.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .dynamics import AtomState, SystemParams
from .elliptic import jacobi_am, jacobi_sn_cn_dn

__all__ = [
    "ValidityWarning",
    "ResonantOrbit",
    "DopplerFrame",
    "critical_momentum",
    "resonant_position_momentum",
    "resonant_inversion",
    "raman_nath_inversion",
    "limit_inversion",
    "driven_dipole",
    "effective_potential",
    "doppler_rabi_inversion",
    "stochastic_layer_width",
]


class ValidityWarning(UserWarning):
    """A limit formula was evaluated outside its validity regime."""


def _advise(condition: bool, message: str):
    if not condition:
        warnings.warn(message, ValidityWarning, stacklevel=3)


def critical_momentum(u0: float, omega_r: float) -> float:
    """Trapping threshold p_cr = 2 sqrt(u0/omega_r) at exact resonance."""
    if omega_r <= 0.0:
        raise ValueError("omega_r must be positive")
    if u0 <= 0.0:
        raise ValueError(
            f"no trapping threshold for u0 = {u0} <= 0 (potential is flat "
            "or inverted); motion is unbounded for any momentum")
    return 2.0 * math.sqrt(u0 / omega_r)


@dataclass(frozen=True)
class ResonantOrbit:
    """Exact-resonance orbit determined by (p0, u0, omega_r).

    The elliptic modulus K = (p0/2) sqrt(omega_r/u0) separates trapped
    (K < 1), separatrix (K = 1) and ballistic (K > 1) motion.
    """

    p0: float
    u0: float
    omega_r: float

    def __post_init__(self):
        if self.u0 <= 0.0:
            raise ValueError("ResonantOrbit requires u0 > 0; for u0 <= 0 "
                             "the motion is uniform")
        if self.omega_r <= 0.0:
            raise ValueError("omega_r must be positive")

    @property
    def modulus(self) -> float:
        return 0.5 * abs(self.p0) * math.sqrt(self.omega_r / self.u0)

    @property
    def regime(self) -> str:
        k = self.modulus
        # the separatrix band absorbs float roundoff in the modulus
        # (p0 = critical_momentum computed in a different order lands
        # within a few ulp of 1)
        if abs(k - 1.0) <= 8.0 * np.finfo(float).eps:
            return "separatrix"
        return "trapped" if k < 1.0 else "ballistic"

    @property
    def critical_momentum(self) -> float:
        return critical_momentum(self.u0, self.omega_r)


def resonant_position_momentum(tau, p0: float, u0: float, omega_r: float):
    """Exact (x, p) at zero detuning for x0 = 0, dx/dtau(0) = omega_r p0.

    Trapped branch (K <= 1): x = 2 arcsin(K sn), p = p0 cn; ballistic
    branch (K >= 1): x = 2 am(.., 1/K), p = p0 dn(.., 1/K).
    """
    orbit = ResonantOrbit(p0=p0, u0=u0, omega_r=omega_r)
    k = orbit.modulus
    tau = np.asarray(tau, dtype=float)
    if k <= 1.0:
        arg = math.sqrt(omega_r * u0) * tau
        sn, cn, _ = jacobi_sn_cn_dn(arg, k)
        x = 2.0 * np.arcsin(np.clip(k * sn, -1.0, 1.0))
        p = p0 * cn
    else:
        arg = 0.5 * omega_r * p0 * tau
        x = 2.0 * jacobi_am(arg, 1.0 / k)
        _, _, dn = jacobi_sn_cn_dn(arg, 1.0 / k)
        p = p0 * dn
    return x, p


def _resonant_cos_x(tau, orbit: ResonantOrbit):
    """cos x(tau) on the exact resonant orbit (both branches: 1 - 2 K^2 sn^2
    with the appropriate modulus)."""
    k = orbit.modulus
    if k <= 1.0:
        arg = math.sqrt(orbit.omega_r * orbit.u0) * np.asarray(tau, float)
        sn, _, _ = jacobi_sn_cn_dn(arg, k)
        return 1.0 - 2.0 * (k * sn) ** 2
    arg = 0.5 * orbit.omega_r * orbit.p0 * np.asarray(tau, float)
    sn, _, _ = jacobi_sn_cn_dn(arg, 1.0 / k)
    return 1.0 - 2.0 * sn**2


def _cos_x_phase_integral(tau, orbit: ResonantOrbit, rel_tol=1e-13):
    """Phi(tau) = integral_0^tau cos x dtau' by adaptive integration."""
    tau = np.atleast_1d(np.asarray(tau, dtype=float))
    if np.any(tau < 0.0):
        raise ValueError("tau must be non-negative")
    t_end = float(tau.max()) if len(tau) else 0.0
    if t_end == 0.0:
        return np.zeros_like(tau)
    sol = solve_ivp(
        lambda t, _y: [_resonant_cos_x(t, orbit)],
        (0.0, t_end), [0.0], method="DOP853",
        rtol=rel_tol, atol=1e-12, dense_output=True)
    if not sol.success:
        raise RuntimeError(f"phase-integral quadrature failed: {sol.message}")
    return sol.sol(tau)[0]


def resonant_inversion(tau, orbit: ResonantOrbit, z0: float, v0: float):
    """Exact inversion z(tau) at zero detuning.

    z = A sin(2 Phi(tau) + psi0) with A = sqrt(1 - u0^2) and Phi the
    phase integral of cos x over the exact orbit.  The integration
    constant is fixed by z(0) = z0 and dz/dtau(0) = -2 v0 cos x0, which
    resolves the sign convention: psi0 = atan2(z0, -v0).
    """
    u0 = orbit.u0
    if abs(u0) > 1.0:
        raise ValueError("u0 must lie in [-1, 1]")
    amp2 = 1.0 - u0 * u0
    if z0 * z0 + v0 * v0 > amp2 + 1e-12:
        raise ValueError("initial (u0, v0, z0) violates the Bloch constraint")
    tau_arr = np.asarray(tau, dtype=float)
    if amp2 <= 0.0:
        # |u0| = 1 pins the Bloch vector to the equatorial u-axis
        return np.zeros_like(tau_arr)
    amp = math.sqrt(amp2)
    psi0 = math.atan2(z0, -v0)
    phi = _cos_x_phase_integral(tau_arr, orbit)
    z = amp * np.sin(2.0 * phi + psi0)
    return float(z[0]) if np.ndim(tau) == 0 else z


def raman_nath_inversion(tau, z0: float, v0: float, p0: float,
                         omega_r: float):
    """Fast-atom inversion in the Raman-Nath regime (p ~ p0).

    z ~ z0 - (2 v0/omega_r p0) sin(omega_r p0 tau)
          - (4 z0/(omega_r p0)^2) sin^2(omega_r p0 tau).
    """
    wp = omega_r * p0
    _advise(abs(wp) > 2.0,
            f"|omega_r p0| = {abs(wp):.3g} does not satisfy >> 2; the "
            "Raman-Nath expansion is outside its validity regime")
    tau = np.asarray(tau, dtype=float)
    s = np.sin(wp * tau)
    return z0 - (2.0 * v0 / wp) * s - (4.0 * z0 / wp**2) * s**2


def _phi0(u0: float, v0: float) -> float:
    return math.asin(u0 / math.hypot(u0, v0))


def limit_inversion(tau, s0: AtomState, params: SystemParams,
                    branch: str, x=None):
    """Approximate inversion in the two regular limits.

    branch "far-detuned": |Delta| >> max(|omega_r p|, 2);
    branch "fast-atom":   |omega_r p0| >> max(|Delta|, 2), omega_r p0^2 >> 4.
    ``x`` optionally supplies position values (defaults to the
    Raman-Nath straight line x0 + omega_r p0 tau used by the fast
    branch's derivation).
    """
    if branch not in ("far-detuned", "fast-atom"):
        raise ValueError(f"branch must be 'far-detuned' or 'fast-atom', "
                         f"got {branch!r}")
    tau = np.asarray(tau, dtype=float)
    d = params.delta
    wp = params.omega_r * s0.p
    amp = math.hypot(s0.u, s0.v)
    if amp == 0.0:
        # no dipole excitation: the oscillation amplitude vanishes
        return np.full_like(tau, s0.z)
    phi0 = _phi0(s0.u, s0.v)
    if x is None:
        x = s0.x + wp * tau
    x = np.asarray(x, dtype=float)
    if branch == "far-detuned":
        _advise(abs(d) > max(abs(wp), 2.0),
                f"|Delta| = {abs(d):.3g} does not dominate "
                f"max(|omega_r p| = {abs(wp):.3g}, 2)")
        return (s0.z + 2.0 * s0.u / d
                - (2.0 * amp / d) * np.cos(x) * np.sin(d * tau + phi0))
    _advise(abs(wp) > max(abs(d), 2.0) and params.omega_r * s0.p**2 > 4.0,
            f"|omega_r p0| = {abs(wp):.3g} does not dominate "
            f"max(|Delta| = {abs(d):.3g}, 2) with omega_r p0^2 >> 4")
    return s0.z + (2.0 * amp / wp) * np.cos(d * tau + phi0) * np.sin(wp * tau)


def driven_dipole(tau, s0: AtomState, params: SystemParams, x_of_tau=None,
                  form: str = "quadrature"):
    """Dipole quadrature u(tau) in the frozen-inversion approximation.

    Valid when z stays close to z0 (excursion small against |z0|).  The
    "quadrature" form is the exact driven-oscillator solution with
    forcing 2 z0 Delta cos x(tau); the "far-detuned" form is its
    |Delta| >> |omega_r p| approximation
    u ~ (2 z0/Delta) cos x + sqrt(u0^2+v0^2) sin(Delta tau + phi0).
    """
    d = params.delta
    if d == 0.0:
        raise ValueError("delta = 0 is the resonant branch where u = u0 "
                         "exactly; the driven-oscillator form does not apply")
    _advise(abs(s0.z) > 0.1,
            f"z0 = {s0.z:.3g} is close to 0; the frozen-inversion "
            "approximation assumes z ~ z0 != 0")
    tau = np.asarray(tau, dtype=float)
    if x_of_tau is None:
        def x_of_tau(t):  # Raman-Nath straight line
            return s0.x + params.omega_r * s0.p * np.asarray(t)
    if form == "far-detuned":
        wp = params.omega_r * s0.p
        _advise(abs(d) > abs(wp),
                f"|Delta| = {abs(d):.3g} does not dominate "
                f"|omega_r p| = {abs(wp):.3g}")
        amp = math.hypot(s0.u, s0.v)
        phase = d * tau + (_phi0(s0.u, s0.v) if amp else 0.0)
        return (2.0 * s0.z / d) * np.cos(x_of_tau(tau)) + amp * np.sin(phase)
    if form != "quadrature":
        raise ValueError(f"form must be 'quadrature' or 'far-detuned', "
                         f"got {form!r}")
    tau_flat = np.atleast_1d(tau)
    t_end = float(tau_flat.max()) if len(tau_flat) else 0.0
    if t_end == 0.0:
        ic = np.zeros_like(tau)
        is_ = np.zeros_like(tau)
    else:
        sol = solve_ivp(
            lambda t, _y: [math.cos(d * t) * math.cos(float(x_of_tau(t))),
                           math.sin(d * t) * math.cos(float(x_of_tau(t)))],
            (0.0, t_end), [0.0, 0.0], method="DOP853",
            rtol=1e-12, atol=1e-12, dense_output=True)
        if not sol.success:
            raise RuntimeError(f"driven-dipole quadrature failed: "
                               f"{sol.message}")
        ic, is_ = sol.sol(tau)
    return (2.0 * s0.z * (np.sin(d * tau) * ic - np.cos(d * tau) * is_)
            + s0.u * np.cos(d * tau) + s0.v * np.sin(d * tau))


def effective_potential(x, z0: float, delta: float):
    """Far-detuned effective potential -(2 z0/Delta) cos^2 x (period pi).

    The additive constant is fixed to 0 at x = pi/2.
    """
    if delta == 0.0:
        raise ValueError("delta = 0: the resonant potential is -u0 cos x "
                         "with period 2 pi, not the pi-periodic form")
    return -(2.0 * z0 / delta) * np.cos(np.asarray(x, dtype=float)) ** 2


@dataclass(frozen=True)
class DopplerFrame:
    """Detunings seen from the atom's rest frame.

    delta1/delta2 are the detunings from the co-/counter-propagating
    running waves; omega_z is the generalized Rabi frequency of the
    one-wave reduction for the selected (closer-to-resonance) wave.
    """

    delta1: float
    delta2: float

    @classmethod
    def from_params(cls, params: SystemParams, p0: float) -> "DopplerFrame":
        wp = params.omega_r * p0
        return cls(delta1=params.delta - wp, delta2=params.delta + wp)

    @property
    def selected_detuning(self) -> float:
        """The running-wave detuning closer to resonance."""
        return self.delta1 if abs(self.delta1) <= abs(self.delta2) \
            else self.delta2

    @property
    def omega_z(self) -> float:
        d = self.selected_detuning
        return math.sqrt(d * d + 1.0)


def doppler_rabi_inversion(tau, s0: AtomState, frame: DopplerFrame):
    """Inversion from the one-running-wave (Bloch-like) reduction.

    z = (u0 D/wz^2)(1 - cos wz tau) - (v0/wz) sin wz tau
        + z0 (D^2/wz^2 + cos(wz tau)/wz^2),  wz = sqrt(D^2 + 1),
    with D the selected running-wave detuning.  Valid for |Delta| >> 1
    and fast atoms (Raman-Nath regime p ~ p0).
    """
    d1 = frame.selected_detuning
    wz = frame.omega_z
    _advise(max(abs(frame.delta1), abs(frame.delta2)) > 1.0,
            "one-wave reduction assumes |Delta| >> 1 so the other "
            "running wave can be neglected")
    tau = np.asarray(tau, dtype=float)
    c = np.cos(wz * tau)
    s = np.sin(wz * tau)
    wz2 = wz * wz
    return (s0.u * d1 / wz2 * (1.0 - c) - s0.v / wz * s
            + s0.z * (d1 * d1 / wz2 + c / wz2))


def stochastic_layer_width(params: SystemParams) -> float:
    """Width of the stochastic layer around the unperturbed separatrix.

    D = 8 pi (wz'/w0)^3 exp(-pi wz' / (2 w0)) with wz' = sqrt(Delta^2+4)
    and w0 = sqrt(2 omega_r |Delta|)/wz', normalized to the pendulum
    separatrix energy w0^2.  An order-of-magnitude estimate, valid for
    wz'/w0 >> 1.
    """
    if params.delta == 0.0:
        raise ValueError("delta = 0: the separatrix frequency w0 vanishes "
                         "and the layer-width estimate is undefined")
    wz = math.sqrt(params.delta**2 + 4.0)
    w0 = math.sqrt(2.0 * params.omega_r * abs(params.delta)) / wz
    ratio = wz / w0
    _advise(ratio > 1.0, f"wz'/w0 = {ratio:.3g} does not satisfy >> 1")
    return 8.0 * math.pi * ratio**3 * math.exp(-0.5 * math.pi * ratio)
