"""State space, control parameters and equations of motion.

The model is a two-level atom moving along a standing laser wave.  The
dynamical state is the 5-vector (x, p, u, v, z): center-of-mass position
(units of the inverse wave number) and momentum (units of the photon
momentum), the two dipole quadratures and the population inversion.
Time is dimensionless throughout, tau = Omega * t with Omega the Rabi
frequency; physical-unit conversions live exclusively in
``normalize_physical`` and the velocity helpers.

The flow conserves the total energy W = (omega_r/2) p^2 - u cos x -
(delta/2) z and the Bloch vector length u^2 + v^2 + z^2 = 1.  Both are
used downstream as a-posteriori integration error measures.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import constants

__all__ = [
    "AtomState",
    "SystemParams",
    "PhysicalParams",
    "TangentVector",
    "BlochConstraintError",
    "derivatives",
    "variational_derivatives",
    "total_energy",
    "potential_energy",
    "bloch_norm",
    "normalize_physical",
    "rabi_frequency_for_recoil",
    "momentum_to_velocity",
]

#: Tolerance on |u^2+v^2+z^2 - 1| at state construction.
BLOCH_TOL = 1e-10

#: omega_r above this is outside the physical regime; a warning is issued.
RECOIL_WARN_LEVEL = 0.1


class BlochConstraintError(ValueError):
    """Raised when (u, v, z) is not on the unit Bloch sphere."""


@dataclass(frozen=True)
class SystemParams:
    """Dimensionless control parameters.

    omega_r is the normalized recoil frequency hbar k_f^2 / (m_a Omega)
    and delta the normalized atom-field detuning (omega_f - omega_a)/Omega.
    """

    omega_r: float
    delta: float

    def __post_init__(self):
        if not (math.isfinite(self.omega_r) and math.isfinite(self.delta)):
            raise ValueError("parameters must be finite")
        if self.omega_r <= 0.0:
            raise ValueError(f"omega_r must be positive, got {self.omega_r}")
        if self.omega_r > RECOIL_WARN_LEVEL:
            warnings.warn(
                f"omega_r={self.omega_r} is far outside the physical regime "
                "omega_r << 1",
                stacklevel=2,
            )


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame parameters, SI units."""

    wavelength: float      # m
    atomic_mass: float     # kg
    rabi_frequency: float  # rad/s
    detuning: float        # rad/s, any sign

    def __post_init__(self):
        for name in ("wavelength", "atomic_mass", "rabi_frequency"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0.0):
                raise ValueError(f"{name} must be positive, got {value}")
        if not math.isfinite(self.detuning):
            raise ValueError("detuning must be finite")

    @property
    def wave_number(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class AtomState:
    """One point of the five-dimensional phase space.

    Construction validates that (u, v, z) lies on the unit Bloch sphere
    to within ``BLOCH_TOL``.  States are never silently renormalized;
    use :meth:`renormalized` explicitly after long integrations.

    x is stored unwrapped (not mod 2pi) so that wandering distance is
    directly observable.
    """

    x: float
    p: float
    u: float
    v: float
    z: float

    def __post_init__(self):
        for name in ("x", "p", "u", "v", "z"):
            object.__setattr__(self, name, float(getattr(self, name)))
        vals = (self.x, self.p, self.u, self.v, self.z)
        if not all(math.isfinite(f) for f in vals):
            raise ValueError(f"state fields must be finite, got {vals}")
        r = self.u**2 + self.v**2 + self.z**2
        if abs(r - 1.0) > BLOCH_TOL:
            raise BlochConstraintError(
                f"u^2+v^2+z^2 = {r!r} is off the Bloch sphere by more than "
                f"{BLOCH_TOL}"
            )

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.p, self.u, self.v, self.z])

    @classmethod
    def from_array(cls, y, renormalize: bool = False) -> "AtomState":
        x, p, u, v, z = (float(c) for c in y)
        if renormalize:
            r = math.sqrt(u * u + v * v + z * z)
            u, v, z = u / r, v / r, z / r
        return cls(x, p, u, v, z)

    def renormalized(self) -> "AtomState":
        """Project (u, v, z) back onto the unit sphere."""
        return AtomState.from_array(self.as_array(), renormalize=True)


@dataclass(frozen=True)
class TangentVector:
    """Perturbation delta-state used for Lyapunov propagation."""

    dx: float
    dp: float
    du: float
    dv: float
    dz: float

    def __post_init__(self):
        for name in ("dx", "dp", "du", "dv", "dz"):
            object.__setattr__(self, name, float(getattr(self, name)))
        vals = (self.dx, self.dp, self.du, self.dv, self.dz)
        if not all(math.isfinite(f) for f in vals):
            raise ValueError("tangent components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.dx, self.dp, self.du, self.dv, self.dz])

    @classmethod
    def from_array(cls, t) -> "TangentVector":
        return cls(*(float(c) for c in t))

    def norm(self) -> float:
        return float(np.linalg.norm(self.as_array()))


def derivatives(state: AtomState, params: SystemParams) -> np.ndarray:
    """Right-hand side (dx, dp, du, dv, dz)/dtau of the equations of motion."""
    x, p, u, v, z = state.x, state.p, state.u, state.v, state.z
    sx, cx = math.sin(x), math.cos(x)
    d = params.delta
    return np.array([
        params.omega_r * p,
        -u * sx,
        d * v,
        -d * u + 2.0 * z * cx,
        -2.0 * v * cx,
    ])


def variational_derivatives(
    state: AtomState, tangent: TangentVector, params: SystemParams
) -> np.ndarray:
    """Analytic Jacobian of the flow applied to a tangent vector."""
    x, u, v, z = state.x, state.u, state.v, state.z
    dx, dp, du, dv, dz = (
        tangent.dx, tangent.dp, tangent.du, tangent.dv, tangent.dz,
    )
    sx, cx = math.sin(x), math.cos(x)
    d = params.delta
    return np.array([
        params.omega_r * dp,
        -du * sx - u * cx * dx,
        d * dv,
        -d * du + 2.0 * dz * cx - 2.0 * z * sx * dx,
        -2.0 * dv * cx + 2.0 * v * sx * dx,
    ])


def potential_energy(state: AtomState, params: SystemParams) -> float:
    """U = -u cos x - (delta/2) z."""
    return -state.u * math.cos(state.x) - 0.5 * params.delta * state.z


def total_energy(state: AtomState, params: SystemParams) -> float:
    """W = (omega_r/2) p^2 + U; conserved along the exact flow."""
    return 0.5 * params.omega_r * state.p**2 + potential_energy(state, params)


def bloch_norm(state: AtomState) -> float:
    """u^2 + v^2 + z^2; equals 1 along the exact flow."""
    return state.u**2 + state.v**2 + state.z**2


def normalize_physical(phys: PhysicalParams) -> SystemParams:
    """Convert laboratory parameters to the dimensionless control pair."""
    k = phys.wave_number
    omega_r = constants.hbar * k * k / (phys.atomic_mass * phys.rabi_frequency)
    delta = phys.detuning / phys.rabi_frequency
    return SystemParams(omega_r=omega_r, delta=delta)


def rabi_frequency_for_recoil(
    wavelength: float, atomic_mass: float, omega_r: float
) -> float:
    """Rabi frequency (rad/s) that yields a given normalized recoil frequency."""
    if omega_r <= 0.0:
        raise ValueError("omega_r must be positive")
    k = 2.0 * math.pi / wavelength
    return constants.hbar * k * k / (atomic_mass * omega_r)


def momentum_to_velocity(p, wavelength: float, atomic_mass: float):
    """Atomic velocity (m/s) for dimensionless momentum p: v = p hbar k / m."""
    k = 2.0 * math.pi / wavelength
    return np.asarray(p) * constants.hbar * k / atomic_mass
