"""Numerical laboratory for a two-level atom in a standing-wave lattice.

The package integrates the coupled center-of-mass / internal-state
equations of motion, measures chaos through Lyapunov exponents,
provides the closed-form limit solutions as oracles, constructs
Poincare sections on the lattice-node surface, and runs the exit-time
chaotic-scattering experiment with box-counting dimension estimation.
"""

from .analytic import (
    DopplerFrame,
    ResonantOrbit,
    ValidityWarning,
    critical_momentum,
    doppler_rabi_inversion,
    driven_dipole,
    effective_potential,
    limit_inversion,
    raman_nath_inversion,
    resonant_inversion,
    resonant_position_momentum,
    stochastic_layer_width,
)
from .dynamics import (
    AtomState,
    BlochConstraintError,
    PhysicalParams,
    SystemParams,
    TangentVector,
    bloch_norm,
    derivatives,
    momentum_to_velocity,
    normalize_physical,
    potential_energy,
    rabi_frequency_for_recoil,
    total_energy,
    variational_derivatives,
)
from .elliptic import agm, complete_elliptic_k, jacobi_am, jacobi_sn_cn_dn
from .integrate import (
    DEFAULT_CONFIG,
    SWEEP_CONFIG,
    CrossingSet,
    IntegrationError,
    IntegratorConfig,
    TangentTrace,
    Trajectory,
    find_crossings,
    integrate,
    integrate_with_tangent,
    warm_up,
)
from .lyapunov import (
    LyapunovEstimate,
    lyapunov_bloch_map,
    lyapunov_parameter_map,
    max_lyapunov,
    shell_momentum,
    two_trajectory_lyapunov,
)
from .poincare import (
    EnergyShell,
    SectionPoint,
    StickingWindow,
    fibonacci_sphere,
    poincare_map,
    project,
    radial_dispersion,
    shell_initial_conditions,
    sticking_detector,
)
from .scattering import (
    BoxCountFit,
    CavitySpec,
    ExitRecord,
    box_counting_dimension,
    cantor_set,
    exit_time,
    exit_time_scan,
    exit_time_surface,
    self_similarity_probe,
)

__version__ = "0.1.0"
