"""Closed-form solutions against the integrator and each other."""

import math
import warnings

import numpy as np
import pytest

from latticechaos.analytic import (
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
from latticechaos.dynamics import AtomState, SystemParams
from latticechaos.integrate import DEFAULT_CONFIG, integrate

WR = 1e-5


def test_critical_momentum_value():
    # p_cr = 2 sqrt(u0/omega_r)
    assert abs(critical_momentum(1.0, WR) - 632.4555320336759) < 1e-9
    with pytest.raises(ValueError):
        critical_momentum(0.0, WR)
    with pytest.raises(ValueError):
        critical_momentum(1.0, 0.0)


def test_orbit_regimes():
    assert ResonantOrbit(200.0, 1.0, WR).regime == "trapped"
    assert ResonantOrbit(5000.0, 1.0, WR).regime == "ballistic"
    pcr = critical_momentum(1.0, WR)
    assert ResonantOrbit(pcr, 1.0, WR).regime == "separatrix"
    assert abs(ResonantOrbit(200.0, 1.0, WR).modulus
               - 0.31622776601683794) < 1e-15


def test_trapped_branch_against_integrator():
    prm = SystemParams(omega_r=WR, delta=0.0)
    s0 = AtomState(0.0, 200.0, 1.0, 0.0, 0.0)
    tr = integrate(s0, prm, 3000.0, DEFAULT_CONFIG, sampling=10)
    x, p = resonant_position_momentum(tr.tau, 200.0, 1.0, WR)
    assert np.max(np.abs(tr.x - x)) < 1e-9
    assert np.max(np.abs(tr.p - p)) / 200.0 < 1e-9


def test_trapped_amplitude_is_2_arcsin_k():
    k = ResonantOrbit(200.0, 1.0, WR).modulus
    tau = np.linspace(0.0, 2e4, 20001)
    x, _ = resonant_position_momentum(tau, 200.0, 1.0, WR)
    assert abs(np.max(np.abs(x)) - 2.0 * math.asin(k)) < 1e-6


def test_ballistic_branch_against_integrator():
    prm = SystemParams(omega_r=WR, delta=0.0)
    s0 = AtomState(0.0, 5000.0, 1.0, 0.0, 0.0)
    tr = integrate(s0, prm, 3000.0, DEFAULT_CONFIG, sampling=10)
    x, p = resonant_position_momentum(tr.tau, 5000.0, 1.0, WR)
    assert np.max(np.abs(tr.x - x)) < 1e-9
    assert np.max(np.abs(tr.p - p)) / 5000.0 < 1e-10


def test_resonant_inversion_against_integrator():
    u0 = z0 = math.sqrt(0.5)
    prm = SystemParams(omega_r=WR, delta=0.0)
    s0 = AtomState(0.0, 200.0, u0, 0.0, z0)
    tr = integrate(s0, prm, 2000.0, DEFAULT_CONFIG, sampling=10)
    orbit = ResonantOrbit(200.0, u0, WR)
    z = resonant_inversion(tr.tau, orbit, z0, 0.0)
    assert np.max(np.abs(tr.z - z)) < 1e-6
    # u is an integral of motion at exact resonance
    assert np.max(np.abs(tr.u - u0)) < 1e-10


def test_resonant_inversion_initial_slope():
    # the sign convention must reproduce dz/dtau(0) = -2 v0 cos x0
    u0 = 0.6
    v0 = 0.5
    z0 = math.sqrt(1 - u0**2 - v0**2)
    orbit = ResonantOrbit(300.0, u0, WR)
    tau = np.array([0.0, 1e-6, 2e-6])
    z = resonant_inversion(tau, orbit, z0, v0)
    slope = (z[1] - z[0]) / 1e-6
    assert abs(z[0] - z0) < 1e-12
    assert abs(slope + 2.0 * v0) < 1e-4  # cos x0 = 1


def test_raman_nath_regime():
    prm = SystemParams(omega_r=WR, delta=0.0)
    s0 = AtomState(0.0, 1.0e6, 0.0, 0.5, math.sqrt(0.75))
    tr = integrate(s0, prm, 30.0, DEFAULT_CONFIG)
    z = raman_nath_inversion(tr.tau, s0.z, s0.v, s0.p, WR)
    # leading-order formula, intrinsic O(1/(wr p0)) accuracy
    assert np.max(np.abs(tr.z - z)) < 0.05


def test_raman_nath_warns_outside_regime():
    with pytest.warns(ValidityWarning):
        raman_nath_inversion(1.0, 0.0, 0.5, 200.0, WR)


def test_far_detuned_limit_converges():
    s0 = AtomState(0.0, 100.0, 0.3, 0.4, math.sqrt(0.75))
    errs = []
    for d in (50.0, 200.0):
        prm = SystemParams(omega_r=WR, delta=d)
        tr = integrate(s0, prm, 5.0, DEFAULT_CONFIG)
        z = limit_inversion(tr.tau, s0, prm, "far-detuned", x=tr.x)
        errs.append(np.max(np.abs(tr.z - z)))
    assert errs[1] < errs[0] / 4.0  # error shrinks faster than 1/Delta


def test_fast_atom_limit_converges():
    prm = SystemParams(omega_r=WR, delta=3.0)
    errs = []
    for p0 in (1.0e6, 4.0e6):
        s0 = AtomState(0.0, p0, 0.0, 0.5, math.sqrt(0.75))
        tr = integrate(s0, prm, 30.0, DEFAULT_CONFIG)
        z = limit_inversion(tr.tau, s0, prm, "fast-atom")
        errs.append(np.max(np.abs(tr.z - z)))
    assert errs[1] < errs[0] / 2.0


def test_limit_inversion_rejects_unknown_branch():
    s0 = AtomState(0.0, 100.0, 0.0, 0.0, 1.0)
    prm = SystemParams(omega_r=WR, delta=1.0)
    with pytest.raises(ValueError, match="branch"):
        limit_inversion(1.0, s0, prm, "nope")


def test_driven_dipole_quadrature():
    # frozen-inversion driven oscillator; valid when z barely moves
    prm = SystemParams(omega_r=WR, delta=40.0)
    s0 = AtomState(0.0, 500.0, 0.05, 0.0, math.sqrt(1 - 0.0025))
    tr = integrate(s0, prm, 50.0, DEFAULT_CONFIG)
    u = driven_dipole(tr.tau, s0, prm)
    assert np.max(np.abs(tr.z - s0.z)) < 1e-3  # precondition holds
    assert np.max(np.abs(tr.u - u)) < 1e-3


def test_driven_dipole_far_detuned_form():
    # the form is exact to O(1/Delta) along adiabatically prepared
    # states (u0 = 2 z0 / Delta); check the bound and the 1/Delta
    # convergence along that family rather than a fixed tolerance
    errs = []
    for delta in (40.0, 160.0):
        prm = SystemParams(omega_r=WR, delta=delta)
        u0 = 2.0 / delta
        s0 = AtomState(0.0, 500.0, u0, 0.0, math.sqrt(1.0 - u0 * u0))
        tr = integrate(s0, prm, 50.0, DEFAULT_CONFIG)
        u = driven_dipole(tr.tau, s0, prm, form="far-detuned")
        err = np.max(np.abs(tr.u - u))
        assert err < 3.0 / delta
        errs.append(err)
    assert errs[1] < errs[0] / 2.0
    with pytest.raises(ValueError):
        driven_dipole(1.0, s0, SystemParams(omega_r=WR, delta=0.0))


def test_effective_potential_pi_periodic():
    x = np.linspace(-4.0, 4.0, 101)
    U = effective_potential(x, 1.0, 10.0)
    U_shift = effective_potential(x + math.pi, 1.0, 10.0)
    assert np.max(np.abs(U - U_shift)) < 1e-14
    assert abs(effective_potential(0.0, 1.0, 10.0) + 0.2) < 1e-15
    with pytest.raises(ValueError):
        effective_potential(0.0, 1.0, 0.0)


def test_doppler_frame_selection():
    prm = SystemParams(omega_r=WR, delta=-4.0)
    fr = DopplerFrame.from_params(prm, 4.0e5)
    assert fr.delta1 == -8.0
    assert fr.delta2 == 0.0
    assert fr.selected_detuning == 0.0
    assert fr.omega_z == 1.0


def test_doppler_rabi_against_integrator():
    prm = SystemParams(omega_r=WR, delta=30.0)
    s0 = AtomState(0.0, 1.0e6, 0.0, 0.0, 1.0)
    fr = DopplerFrame.from_params(prm, s0.p)
    tr = integrate(s0, prm, 20.0, DEFAULT_CONFIG)
    z = doppler_rabi_inversion(tr.tau, s0, fr)
    assert np.max(np.abs(tr.z - z)) < 0.01


def test_doppler_rabi_full_flopping_at_resonance():
    # delta1 = 0: complete population transfer at unit frequency
    prm = SystemParams(omega_r=WR, delta=10.0)
    s0 = AtomState(0.0, 1.0e6, 0.0, 0.0, 1.0)
    fr = DopplerFrame.from_params(prm, s0.p)
    assert fr.selected_detuning == 0.0
    tr = integrate(s0, prm, 30.0, DEFAULT_CONFIG)
    assert tr.z.min() < -0.99


def test_stochastic_layer_width():
    with pytest.raises(ValueError):
        stochastic_layer_width(SystemParams(omega_r=WR, delta=0.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        d1 = stochastic_layer_width(SystemParams(omega_r=1e-3, delta=-0.05))
        d2 = stochastic_layer_width(SystemParams(omega_r=1e-4, delta=-0.05))
    assert d1 > d2 >= 0.0  # layer thins as the separatrix slows
