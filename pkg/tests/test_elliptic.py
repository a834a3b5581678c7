"""Jacobi elliptic functions against frozen high-precision oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from latticechaos.elliptic import (
    agm,
    complete_elliptic_k,
    jacobi_am,
    jacobi_sn_cn_dn,
)

# frozen oracle values (mpmath, 30 digits): (u, k, sn, cn, dn)
SNCNDN_ORACLE = [
    (0.3, 0.5,
     0.294465551549556245, 0.955662094545250672, 0.989101870252833921),
    (1.7, 0.31622776601683794,
     0.996551170886419136, -0.0829805025587760879, 0.949046140280065993),
    (5.0, 0.9,
     -0.415044370373810025, -0.909801170927476663, 0.927614099829781674),
    (-2.4, 0.99,
     -0.987864722372745804, 0.155316741825914745, 0.208670162732046192),
    (12.0, 0.7,
     -0.765421692583920845, -0.643529045593099685, 0.844347985096052224),
    (0.05, 0.999,
     0.0499584165205582141, 0.998751298681888281, 0.998753796393123863),
]

K08_ORACLE = 1.9953027776647293877  # mpmath ellipk(0.8^2)


@pytest.mark.parametrize("u,k,sn_o,cn_o,dn_o", SNCNDN_ORACLE)
def test_sn_cn_dn_against_frozen_oracle(u, k, sn_o, cn_o, dn_o):
    sn, cn, dn = jacobi_sn_cn_dn(u, k)
    assert abs(sn - sn_o) < 1e-12
    assert abs(cn - cn_o) < 1e-12
    assert abs(dn - dn_o) < 1e-12


def test_complete_k_against_frozen_oracle():
    assert abs(complete_elliptic_k(0.8) - K08_ORACLE) < 1e-13


def test_complete_k_against_quadrature_oracle():
    # independent definition: K(k) = int_0^{pi/2} dt / sqrt(1 - k^2 sin^2 t)
    k = 0.8
    val, err = quad(lambda t: 1.0 / math.sqrt(1.0 - (k * math.sin(t)) ** 2),
                    0.0, math.pi / 2.0, epsabs=1e-14, epsrel=1e-14)
    assert err < 1e-12
    assert abs(complete_elliptic_k(k) - val) < 1e-12


def test_degenerate_limits_k0():
    u = np.linspace(-3.0, 3.0, 31)
    sn, cn, dn = jacobi_sn_cn_dn(u, 0.0)
    assert np.max(np.abs(sn - np.sin(u))) < 1e-14
    assert np.max(np.abs(cn - np.cos(u))) < 1e-14
    assert np.max(np.abs(dn - 1.0)) < 1e-14
    assert abs(complete_elliptic_k(0.0) - math.pi / 2.0) < 1e-15


def test_degenerate_limits_k1():
    u = np.linspace(-3.0, 3.0, 31)
    sn, cn, dn = jacobi_sn_cn_dn(u, 1.0)
    assert np.max(np.abs(sn - np.tanh(u))) < 1e-14
    assert np.max(np.abs(cn - 1.0 / np.cosh(u))) < 1e-14
    assert np.max(np.abs(dn - 1.0 / np.cosh(u))) < 1e-14


def test_identities_on_grid():
    us = np.linspace(-20.0, 20.0, 81)
    for k in (0.0, 0.1, 0.31622776601683794, 0.5, 0.9, 0.99, 0.9999, 1.0):
        sn, cn, dn = jacobi_sn_cn_dn(us, k)
        assert np.max(np.abs(sn**2 + cn**2 - 1.0)) < 1e-12
        assert np.max(np.abs(dn**2 + (k * sn) ** 2 - 1.0)) < 1e-12


def test_amplitude_is_continuous_and_unwrapped():
    # span exactly 12 full periods: am(u + 2K) = am(u) + pi
    K = complete_elliptic_k(0.95)
    u = np.linspace(0.0, 24.0 * K, 4001)
    phi = jacobi_am(u, 0.95)
    dphi = np.diff(phi)
    assert np.all(dphi > 0.0)  # monotone for k < 1
    assert abs(phi[0]) < 1e-14
    assert abs(phi[-1] - 12.0 * math.pi) < 1e-10


def test_period_4k():
    k = 0.6
    K = complete_elliptic_k(k)
    u = np.linspace(-5.0, 5.0, 41)
    sn1, cn1, dn1 = jacobi_sn_cn_dn(u, k)
    sn2, cn2, dn2 = jacobi_sn_cn_dn(u + 4.0 * K, k)
    assert np.max(np.abs(sn1 - sn2)) < 1e-11
    assert np.max(np.abs(cn1 - cn2)) < 1e-11
    assert np.max(np.abs(dn1 - dn2)) < 1e-11


def test_modulus_validation():
    with pytest.raises(ValueError, match="reciprocal"):
        jacobi_am(1.0, 1.5)
    with pytest.raises(ValueError):
        complete_elliptic_k(1.0)
    with pytest.raises(ValueError):
        jacobi_am(1.0, -0.1)


def test_agm_basics():
    assert agm(1.0, 1.0) == 1.0
    assert agm(0.0, 5.0) == 0.0
    assert abs(agm(1.0, 2.0) - 1.4567910310469068) < 1e-14


@settings(max_examples=200, deadline=None)
@given(
    u=st.floats(-50.0, 50.0, allow_nan=False),
    k=st.floats(0.0, 0.999999, allow_nan=False),
)
def test_identity_property(u, k):
    sn, cn, dn = jacobi_sn_cn_dn(u, k)
    assert abs(sn * sn + cn * cn - 1.0) < 1e-12
    assert abs(dn * dn + (k * sn) ** 2 - 1.0) < 1e-12


@settings(max_examples=100, deadline=None)
@given(u=st.floats(-20.0, 20.0, allow_nan=False),
       k=st.floats(0.0, 0.999, allow_nan=False))
def test_oddness_property(u, k):
    sn_p, cn_p, dn_p = jacobi_sn_cn_dn(u, k)
    sn_m, cn_m, dn_m = jacobi_sn_cn_dn(-u, k)
    assert abs(sn_p + sn_m) < 1e-12  # sn odd
    assert abs(cn_p - cn_m) < 1e-12  # cn even
    assert abs(dn_p - dn_m) < 1e-12  # dn even
