"""Exit-time experiment, self-similarity, box counting."""

import math

import numpy as np
import pytest

from latticechaos.dynamics import AtomState, SystemParams
from latticechaos.integrate import SWEEP_CONFIG, IntegratorConfig
from latticechaos.scattering import (
    CavitySpec,
    box_counting_dimension,
    cantor_set,
    exit_time,
    exit_time_scan,
    exit_time_surface,
    self_similarity_probe,
)

WR = 1e-5
FIG6_STATE = AtomState(0.0, 200.0, 0.0, 0.0, -1.0)
FAST_CAVITY = CavitySpec(tau_cutoff=1e6)


def test_cavity_validation():
    with pytest.raises(ValueError):
        CavitySpec(half_width=0.0)
    with pytest.raises(ValueError):
        CavitySpec(tau_cutoff=-1.0)
    assert CavitySpec().half_width == pytest.approx(2.0 * math.pi)


def test_uniform_motion_exit_time():
    prm = SystemParams(omega_r=WR, delta=0.0)
    s = AtomState(0.0, 500.0, 0.0, 0.0, 1.0)
    r = exit_time(s, prm, FAST_CAVITY)
    assert r.outcome == "right-detector"
    assert r.m_minus_1 == 0
    assert abs(r.T - 2.0 * math.pi / (WR * 500.0)) < 1e-6
    assert not r.censored


def test_trapped_below_critical_momentum():
    # amplitude 2 arcsin(K) < pi: never reaches the detectors at 2 pi
    prm = SystemParams(omega_r=WR, delta=0.0)
    s = AtomState(0.0, 200.0, 1.0, 0.0, 0.0)
    r = exit_time(s, prm, CavitySpec(tau_cutoff=5e4))
    assert r.outcome == "trapped-at-cutoff"
    assert r.censored
    assert r.T == 5e4


def test_mirror_symmetry():
    prm = SystemParams(omega_r=WR, delta=-0.05)
    a = exit_time(AtomState(0.0, 300.0, 0.0, 0.0, -1.0), prm, FAST_CAVITY)
    b = exit_time(AtomState(0.0, -300.0, 0.0, 0.0, -1.0), prm, FAST_CAVITY)
    assert {a.outcome, b.outcome} == {"left-detector", "right-detector"}
    assert a.T == b.T
    assert a.m_minus_1 == b.m_minus_1


def test_censoring_monotonicity():
    prm = SystemParams(omega_r=WR, delta=-0.0831)
    s = FIG6_STATE
    short = exit_time(s, prm, CavitySpec(tau_cutoff=1e3))
    long = exit_time(s, prm, CavitySpec(tau_cutoff=1e6))
    if not short.censored:
        assert long.T == short.T
        assert long.outcome == short.outcome
    else:
        assert long.T >= short.T


def test_x0_outside_cavity_rejected():
    prm = SystemParams(omega_r=WR, delta=0.0)
    with pytest.raises(ValueError):
        exit_time(AtomState(7.0, 1.0, 0.0, 0.0, 1.0), prm, CavitySpec())


@pytest.fixture(scope="module")
def fig6_scan():
    deltas = np.linspace(-0.13, -0.05, 161)
    return deltas, exit_time_scan(deltas, FIG6_STATE, WR, FAST_CAVITY,
                                  SWEEP_CONFIG, threads=4)


def test_scan_structure(fig6_scan):
    deltas, recs = fig6_scan
    assert len(recs) == len(deltas)
    assert all(r.valid for r in recs)
    ms = np.array([r.m_minus_1 for r in recs])
    assert ms.min() == 0  # smooth stretches exist
    assert ms.max() >= 2  # and multi-bounce bands exist
    # records come back in scan order
    assert np.array_equal([r.delta for r in recs], deltas)


def test_smooth_cells_tolerance_robust(fig6_scan):
    deltas, recs = fig6_scan
    # pick a cell inside a smooth (m-1 = 0) stretch
    ms = [r.m_minus_1 for r in recs]
    idx = next(i for i in range(1, len(ms) - 1)
               if ms[i - 1] == ms[i] == ms[i + 1] == 0)
    prm = SystemParams(omega_r=WR, delta=recs[idx].delta)
    tight = IntegratorConfig(rel_tol=1e-9, abs_tol=1e-9, max_step=0.5)
    a = exit_time(FIG6_STATE, prm, FAST_CAVITY, SWEEP_CONFIG)
    b = exit_time(FIG6_STATE, prm, FAST_CAVITY, tight)
    assert abs(a.T - b.T) / a.T < 1e-4
    assert a.m_minus_1 == b.m_minus_1


def test_surface_grid_shape():
    grid = exit_time_surface(
        np.linspace(-0.06, -0.05, 3), np.linspace(800.0, 1200.0, 3),
        (0.0, 0.0, -1.0), WR, FAST_CAVITY, SWEEP_CONFIG, threads=4)
    assert len(grid) == 3 and len(grid[0]) == 3
    assert grid[1][2].p0 == 1200.0
    assert grid[2][0].delta == pytest.approx(-0.05)


def test_high_momentum_rows_are_smooth():
    # far above the trapping scale the atom flies straight through
    grid = exit_time_surface(
        np.linspace(-0.1, -0.05, 4), [20000.0, 40000.0],
        (0.0, 0.0, -1.0), WR, FAST_CAVITY, SWEEP_CONFIG, threads=4)
    for row in grid:
        for rec in row:
            assert rec.m_minus_1 == 0
            assert rec.outcome == "right-detector"


def test_probe_finds_second_order_structure(fig6_scan):
    deltas, recs = fig6_scan
    ms = [r.m_minus_1 for r in recs]
    i = next(i for i in range(len(ms) - 1) if ms[i] != ms[i + 1])
    rep = self_similarity_probe((deltas[i], deltas[i + 1]), 31, FIG6_STATE,
                                WR, FAST_CAVITY, SWEEP_CONFIG, threads=4)
    assert rep.max_m_minus_1 >= max(ms[i], ms[i + 1])
    assert len(rep.records) == 31


def test_probe_validation():
    with pytest.raises(ValueError):
        self_similarity_probe((0.1, 0.1), 10, FIG6_STATE, WR)
    with pytest.raises(ValueError):
        self_similarity_probe((0.0, 0.1), 1, FIG6_STATE, WR)


def test_box_counting_uniform_calibration():
    fit = box_counting_dimension(np.linspace(0.0, 1.0, 2000))
    assert abs(fit.dimension - 1.0) < 0.05
    assert fit.r_squared > 0.99
    assert not fit.degenerate


def test_box_counting_cantor_calibration():
    fit = box_counting_dimension(cantor_set(10))
    assert abs(fit.dimension - math.log(2) / math.log(3)) < 0.02
    assert fit.r_squared > 0.99


def test_box_counting_validation():
    with pytest.raises(ValueError, match="100"):
        box_counting_dimension(np.linspace(0, 1, 50))
    with pytest.raises(ValueError, match="extent"):
        box_counting_dimension(np.zeros(200))
    with pytest.raises(ValueError, match="octaves"):
        box_counting_dimension(np.linspace(0, 1, 200), eps_max=0.1,
                               eps_min=0.05)


def test_cantor_set_construction():
    pts = cantor_set(3)
    assert pts[0] == 0.0 and pts[-1] == 1.0
    assert len(pts) == 16
    # no point falls in the open middle third
    assert not np.any((pts > 1.0 / 3.0) & (pts < 2.0 / 3.0))
