from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kvh import (Trajectory, flow_map, integrate, integrate_splitting, lagrangian, make_system,
                 maslov_count, van_vleck_factor)
from kvh.errors import CausticReached


def test_quarter_period_rotation(ho):
    tr = integrate(ho.field(), (1.0, 0.0), 0.0, math.pi / 2)
    assert tr.final.x == pytest.approx(0.0, abs=1e-9)
    assert tr.final.p == pytest.approx(-1.0, abs=1e-9)


def test_full_period_action_vanishes(ho):
    tr = integrate(ho.field(), (1.0, 0.0), 0.0, 2 * math.pi)
    assert tr.final.action == pytest.approx(0.0, abs=1e-9)


def test_zero_duration_is_identity(ho):
    tr = integrate(ho.field(), (0.3, 0.2), 1.0, 1.0)
    assert len(tr) == 1
    assert np.array_equal(tr.final.tangent, np.eye(2))
    assert tr.final.action == 0.0
    assert maslov_count(tr) == 0


def test_van_vleck_examples(ho):
    f = ho.field()
    vv = van_vleck_factor(integrate(f, (1.0, 0.0), 0.0, math.pi / 2))
    assert vv.values[-1] == pytest.approx(0.0, abs=1e-4)
    assert len(vv.values) - 1 in vv.caustic_indices
    vv = van_vleck_factor(integrate(f, (1.0, 0.0), 0.0, 0.0))
    assert vv.values[0] == 1.0
    vv = van_vleck_factor(integrate(f, (1.0, 0.0), 0.0, math.pi))
    assert vv.values[-1] == pytest.approx(1.0, abs=1e-9)
    assert vv.sign_changes == 1


def test_maslov_counts(ho, quart):
    assert maslov_count(integrate(ho.field(), (1.0, 0.0), 0.0, 2 * math.pi)) == 2
    assert maslov_count(integrate(ho.field(), (1.0, 0.0), 0.0, math.pi / 2)) == 1
    from kvh.eigen import period_of_energy

    T = period_of_energy(quart, 1.0)
    assert maslov_count(integrate(quart.field(), (math.sqrt(2), 0.0), 0.0, T)) == 2


@given(st.sampled_from(["ho", "quartic"]), st.floats(0.2, 2.0), st.floats(-1.5, 1.5), st.floats(0.5, 8.0))
def test_symplectic_and_energy(name, x0, p0, t1):
    f = make_system(name).field()
    tr = integrate(f, (x0, p0), 0.0, t1)
    det = np.linalg.det(tr.tangent)
    assert np.max(np.abs(det - 1)) < 1e-8
    H = f.h(0, tr.x, tr.p)
    assert np.max(np.abs(H - H[0])) < 1e-9 * max(1.0, abs(H[0]))


@given(st.floats(0.2, 2.0), st.floats(-1.5, 1.5), st.floats(0.3, 6.0))
def test_time_reversal(x0, p0, t1):
    f = make_system("quartic").field()
    fw = integrate(f, (x0, p0), 0.0, t1)
    bw = integrate(f, (fw.final.x, fw.final.p), t1, 0.0)
    assert bw.final.x == pytest.approx(x0, abs=1e-8)
    assert bw.final.p == pytest.approx(p0, abs=1e-8)
    assert fw.final.action + bw.final.action == pytest.approx(0.0, abs=1e-8)


def test_action_matches_lagrangian_quadrature(quart):
    f = quart.field()
    tr = integrate(f, (1.0, 0.5), 0.0, 3.0, max_step=0.01)
    L = lagrangian(f, 0.0, tr.x, tr.p)
    assert np.trapezoid(L, tr.t) == pytest.approx(tr.final.action, abs=1e-4)


def test_splitting_agrees_with_runge_kutta(quart):
    rk = integrate(quart.field(), (1.0, 0.3), 0.0, 5.0)
    sp = integrate_splitting(quart, (1.0, 0.3), 0.0, 5.0, 4000)
    assert sp.final.x == pytest.approx(rk.final.x, abs=1e-8)
    assert sp.final.p == pytest.approx(rk.final.p, abs=1e-8)
    assert sp.final.action == pytest.approx(rk.final.action, abs=1e-8)
    assert np.allclose(sp.final.tangent, rk.final.tangent, atol=1e-7)


def test_ten_period_symplecticity(ho):
    tr = integrate(ho.field(), (1.0, 0.0), 0.0, 20 * math.pi)
    assert np.max(np.abs(np.linalg.det(tr.tangent) - 1)) < 1e-8
    assert maslov_count(tr) == 20


def test_csv_round_trip(ho, tmp_path):
    tr = integrate(ho.field(), (1.0, 0.0), 0.0, 1.0)
    path = tmp_path / "traj.csv"
    tr.to_csv(path)
    assert path.read_text().splitlines()[0] == "t,x,p,S,M00,M01,M10,M11"
    back = Trajectory.from_csv(path)
    assert np.array_equal(back.x, tr.x) and np.array_equal(back.tangent, tr.tangent)


def test_flow_map_matches_single_trajectories(quart):
    f = quart.field()
    xs, ps = np.array([0.5, 1.0, -0.7]), np.array([0.0, 0.4, 1.1])
    fm = flow_map(f, xs, ps, 0.0, 2.5, track_caustics=True)
    for i in range(3):
        tr = integrate(f, (xs[i], ps[i]), 0.0, 2.5)
        assert fm.x[i] == pytest.approx(tr.final.x, abs=1e-8)
        assert fm.action[i] == pytest.approx(tr.final.action, abs=1e-8)


def test_flow_map_counts_crossings(ho):
    fm = flow_map(ho.field(), np.array([1.0]), np.array([0.0]), 0.0, 2 * math.pi - 0.1, track_caustics=True)
    assert fm.crossings[0] == 2
    with pytest.raises(CausticReached) as exc:
        flow_map(ho.field(), np.array([1.0]), np.array([0.0]), 0.0, 2.0, stop_on_caustic=True)
    assert exc.value.time == pytest.approx(math.pi / 2, abs=1e-8)
