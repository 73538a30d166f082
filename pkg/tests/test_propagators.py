from __future__ import annotations

import math
import warnings

import numpy as np
import pytest

from kvh import (ConfigGrid, PropagatorKind, eigen_ridge, eval_config_space, gaussian_state,
                 project_to_config, propagate, propagate_config, quantize, quartic)
from kvh.diagnostics import cross_correlation, norm_phase
from kvh.errors import BoundaryLeak, CausticReached, CausticUnresolved, OutOfDomain
from kvh.grids import axis, product_state
from kvh.propagators import check_boundary_decay, interpolate
from kvh.systems import free_particle

KINDS = [k.value for k in PropagatorKind]


@pytest.fixture(scope="module")
def blob():
    return gaussian_state(axis(-2.5, 2.5, 65), axis(-2.5, 2.5, 65), 1.0, 0.0, 0.25, 0.25)


def _centroid(g):
    X, P = g.mesh()
    w = np.abs(g.values)
    return float(np.sum(w * X) / np.sum(w)), float(np.sum(w * P) / np.sum(w))


def test_kind_parsing():
    assert PropagatorKind.parse("KvH_PS") is PropagatorKind.KVH_PS
    assert PropagatorKind.parse("kvh-sc") is PropagatorKind.KVH_SC
    with pytest.raises(ValueError):
        PropagatorKind.parse("wigner")


@pytest.mark.parametrize("kind", KINDS)
def test_zero_time_is_bitwise_identity(ho, blob, kind):
    out = propagate(ho.field(), blob, 0.0, kind)
    assert np.array_equal(out.values, blob.values) and out.values is not blob.values


def test_lve_half_period_rotation(ho, blob):
    out = propagate(ho.field(), blob, math.pi, "lve")
    cx, cp = _centroid(out)
    assert cx == pytest.approx(-1.0, abs=1e-3) and cp == pytest.approx(0.0, abs=1e-3)
    mirrored = blob.values[::-1, ::-1]
    assert np.max(np.abs(out.values - mirrored)) < 1e-3 * np.max(np.abs(blob.values))


def test_kvh_ps_unitarity_and_lve_mass(ho, blob):
    # coarse grid: interpolation limits conservation to about 1e-5
    out, info = propagate(ho.field(), blob, 2.0, "kvh-ps", return_info=True)
    assert norm_phase(out) == pytest.approx(norm_phase(blob), rel=1e-4)
    assert info.max_det_deviation < 1e-8
    lve = propagate(ho.field(), blob, 2.0, "lve")
    mass = lambda g: np.sum(np.abs(g.values)) * g.dx * g.dp
    assert mass(lve) == pytest.approx(mass(blob), rel=1e-4)


def test_kvn_squares_to_lve(quart, blob):
    kvn = propagate(quart.field(), blob, 1.3, "kvn")
    lve = propagate(quart.field(), blob.with_values(np.abs(blob.values) ** 2), 1.3, "lve")
    assert np.max(np.abs(np.abs(kvn.values) ** 2 - lve.values.real)) < 5e-3 * np.max(lve.values.real)


@pytest.mark.parametrize("kind", ["scalar", "lve", "kvn", "kvh-ps"])
def test_composition(quart, blob, kind):
    f = quart.field()
    state = blob.with_values(blob.values * np.exp(0.7j * blob.mesh()[0]))
    direct = propagate(f, state, 1.0, kind)
    half = propagate(f, propagate(f, state, 0.5, kind), 1.0, kind)
    once = propagate(f, state, 0.5, kind)
    interp_err = np.max(np.abs(propagate(f, once, 0.0, kind).values - once.values)) + 1e-3
    assert np.max(np.abs(direct.values - half.values)) < 2 * max(interp_err, 2e-3) * np.max(np.abs(state.values))


def test_bs_ridge_is_stationary(ho):
    e = quantize(ho, "bs", 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = eigen_ridge(e, axis(-3, 3, 97), axis(-3, 3, 97), 8)
    dt = 1.0
    out = propagate(ho.field(), g, dt, "kvh-ps")
    c = cross_correlation(g.with_values(g.values * np.exp(-1j * e.energy * dt)), out)
    assert abs(c) > 0.999 and abs(np.angle(c)) < 1e-4


def test_ebk_ridge_returns_after_one_period(ho):
    e = quantize(ho, "ebk", 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = eigen_ridge(e, axis(-3, 3, 97), axis(-3, 3, 97), 8)
    T = 2 * math.pi
    out = propagate(ho.field(), g, T, "kvh-ps")
    c = cross_correlation(g.with_values(g.values * np.exp(-1j * e.energy * T)), out)
    assert abs(c) > 0.999
    # phase-space transport carries no turning-point phase: exp(-i E T) = -1 is missed by pi
    assert abs(abs(np.angle(c)) - math.pi) < 1e-4


def test_semiclassical_weight_crossings(ho):
    e = quantize(ho, "ebk", 2)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        g = eigen_ridge(e, axis(-4, 4, 61), axis(-4, 4, 121), 8, semiclassical=True)
    out, info = propagate(ho.field(), g, 2 * math.pi, "kvh-sc", return_info=True)
    assert info.crossings == (2, 2)
    a, b = project_to_config(g), project_to_config(out)
    keep = e.chart.outside_windows(g.x_axis) & (np.abs(g.x_axis) < e.chart.xi_plus)
    ratio = b.values[keep] / a.values[keep]
    assert np.allclose(ratio, np.exp(-1j * e.energy * 2 * math.pi), atol=2e-3)


def test_semiclassical_caustic_is_unresolved(ho, blob):
    with pytest.raises(CausticUnresolved) as exc:
        propagate(ho.field(), blob, math.pi / 2, "kvh-sc")
    assert exc.value.location is not None


def test_out_of_domain():
    g = gaussian_state(axis(-0.5, 0.5, 16), axis(-8, 8, 16), 0, 0, 0.2, 2.0)
    with pytest.raises(OutOfDomain) as exc:
        propagate(quartic().field(), g, 1.0, "lve")
    assert exc.value.location is not None


def test_threads_match_serial(quart, blob):
    a = propagate(quart.field(), blob, 0.7, "kvh-ps")
    b = propagate(quart.field(), blob, 0.7, "kvh-ps", threads=4)
    assert np.allclose(a.values, b.values, atol=1e-12)


def test_interpolation_reproduces_nodes(blob):
    X, P = blob.mesh()
    assert np.allclose(interpolate(blob, X, P), blob.values, atol=1e-14)
    assert interpolate(blob, np.array([10.0]), np.array([0.0]))[0] == 0


def test_projection_examples(ho):
    xs, ps = axis(-3, 3, 31), axis(-6, 6, 601)
    zero = gaussian_state(xs, ps, 0, 0, 1, 1).with_values(np.zeros((31, 601)))
    assert np.all(project_to_config(zero).values == 0)
    g = product_state(xs, ps, lambda x: np.cos(x) + 0.5j * x, 8.0)
    assert np.allclose(project_to_config(g).values, np.cos(xs) + 0.5j * xs, atol=1e-12)
    e = quantize(ho, "ebk", 0)
    r = eigen_ridge(e, axis(-2, 2, 81), axis(-3, 3, 1201), 32, semiclassical=True)
    proj = project_to_config(r)
    ref = eval_config_space(e, proj.x_axis, window=None).values
    inside = np.abs(proj.x_axis) < 0.5
    assert np.max(np.abs(proj.values[inside] - ref[inside])) < 1e-3


def test_boundary_leak():
    g = product_state(axis(-1, 1, 16), axis(-1, 1, 16), np.ones_like, 1.0)
    with pytest.raises(BoundaryLeak):
        project_to_config(g)
    with pytest.raises(BoundaryLeak):
        check_boundary_decay(g)


def test_config_identity(ho):
    psi = ConfigGrid(axis(-1, 1, 21), np.exp(-axis(-1, 1, 21) ** 2))
    res = propagate_config(ho.field(), psi, lambda x: 0 * x, 0.0)
    assert np.array_equal(res.grid.values, psi.values)


def test_free_particle_translation():
    xs = axis(-3, 3, 241)
    p0, t1 = 1.5, 2.0
    psi = ConfigGrid(xs, np.exp(-xs ** 2) * np.exp(1j * p0 * xs))
    target = axis(-1, 5, 121)
    res = propagate_config(free_particle(), psi, lambda x: p0 + 0 * x, t1, x_axis=target)
    exact = np.exp(-(target - p0 * t1) ** 2) * np.exp(1j * (p0 * target - 0.5 * p0 ** 2 * t1))
    covered = target >= res.image_x.min()
    assert np.allclose(res.grid.values[covered], exact[covered], atol=1e-8)
    assert np.allclose(res.jacobian, 1.0)


def test_ho_focus_raises(ho):
    psi = ConfigGrid(axis(-1, 1, 21), np.exp(-axis(-1, 1, 21) ** 2))
    with pytest.raises(CausticReached) as exc:
        propagate_config(ho.field(), psi, lambda x: 0 * x, 2.0)
    assert exc.value.time == pytest.approx(math.pi / 2, abs=1e-8)
