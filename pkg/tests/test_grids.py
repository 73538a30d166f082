from __future__ import annotations

import math

import numpy as np
import pytest

from kvh import ConfigGrid, PhaseSpaceGrid, eigen_ridge, gaussian_state, harmonic, quantize
from kvh.diagnostics import norm_phase
from kvh.errors import AxisMismatch, KvhError
from kvh.grids import axis, product_state, read_bin, require_same_axes


def test_axis_validation():
    with pytest.raises(KvhError):
        PhaseSpaceGrid([0, 1, 3], [0, 1], np.zeros((3, 2)))
    with pytest.raises(KvhError):
        PhaseSpaceGrid([0, 1, 2], [1, 0], np.zeros((3, 2)))
    with pytest.raises(KvhError):
        ConfigGrid([0, 1, 2], [0, np.nan, 0])
    with pytest.raises(KvhError):
        ConfigGrid([0, 1, 2], [0, 0])


def test_binary_round_trip(tmp_path):
    g = gaussian_state(axis(-2, 2, 17), axis(-3, 3, 19), 0.3, -0.2, 0.4, 0.5, hbar=0.7, t=1.25)
    g = g.with_values(g.values * np.exp(1j * g.mesh()[1]))
    g.to_bin(tmp_path / "g.bin")
    back = read_bin(tmp_path / "g.bin")
    assert back.same_axes(g) and np.array_equal(back.values, g.values)
    assert (back.t, back.hbar) == (1.25, 0.7)
    raw = np.fromfile(tmp_path / "g.bin", dtype="<f8")
    assert raw[0] == 2 and raw[3] == 17 and raw[6] == 19
    assert raw[9] == g.values[0, 0].real and raw[10] == g.values[0, 0].imag
    c = ConfigGrid(axis(0, 1, 5), np.arange(5) * (1 + 2j), 0.5, 2.0)
    c.to_bin(tmp_path / "c.bin")
    cb = read_bin(tmp_path / "c.bin")
    assert np.array_equal(cb.values, c.values) and cb.hbar == 2.0


def test_csv_layout(tmp_path):
    g = gaussian_state(axis(-1, 1, 3), axis(-1, 1, 2), 0, 0, 1, 1)
    g.to_csv(tmp_path / "g.csv")
    lines = (tmp_path / "g.csv").read_text().splitlines()
    assert lines[0] == "x,p,re,im" and len(lines) == 7
    assert lines[1].split(",")[0] == "-1.0000000000000000e+00"


def test_axis_mismatch():
    a = gaussian_state(axis(-1, 1, 16), axis(-1, 1, 16), 0, 0, 1, 1)
    b = gaussian_state(axis(-1, 1, 17), axis(-1, 1, 16), 0, 0, 1, 1)
    with pytest.raises(AxisMismatch):
        require_same_axes(a, b)


def test_gaussian_state_unit_norm():
    g = gaussian_state(axis(-4, 4, 161), axis(-4, 4, 161), 0.5, 0.0, 0.5, 0.6)
    assert norm_phase(g) == pytest.approx(1.0, abs=1e-10)


def test_product_state_has_unit_p_mass():
    g = product_state(axis(-1, 1, 5), axis(-3, 3, 601), lambda x: 1 + x, 8.0, a=1.0)
    col = np.trapezoid(g.values, g.p_axis, axis=1)
    assert np.allclose(col, 1 + g.x_axis, atol=1e-12)


def test_eigen_ridge_norm_and_width_warning():
    e = quantize(harmonic(), "ebk", 2)
    g = eigen_ridge(e, axis(-4, 4, 321), axis(-4, 4, 321), 8)
    # phase-space norm of a+ G^(1/2)(J - J0) is 2 pi a+**2 = 1
    assert norm_phase(g) == pytest.approx(1.0, abs=2e-3)
    with pytest.warns(RuntimeWarning):
        eigen_ridge(e, axis(-4, 4, 33), axis(-4, 4, 33), 64)


def test_gaussian_width_validation():
    with pytest.raises(ValueError):
        gaussian_state(axis(-1, 1, 16), axis(-1, 1, 16), 0, 0, 0.0, 1.0)


def test_mesh_is_ij():
    g = gaussian_state(axis(-1, 1, 16), axis(-2, 2, 17), 0, 0, 1, 1)
    X, P = g.mesh()
    assert X.shape == (16, 17) and X[3, 0] == g.x_axis[3] and P[0, 5] == g.p_axis[5]
    assert math.isclose(g.dx, 2 / 15) and math.isclose(g.dp, 4 / 16)
