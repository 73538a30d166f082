from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from kvh.quadrature import sin2_quad


def test_semicircle_area():
    val = sin2_quad(lambda x: np.sqrt(np.maximum(1 - x * x, 0.0)), -1.0, 1.0)
    assert val == pytest.approx(math.pi / 2, rel=1e-14)


def test_inverse_square_root_endpoints():
    val = sin2_quad(lambda x: 1 / np.sqrt((1 + x) * (1 - x)), -1.0, 1.0)
    assert val == pytest.approx(math.pi, rel=1e-12)


@given(st.floats(0.1, 10.0), st.floats(-3, 3))
def test_vectorized_limits(width, a):
    b = np.array([a + width, a + 2 * width])
    out = sin2_quad(lambda x: x * x, np.full(2, a), b)
    exact = (b ** 3 - a ** 3) / 3
    assert np.allclose(out, exact, rtol=1e-12)


def test_reversed_limits_change_sign():
    assert sin2_quad(np.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1), rel=1e-14)
