"""Quadrature for integrands with inverse-square-root or square-root
endpoint behaviour, as met between classical turning points."""

from __future__ import annotations

import warnings

import numpy as np

_NODES = 64
_GL = np.polynomial.legendre.leggauss(_NODES)


def _panel_rule(panels: int):
    t, w = _GL
    edges = np.linspace(0.0, 0.5 * np.pi, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mid = 0.5 * (edges[1:] + edges[:-1])
    phi = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    wts = (half[:, None] * w[None, :]).ravel()
    return phi, wts


def sin2_quad(f, a, b, rtol: float = 1e-13, max_panels: int = 64, atol: float = 0.0):
    """Integrate ``f`` from ``a`` to ``b`` through ``x = a + (b-a) sin(phi)**2``.

    The substitution contributes ``(b-a) sin(2 phi)``, which cancels square
    root singularities of ``f`` at either end. A 64-node Gauss-Legendre rule
    is applied on 1, 2, 4, ... panels in ``phi`` until two successive levels
    agree to ``rtol``.

    Parameters
    ----------
    f : callable
        Vectorized integrand.
    a, b : float or array_like
        Limits; arrays broadcast and give one integral per element.
    atol : float
        Absolute floor on the level difference. Integrals over slivers next
        to a turning point are pure round-off and need one.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    L = (b - a)[..., None]

    def level(panels):
        phi, wts = _panel_rule(panels)
        s = np.sin(phi)
        x = a[..., None] + L * s * s
        vals = np.asarray(f(x), dtype=float) * L * np.sin(2 * phi)
        return vals @ wts

    panels = 1
    prev = level(panels)
    while True:
        panels *= 2
        cur = level(panels)
        scale = np.maximum(np.abs(cur), np.finfo(float).tiny)
        if np.all(np.abs(cur - prev) <= rtol * scale + atol + 1e-300):
            return cur if cur.ndim else float(cur)
        if panels >= max_panels:
            warnings.warn("sin2_quad did not reach the requested tolerance", RuntimeWarning)
            return cur if cur.ndim else float(cur)
        prev = cur
