"""Inner products, the physical phase-space density, orthonormality checks
and the exact harmonic-oscillator oracle."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from .deltas import convergence_order, gaussian as delta_gaussian
from .eigen import (DEFAULT_WINDOW, SemiclassicalEigenfunction, chart_phase, eval_config_space,
                    quantize)
from .errors import KvhError
from .grids import ConfigGrid, PhaseSpaceGrid, require_same_axes
from .propagators import check_boundary_decay
from .systems import harmonic

TEST_FUNCTIONS: Dict[str, Callable] = {
    "1": lambda x, p: np.ones_like(x * p),
    "x": lambda x, p: x + 0 * p,
    "p": lambda x, p: p + 0 * x,
    "x2": lambda x, p: x * x + 0 * p,
    "p2": lambda x, p: p * p + 0 * x,
    "xp": lambda x, p: x * p,
}


def inner_product_config(a: ConfigGrid, b: ConfigGrid, mask=None) -> complex:
    """Trapezoid ``integral conj(a) b dx``; ``mask`` zeroes excluded points."""
    require_same_axes(a, b)
    integrand = np.conj(a.values) * b.values
    if mask is not None:
        integrand = np.where(mask, integrand, 0.0)
    return complex(np.trapezoid(integrand, a.x_axis))


def inner_product_phase(a: PhaseSpaceGrid, b: PhaseSpaceGrid) -> complex:
    """2D trapezoid ``integral conj(a) b dx dp``."""
    require_same_axes(a, b)
    inner = np.trapezoid(np.conj(a.values) * b.values, a.p_axis, axis=1)
    return complex(np.trapezoid(inner, a.x_axis))


def norm_phase(a: PhaseSpaceGrid) -> float:
    return inner_product_phase(a, a).real


def cross_correlation(a: PhaseSpaceGrid, b: PhaseSpaceGrid) -> complex:
    """Normalized overlap ``<a|b> / (|a| |b|)``."""
    return inner_product_phase(a, b) / math.sqrt(norm_phase(a) * norm_phase(b))


def derivative4(values, h: float, axis: int):
    """Fourth-order central difference with one-sided fourth-order closures
    on the two outermost points at each edge."""
    v = np.moveaxis(np.asarray(values), axis, 0)
    n = v.shape[0]
    if n < 5:
        raise KvhError("need at least five points for fourth-order differences")
    d = np.empty_like(v)
    d[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    d[0] = (-25 * v[0] + 48 * v[1] - 36 * v[2] + 16 * v[3] - 3 * v[4]) / (12 * h)
    d[1] = (-3 * v[0] - 10 * v[1] + 18 * v[2] - 6 * v[3] + v[4]) / (12 * h)
    d[-1] = (25 * v[-1] - 48 * v[-2] + 36 * v[-3] - 16 * v[-4] + 3 * v[-5]) / (12 * h)
    d[-2] = (3 * v[-1] + 10 * v[-2] - 18 * v[-3] + 6 * v[-4] - v[-5]) / (12 * h)
    return np.moveaxis(d, 0, axis)


@dataclass(frozen=True)
class DensityReport:
    x_axis: np.ndarray
    p_axis: np.ndarray
    f_grid: np.ndarray
    delta_f_grid: np.ndarray
    integral_delta_f_per_x: np.ndarray
    weighted_integrals: Dict[str, np.ndarray]
    imag_residue: float

    def summary(self) -> dict:
        return {
            "max_abs_integral_delta_f": float(np.max(np.abs(self.integral_delta_f_per_x))),
            "max_abs_weighted": {k: float(np.max(np.abs(v))) for k, v in self.weighted_integrals.items()},
            "imag_residue": self.imag_residue,
        }

    def to_json(self, path, extra: Optional[dict] = None):
        doc = {
            "x": self.x_axis.tolist(),
            "integral_delta_f_per_x": self.integral_delta_f_per_x.tolist(),
            "weighted_integrals": {k: v.tolist() for k, v in self.weighted_integrals.items()},
            "summary": self.summary(),
        }
        if extra:
            doc.update(extra)
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=1)
            fh.write("\n")


def physical_density(grid: PhaseSpaceGrid, tol: float = 1e-10,
                     test_functions: Optional[Dict[str, Callable]] = None) -> DensityReport:
    """``f = |psi|**2 + d_p(p |psi|**2) + hbar Im{psi*, psi}`` with canonical
    bracket ``{a, b} = a_x b_p - a_p b_x``.

    Raises
    ------
    BoundaryLeak
        Unless ``psi`` decays at the momentum edges.
    """
    check_boundary_decay(grid, tol)
    psi = grid.values
    X, P = grid.mesh()
    rho = np.abs(psi) ** 2
    psi_x = derivative4(psi, grid.dx, 0)
    psi_p = derivative4(psi, grid.dp, 1)
    bracket = np.conj(psi_x) * psi_p - np.conj(psi_p) * psi_x
    residue = float(np.max(np.abs(bracket.real))) * grid.hbar
    delta_f = derivative4(P * rho, grid.dp, 1) + grid.hbar * bracket.imag
    f = rho + delta_f
    fns = TEST_FUNCTIONS if test_functions is None else test_functions
    weighted = {name: np.trapezoid(g(X, P) * delta_f, grid.p_axis, axis=1) for name, g in fns.items()}
    per_x = np.trapezoid(delta_f, grid.p_axis, axis=1)
    return DensityReport(grid.x_axis, grid.p_axis, f, delta_f, per_x, weighted, residue)


def _smoothstep(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (10 - 15 * s + 6 * s * s)


def branch_taper(eig: SemiclassicalEigenfunction, x, window: float = DEFAULT_WINDOW, ramp: float = 0.5):
    """Smooth cutoff: zero within ``window`` Airy lengths of a turning point
    or beyond it, one from ``ramp`` further inside."""
    c = eig.chart
    dm, dp = c.airy_lengths()
    lo = c.xi_minus + window * dm
    hi = c.xi_plus - window * dp
    if not lo < hi:
        raise KvhError("exclusion windows cover the whole allowed region")
    r = ramp * (hi - lo) / 2
    x = np.asarray(x, dtype=float)
    return _smoothstep((x - lo) / r) * _smoothstep((hi - x) / r)


def hj_ridge(eig: SemiclassicalEigenfunction, x_axis, p_axis, k: float,
             window: float = DEFAULT_WINDOW) -> PhaseSpaceGrid:
    """Momentum-space square-root-delta lift of the configuration-space
    eigenfunction: ``sum over branches of phi_s(x) G^(1/2)_k(p - p_s(x))``.

    Each branch carries the fixed-``J0`` phase, so ``p`` is concentrated on
    ``dS/dx``. A smooth taper removes the turning-point windows.
    """
    c = eig.chart
    x_axis = np.asarray(x_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    taper = branch_taper(eig, x_axis, window)
    live = taper > 0
    ps = np.where(live, c.momentum(x_axis), 0.0)
    amp = np.zeros_like(x_axis)
    amp[live] = np.abs(eig.a_plus) * np.sqrt(c.dp_dJ(x_axis[live])) * taper[live]
    vals = np.zeros((len(x_axis), len(p_axis)), dtype=complex)
    for sign in (1.0, -1.0):
        ph = chart_phase(eig, x_axis, sign)
        env = delta_gaussian(0.5, k, p_axis[None, :] - sign * ps[:, None])
        vals += (amp * ph)[:, None] * env
    return PhaseSpaceGrid(x_axis, p_axis, vals, 0.0, c.hbar)


def density_k_ladder(eig: SemiclassicalEigenfunction, ks: Sequence[float], x_axis, p_axis,
                     window: float = DEFAULT_WINDOW) -> dict:
    """``max_x |integral g delta_f dp|`` across ``ks`` with fitted orders."""
    rows = {"k": [float(k) for k in ks], "integral_delta_f": [], "weighted": {n: [] for n in TEST_FUNCTIONS}}
    for k in ks:
        rep = physical_density(hj_ridge(eig, x_axis, p_axis, k, window))
        rows["integral_delta_f"].append(float(np.max(np.abs(rep.integral_delta_f_per_x))))
        for name, v in rep.weighted_integrals.items():
            rows["weighted"][name].append(float(np.max(np.abs(v))))
    rows["order"] = convergence_order(ks, rows["integral_delta_f"])
    rows["weighted_order"] = {n: convergence_order(ks, v) for n, v in rows["weighted"].items()}
    return rows


def exact_ho_eigenfunction(m: float, omega: float, hbar: float, n: int, x_axis) -> ConfigGrid:
    """Unit-norm Hermite function via the scaled three-term recurrence
    ``psi_{k+1} = sqrt(2/(k+1)) s psi_k - sqrt(k/(k+1)) psi_{k-1}``."""
    if n < 0 or n > 200:
        raise ValueError("n must lie in 0..200")
    x_axis = np.asarray(x_axis, dtype=float)
    x0 = math.sqrt(hbar / (m * omega))
    s = x_axis / x0
    prev = np.zeros_like(s)
    cur = np.exp(-0.5 * s * s) / (math.pi ** 0.25 * math.sqrt(x0))
    for k in range(n):
        nxt = math.sqrt(2.0 / (k + 1)) * s * cur - math.sqrt(k / (k + 1.0)) * prev
        prev, cur = cur, nxt
    return ConfigGrid(x_axis, cur.astype(complex), 0.0, hbar)


def exact_ho_energy(omega: float, hbar: float, n: int) -> float:
    return hbar * omega * (n + 0.5)


def schrodinger_residual(m: float, omega: float, hbar: float, n: int, x_axis) -> float:
    """``|(H - E_n) psi_n| / |psi_n|`` with a fourth-order Laplacian."""
    g = exact_ho_eigenfunction(m, omega, hbar, n, x_axis)
    psi = g.values.real
    h = g.dx
    lap = np.zeros_like(psi)
    lap[2:-2] = (-psi[:-4] + 16 * psi[1:-3] - 30 * psi[2:-2] + 16 * psi[3:-1] - psi[4:]) / (12 * h * h)
    Hpsi = -hbar ** 2 / (2 * m) * lap + 0.5 * m * omega ** 2 * g.x_axis ** 2 * psi
    r = (Hpsi - exact_ho_energy(omega, hbar, n) * psi)[2:-2]
    return float(np.linalg.norm(r) / np.linalg.norm(psi[2:-2]))


def default_x_axis(eig: SemiclassicalEigenfunction, points: int = 20001) -> np.ndarray:
    lo, hi = eig.chart.well.domain
    return np.linspace(lo, hi, points)


def compare_to_exact(m: float = 1.0, omega: float = 1.0, hbar: float = 1.0, n: int = 0,
                     scheme: str = "ebk", window: float = DEFAULT_WINDOW, x_axis=None) -> dict:
    """JWKB versus exact harmonic-oscillator eigenfunction and energies.

    The waveform error is the relative L2 error over points outside the
    turning-point exclusion windows of ``window`` Airy lengths.
    """
    well = harmonic(m=m, omega=omega, hbar=hbar)
    ebk = quantize(well, "ebk", n)
    bs = quantize(well, "bs", n)
    exact_E = exact_ho_energy(omega, hbar, n)
    eig = ebk if scheme == "ebk" else bs
    report = {
        "system": "ho", "m": m, "omega": omega, "hbar": hbar, "n": n, "scheme": scheme,
        "exact_energy": exact_E,
        "ebk_energy": ebk.energy, "ebk_energy_error": ebk.energy - exact_E,
        "bs_energy": bs.energy, "bs_energy_error": bs.energy - exact_E,
        "window_airy_lengths": window,
    }
    if eig.degenerate:
        report["waveform_rel_l2_error"] = None
        report["note"] = "degenerate torus, no waveform"
        return report
    xs = default_x_axis(eig) if x_axis is None else np.asarray(x_axis, dtype=float)
    approx = eval_config_space(eig, xs, window=window)
    exact = exact_ho_eigenfunction(m, omega, hbar, n, xs).values
    keep = np.isfinite(approx.values)
    a, e = approx.values[keep], exact[keep]
    report["waveform_rel_l2_error"] = float(np.sqrt(np.trapezoid(np.abs(a - e) ** 2, xs[keep])
                                                    / np.trapezoid(np.abs(e) ** 2, xs[keep])))
    report["points_compared"] = int(keep.sum())
    return report


def orthonormality_matrix(eigs: List[SemiclassicalEigenfunction], x_axis=None,
                          window: float = DEFAULT_WINDOW, normalize: bool = True) -> np.ndarray:
    """Gram matrix of configuration-space eigenfunctions.

    Entry ``(i, j)`` integrates over points outside the exclusion windows of
    both states. With ``normalize`` each state is scaled to unit norm over
    the points outside its own windows, so the diagonal is one.
    """
    if not eigs:
        return np.zeros((0, 0), dtype=complex)
    well = eigs[0].chart.well
    if any(e.chart.well is not well for e in eigs):
        raise KvhError("all eigenfunctions must share one well")
    xs = default_x_axis(eigs[0]) if x_axis is None else np.asarray(x_axis, dtype=float)
    masks = [e.chart.outside_windows(xs, window) for e in eigs]
    evals = [np.where(m, eval_config_space(e, xs, window=None).values, 0.0) for e, m in zip(eigs, masks)]
    if normalize:
        evals = [v / math.sqrt(np.trapezoid(np.abs(v) ** 2, xs)) for v in evals]
    n = len(eigs)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(i, n):
            mask = masks[i] & masks[j]
            v = np.trapezoid(np.where(mask, np.conj(evals[i]) * evals[j], 0.0), xs)
            G[i, j] = v
            G[j, i] = np.conj(v)
    return G


def max_off_diagonal(G: np.ndarray) -> float:
    off = G - np.diag(np.diag(G))
    return float(np.max(np.abs(off))) if G.size > 1 else 0.0


def reconstruction_error(eigs: List[SemiclassicalEigenfunction], psi, x_axis,
                         window: float = DEFAULT_WINDOW) -> float:
    """Relative L2 residual of the least-squares fit of ``psi`` by the
    windowed configuration-space eigenfunctions ``eigs``.

    A finite stand-in for completeness: the residual should shrink as the
    eigen-set grows.
    """
    xs = np.asarray(x_axis, dtype=float)
    psi = np.asarray(psi, dtype=complex)
    basis = np.stack([np.nan_to_num(eval_config_space(e, xs, window=window).values) for e in eigs], axis=1)
    coef, *_ = np.linalg.lstsq(basis, psi, rcond=None)
    return float(np.linalg.norm(basis @ coef - psi) / np.linalg.norm(psi))
