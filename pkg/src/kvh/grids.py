"""Uniform complex grids in phase space and configuration space, their
serialization, and builders for initial states."""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .deltas import gaussian as delta_gaussian
from .eigen import SemiclassicalEigenfunction, action_field, chart_phase
from .errors import AxisMismatch, KvhError

_UNIFORM_TOL = 1e-12


def _check_axis(axis, name):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or len(axis) < 2:
        raise KvhError(f"{name} axis needs at least two points")
    d = np.diff(axis)
    if np.any(d <= 0):
        raise KvhError(f"{name} axis must be strictly increasing")
    if np.max(np.abs(d - d.mean())) > _UNIFORM_TOL * max(1.0, axis[-1] - axis[0]):
        raise KvhError(f"{name} axis is not uniform")
    return axis


def axis(lo: float, hi: float, n: int) -> np.ndarray:
    return np.linspace(float(lo), float(hi), int(n))


@dataclass(frozen=True)
class PhaseSpaceGrid:
    """``values[i, j]`` samples ``psi(x_axis[i], p_axis[j])`` at time ``t``."""

    x_axis: np.ndarray
    p_axis: np.ndarray
    values: np.ndarray
    t: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x_axis", _check_axis(self.x_axis, "x"))
        object.__setattr__(self, "p_axis", _check_axis(self.p_axis, "p"))
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (len(self.x_axis), len(self.p_axis)):
            raise KvhError(f"values shape {v.shape} does not match the axes")
        if not np.all(np.isfinite(v)):
            raise KvhError("grid values must be finite")
        object.__setattr__(self, "values", v)
        if not self.hbar > 0:
            raise KvhError("hbar must be positive")

    @property
    def dx(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0])

    @property
    def dp(self) -> float:
        return float(self.p_axis[1] - self.p_axis[0])

    def mesh(self):
        return np.meshgrid(self.x_axis, self.p_axis, indexing="ij")

    def with_values(self, values, t=None) -> "PhaseSpaceGrid":
        return PhaseSpaceGrid(self.x_axis, self.p_axis, values, self.t if t is None else t, self.hbar)

    def same_axes(self, other: "PhaseSpaceGrid") -> bool:
        return (self.x_axis.shape == other.x_axis.shape and self.p_axis.shape == other.p_axis.shape
                and np.array_equal(self.x_axis, other.x_axis) and np.array_equal(self.p_axis, other.p_axis))

    def to_bin(self, path):
        header = np.array([2, self.x_axis[0], self.x_axis[-1], len(self.x_axis),
                           self.p_axis[0], self.p_axis[-1], len(self.p_axis), self.t, self.hbar],
                          dtype="<f8")
        _write_bin(path, header, self.values)

    def to_csv(self, path):
        X, P = self.mesh()
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "p", "re", "im"])
            for x, p, v in zip(X.ravel(), P.ravel(), self.values.ravel()):
                w.writerow([f"{x:.16e}", f"{p:.16e}", f"{v.real:.16e}", f"{v.imag:.16e}"])


@dataclass(frozen=True)
class ConfigGrid:
    x_axis: np.ndarray
    values: np.ndarray
    t: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "x_axis", _check_axis(self.x_axis, "x"))
        v = np.asarray(self.values, dtype=complex)
        if v.shape != self.x_axis.shape:
            raise KvhError("values shape does not match the axis")
        if not np.all(np.isfinite(v)):
            raise KvhError("grid values must be finite")
        object.__setattr__(self, "values", v)
        if not self.hbar > 0:
            raise KvhError("hbar must be positive")

    @property
    def dx(self) -> float:
        return float(self.x_axis[1] - self.x_axis[0])

    def same_axis(self, other: "ConfigGrid") -> bool:
        return self.x_axis.shape == other.x_axis.shape and np.array_equal(self.x_axis, other.x_axis)

    def to_bin(self, path):
        header = np.array([1, self.x_axis[0], self.x_axis[-1], len(self.x_axis), self.t, self.hbar],
                          dtype="<f8")
        _write_bin(path, header, self.values)

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re", "im"])
            for x, v in zip(self.x_axis, self.values):
                w.writerow([f"{x:.16e}", f"{v.real:.16e}", f"{v.imag:.16e}"])


def _write_bin(path, header, values):
    payload = np.empty(values.size * 2, dtype="<f8")
    flat = np.ascontiguousarray(values).ravel()
    payload[0::2] = flat.real
    payload[1::2] = flat.imag
    with open(path, "wb") as fh:
        fh.write(header.tobytes())
        fh.write(payload.tobytes())


def read_bin(path):
    """Read a grid written by ``to_bin``; returns a PhaseSpaceGrid or ConfigGrid."""
    raw = np.fromfile(path, dtype="<f8")
    if raw.size < 1:
        raise KvhError(f"{path}: empty grid file")
    ndim = int(raw[0])
    if ndim == 2:
        x0, x1, nx, p0, p1, n_p, t, hbar = raw[1:9]
        nx, n_p = int(nx), int(n_p)
        body = raw[9:]
        if body.size != 2 * nx * n_p:
            raise KvhError(f"{path}: payload size does not match the header")
        vals = (body[0::2] + 1j * body[1::2]).reshape(nx, n_p)
        return PhaseSpaceGrid(axis(x0, x1, nx), axis(p0, p1, n_p), vals, float(t), float(hbar))
    if ndim == 1:
        x0, x1, nx, t, hbar = raw[1:6]
        nx = int(nx)
        body = raw[6:]
        if body.size != 2 * nx:
            raise KvhError(f"{path}: payload size does not match the header")
        return ConfigGrid(axis(x0, x1, nx), body[0::2] + 1j * body[1::2], float(t), float(hbar))
    raise KvhError(f"{path}: unknown grid rank {ndim}")


def require_same_axes(a, b):
    ok = a.same_axes(b) if isinstance(a, PhaseSpaceGrid) else a.same_axis(b)
    if not ok:
        raise AxisMismatch("grids are sampled on different axes")


# initial states


def gaussian_state(x_axis, p_axis, x0: float, p0: float, sx: float, sp: float, hbar: float = 1.0,
                   t: float = 0.0) -> PhaseSpaceGrid:
    """Real Gaussian blob with ``|psi|**2`` of standard deviations ``(sx, sp)``
    and unit phase-space norm."""
    if not (sx > 0 and sp > 0):
        raise ValueError("widths must be positive")
    X, P = np.meshgrid(np.asarray(x_axis, dtype=float), np.asarray(p_axis, dtype=float), indexing="ij")
    vals = np.exp(-((X - x0) ** 2) / (4 * sx * sx) - ((P - p0) ** 2) / (4 * sp * sp))
    vals = vals / math.sqrt(2 * math.pi * sx * sp)
    return PhaseSpaceGrid(x_axis, p_axis, vals, t, hbar)


def product_state(x_axis, p_axis, g, k: float, p_center: float = 0.0, a: float = 1.0,
                  hbar: float = 1.0, t: float = 0.0) -> PhaseSpaceGrid:
    """``g(x) G^a_k(p - p_center)``."""
    gx = np.asarray(g(np.asarray(x_axis, dtype=float)), dtype=complex)
    gp = delta_gaussian(a, k, np.asarray(p_axis, dtype=float) - p_center)
    return PhaseSpaceGrid(x_axis, p_axis, gx[:, None] * gp[None, :], t, hbar)


RIDGE_SPAN = 12.0


def eigen_ridge(eig: SemiclassicalEigenfunction, x_axis, p_axis, k: float, semiclassical: bool = False,
                t: float = 0.0, min_cells: float = 6.0) -> PhaseSpaceGrid:
    """Finite-width model of a phase-space eigenfunction.

    The standard ridge is ``a+ G^(1/2)_k(J - J0) e^(i phase)`` with unit
    phase-space norm. The semiclassical ridge is
    ``a+ G^1_k(J - J0) |dJ/dp|**0.5 e^(i phase)``, whose momentum integral
    reproduces the configuration-space eigenfunction. Phases are the fixed
    ``J0`` branch phases. The ridge's full width in ``J`` is ``4/k``.
    """
    chart = eig.chart
    well = chart.well
    x_axis = np.asarray(x_axis, dtype=float)
    p_axis = np.asarray(p_axis, dtype=float)
    X, P = np.meshgrid(x_axis, p_axis, indexing="ij")
    half = RIDGE_SPAN * 4.0 / k
    J = action_field(well, X, P, chart.J - half, chart.J + half)
    live = np.isfinite(J)
    dJ = np.where(live, J - chart.J, 0.0)
    a = 1.0 if semiclassical else 0.5
    env = np.where(live, delta_gaussian(a, k, dJ), 0.0)
    phase = chart_phase(eig, X, P)
    vals = eig.a_plus * env * phase
    if semiclassical:
        vals = vals * np.sqrt(np.abs(P) / (well.m * chart.omega))
    # ridge thickness in p where it is thinnest (largest |p|)
    p_top = math.sqrt(2 * well.m * (chart.E - well.U_min))
    width_p = (4.0 / k) * well.m * chart.omega / max(p_top, 1e-300)
    dp = p_axis[1] - p_axis[0]
    if width_p < min_cells * dp:
        warnings.warn(f"ridge spans {width_p / dp:.1f} momentum cells (< {min_cells}); raise resolution "
                      "or lower k", RuntimeWarning)
    return PhaseSpaceGrid(x_axis, p_axis, vals, t, well.hbar)
