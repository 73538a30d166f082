"""Semi-Lagrangian propagation of gridded wavefunctions along Hamiltonian
characteristics, and projection of semiclassical phase-space solutions to
configuration space."""

from __future__ import annotations

import enum
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.ndimage import map_coordinates

from .characteristics import CAUSTIC_PHASE, FlowMap, flow_map, integrate
from .errors import BoundaryLeak, CausticUnresolved, OutOfDomain
from .grids import ConfigGrid, PhaseSpaceGrid
from .systems import HamiltonianField

BOUNDARY_TOL = 1e-10


class PropagatorKind(enum.Enum):
    SCALAR = "scalar"
    LVE = "lve"
    KVN = "kvn"
    KVH_PS = "kvh-ps"
    KVH_SC = "kvh-sc"

    @classmethod
    def parse(cls, name) -> "PropagatorKind":
        if isinstance(name, cls):
            return name
        key = str(name).lower().replace("_", "-")
        aliases = {"kvhphasespace": "kvh-ps", "kvh": "kvh-ps", "kvhsemiclassical": "kvh-sc"}
        key = aliases.get(key.replace("-", ""), key)
        for k in cls:
            if k.value == key:
                return k
        raise ValueError(f"unknown propagator kind {name!r}; choose from {[k.value for k in cls]}")


@dataclass(frozen=True)
class PropagationInfo:
    """Diagnostics of one propagation step."""

    max_det_deviation: float
    steps: int
    crossings: Optional[tuple] = None


def _box(grid: PhaseSpaceGrid, inflate: float):
    xs, ps = grid.x_axis, grid.p_axis
    wx = (xs[-1] - xs[0]) * inflate
    wp = (ps[-1] - ps[0]) * inflate
    return xs[0] - wx, xs[-1] + wx, ps[0] - wp, ps[-1] + wp


def _check_box(box, x, p):
    x_lo, x_hi, p_lo, p_hi = box
    bad = (x < x_lo) | (x > x_hi) | (p < p_lo) | (p > p_hi)
    if np.any(bad):
        i = np.flatnonzero(np.ravel(bad))[0]
        loc = (float(np.ravel(x)[i]), float(np.ravel(p)[i]))
        raise OutOfDomain(f"characteristic leaves the validity box {box} near {loc}", location=loc)


def _trial_excursions(field, grid, t0, t1, box):
    xs, ps = grid.x_axis, grid.p_axis
    for x in (xs[0], 0.5 * (xs[0] + xs[-1]), xs[-1]):
        for p in (ps[0], 0.5 * (ps[0] + ps[-1]), ps[-1]):
            if x == 0.5 * (xs[0] + xs[-1]) and p == 0.5 * (ps[0] + ps[-1]):
                continue
            tr = integrate(field, (x, p), t1, t0)
            _check_box(box, tr.x, tr.p)


def _chunked_flow(field, X, P, t_from, t_to, threads, **kw) -> FlowMap:
    if threads <= 1 or X.size < 2 * threads:
        return flow_map(field, X, P, t_from, t_to, **kw)
    xs = np.array_split(X.ravel(), threads)
    ps = np.array_split(P.ravel(), threads)
    slope = kw.pop("caustic_slope", None)
    slopes = [None] * threads if slope is None else np.array_split(np.ravel(slope), threads)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(lambda a: flow_map(field, a[0], a[1], t_from, t_to, caustic_slope=a[2], **kw),
                              zip(xs, ps, slopes)))

    def cat(name):
        vals = [getattr(f, name) for f in parts]
        if vals[0] is None:
            return None
        return np.concatenate(vals, axis=0).reshape(X.shape + vals[0].shape[1:])

    return FlowMap(x=cat("x"), p=cat("p"), action=cat("action"), tangent=cat("tangent"),
                   crossings=cat("crossings"), ambiguous=cat("ambiguous"),
                   n_steps=max(f.n_steps for f in parts))


def interpolate(grid: PhaseSpaceGrid, x, p, order: int = 3):
    """Spline interpolation of the grid at ``(x, p)``, zero outside the axes."""
    ix = (np.asarray(x) - grid.x_axis[0]) / grid.dx
    ip = (np.asarray(p) - grid.p_axis[0]) / grid.dp
    coords = np.array([ix.ravel(), ip.ravel()])
    re = map_coordinates(grid.values.real, coords, order=order, mode="grid-constant", cval=0.0)
    im = map_coordinates(grid.values.imag, coords, order=order, mode="grid-constant", cval=0.0)
    return (re + 1j * im).reshape(np.shape(x))


def propagate(field: HamiltonianField, grid: PhaseSpaceGrid, t1: float, kind="kvh-ps", order: int = 3,
              rtol: float = 1e-10, atol: float = 1e-12, validity_box=None, box_inflate: float = 1.0,
              trial: bool = True, threads: int = 1, return_info: bool = False):
    """Evolve ``grid`` from ``grid.t`` to ``t1`` by backward characteristic tracing.

    Each node ``z`` is traced back to ``z0``, the initial grid is
    interpolated there and the kernel weight of ``kind`` is applied:
    scalar 1, LVE ``|det dz0/dz|``, KvN ``(det dz0/dz)**0.5``, KvH phase
    space ``exp(i dS/hbar) (det dz0/dz)**0.5`` and semiclassical KvH
    ``exp(i dS/hbar) det(dz0/dz) (dx/dx0|p0)**0.5``. The last square root
    takes the branch ``exp(-i pi/2)`` per caustic crossed going forward.

    Raises
    ------
    OutOfDomain
        If a characteristic leaves the validity box (the grid box inflated by
        ``box_inflate`` spans on each side unless ``validity_box`` is given).
    CausticUnresolved
        If a semiclassical weight sits on a caustic at ``t1``.
    """
    kind = PropagatorKind.parse(kind)
    t0 = grid.t
    if t1 == t0:
        out = PhaseSpaceGrid(grid.x_axis, grid.p_axis, grid.values.copy(), t0, grid.hbar)
        info = PropagationInfo(0.0, 0, None)
        return (out, info) if return_info else out
    box = validity_box if validity_box is not None else _box(grid, box_inflate)
    if trial:
        _trial_excursions(field, grid, t0, t1, box)
    X, P = grid.mesh()
    back = _chunked_flow(field, X, P, t1, t0, threads, rtol=rtol, atol=atol)
    _check_box(box, back.x, back.p)
    N = back.tangent
    det = N[..., 0, 0] * N[..., 1, 1] - N[..., 0, 1] * N[..., 1, 0]
    dS = -back.action
    psi0 = interpolate(grid, back.x, back.p, order)
    crossings = None
    if kind is PropagatorKind.SCALAR:
        w = np.ones_like(det)
    elif kind is PropagatorKind.LVE:
        w = np.abs(det)
    elif kind is PropagatorKind.KVN:
        w = np.sqrt(det + 0j)
    elif kind is PropagatorKind.KVH_PS:
        w = np.exp(1j * dS / grid.hbar) * np.sqrt(det + 0j)
    else:
        fwd = _chunked_flow(field, back.x, back.p, t0, t1, threads, rtol=rtol, atol=atol,
                            track_caustics=True)
        if np.any(fwd.ambiguous & (psi0 != 0)):
            i = np.flatnonzero((fwd.ambiguous & (psi0 != 0)).ravel())[0]
            loc = (float(X.ravel()[i]), float(P.ravel()[i]))
            raise CausticUnresolved(f"node {loc} lies on a caustic at t={t1}; square-root branch is ambiguous",
                                    location=loc)
        # forward dx/dx0|p0 equals backward dp0/dp|x
        m00 = N[..., 1, 1] / det
        sgn = 1.0 if t1 > t0 else -1.0
        branch = np.exp(1j * CAUSTIC_PHASE * sgn * fwd.crossings)
        w = np.exp(1j * dS / grid.hbar) * det * np.sqrt(np.abs(m00)) * branch
        crossings = (int(fwd.crossings.min()), int(fwd.crossings.max()))
    out = PhaseSpaceGrid(grid.x_axis, grid.p_axis, psi0 * w, t1, grid.hbar)
    info = PropagationInfo(float(np.max(np.abs(det - 1))), back.n_steps, crossings)
    return (out, info) if return_info else out


def check_boundary_decay(grid: PhaseSpaceGrid, tol: float = BOUNDARY_TOL):
    """Raise BoundaryLeak unless ``|psi|`` on the momentum edges is below
    ``tol`` times the grid maximum."""
    peak = float(np.max(np.abs(grid.values)))
    if peak == 0:
        return
    edge = max(float(np.max(np.abs(grid.values[:, 0]))), float(np.max(np.abs(grid.values[:, -1]))))
    if edge > tol * peak:
        raise BoundaryLeak(f"|psi| at the momentum boundary is {edge / peak:.3e} of its peak (> {tol:g})")


def project_to_config(grid: PhaseSpaceGrid, tol: float = BOUNDARY_TOL) -> ConfigGrid:
    """``psi(x) = integral of psi_SC(x, p) dp`` by the trapezoid rule."""
    check_boundary_decay(grid, tol)
    vals = np.trapezoid(grid.values, grid.p_axis, axis=1)
    return ConfigGrid(grid.x_axis, vals, grid.t, grid.hbar)


@dataclass(frozen=True)
class ConfigPropagation:
    """Result of :func:`propagate_config`.

    ``image_x`` holds the forward images of the initial nodes and
    ``jacobian`` the values of ``dx/dx0`` there.
    """

    grid: ConfigGrid
    image_x: np.ndarray
    jacobian: np.ndarray
    action: np.ndarray


def propagate_config(field: HamiltonianField, psi0: ConfigGrid, p0_field: Callable, t1: float,
                     rtol: float = 1e-10, atol: float = 1e-12, x_axis: Optional[Sequence[float]] = None
                     ) -> ConfigPropagation:
    """Single-branch configuration-space propagation.

    Characteristics start at ``(x0, p0(x0))`` and carry
    ``psi(t0, x0) exp(i dS/hbar) |dx0/dx|**0.5``. The image is resampled onto
    ``x_axis`` (default: a uniform axis over the image with the same count).

    Raises
    ------
    CausticReached
        If ``dx/dx0`` vanishes at or before ``t1``.
    """
    t0 = psi0.t
    xs = psi0.x_axis
    if t1 == t0:
        out = ConfigGrid(xs, psi0.values.copy(), t0, psi0.hbar)
        return ConfigPropagation(out, xs.copy(), np.ones_like(xs), np.zeros_like(xs))
    p0 = np.asarray(p0_field(xs), dtype=float) * np.ones_like(xs)
    h = 1e-6 * max(1.0, float(np.max(np.abs(xs))))
    slope = (np.asarray(p0_field(xs + h), dtype=float) - np.asarray(p0_field(xs - h), dtype=float)) / (2 * h)
    slope = slope * np.ones_like(xs)
    fm = flow_map(field, xs, p0, t0, t1, rtol=rtol, atol=atol, caustic_slope=slope, stop_on_caustic=True)
    jac = fm.tangent[:, 0, 0] + slope * fm.tangent[:, 0, 1]
    vals = psi0.values * np.exp(1j * fm.action / psi0.hbar) / np.sqrt(np.abs(jac))
    xi = fm.x
    order = np.argsort(xi)
    xi_s, v_s = xi[order], vals[order]
    target = np.linspace(xi_s[0], xi_s[-1], len(xs)) if x_axis is None else np.asarray(x_axis, dtype=float)
    re = CubicSpline(xi_s, v_s.real)(target)
    im = CubicSpline(xi_s, v_s.imag)(target)
    inside = (target >= xi_s[0]) & (target <= xi_s[-1])
    out = ConfigGrid(target, np.where(inside, re + 1j * im, 0.0), t1, psi0.hbar)
    return ConfigPropagation(out, xi, jac, fm.action)
