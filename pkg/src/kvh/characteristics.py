"""Characteristic curves: Hamilton's equations integrated together with the
accumulated action and the 2x2 tangent map."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np
from scipy.integrate import DOP853, solve_ivp
from scipy.optimize import brentq

from .errors import CausticReached, StepFailure
from .systems import HamiltonianField, SeparableWell

# stationary-phase branch shift of sqrt(dx/dx0) per caustic crossing
CAUSTIC_PHASE = -math.pi / 2

_CAUSTIC_TIME_TOL = 1e-8


@dataclass(frozen=True)
class TrajectoryPoint:
    t: float
    x: float
    p: float
    action: float
    tangent: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    """Samples of one characteristic at the integrator's accepted steps.

    ``caustic_times`` holds the refined times at which the tangent entry
    ``dx/dx0`` changed sign.
    """

    t: np.ndarray
    x: np.ndarray
    p: np.ndarray
    action: np.ndarray
    tangent: np.ndarray
    field_id: str = "field"
    caustic_times: tuple = ()

    def __len__(self):
        return len(self.t)

    @property
    def points(self) -> List[TrajectoryPoint]:
        return [TrajectoryPoint(float(self.t[i]), float(self.x[i]), float(self.p[i]),
                                float(self.action[i]), self.tangent[i].copy())
                for i in range(len(self.t))]

    @property
    def final(self) -> TrajectoryPoint:
        return TrajectoryPoint(float(self.t[-1]), float(self.x[-1]), float(self.p[-1]),
                               float(self.action[-1]), self.tangent[-1].copy())

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "x", "p", "S", "M00", "M01", "M10", "M11"])
            for i in range(len(self.t)):
                M = self.tangent[i]
                w.writerow([f"{v:.16e}" for v in (self.t[i], self.x[i], self.p[i], self.action[i],
                                                   M[0, 0], M[0, 1], M[1, 0], M[1, 1])])

    @classmethod
    def from_csv(cls, path, field_id="field"):
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(t=data[:, 0], x=data[:, 1], p=data[:, 2], action=data[:, 3],
                   tangent=data[:, 4:8].reshape(-1, 2, 2), field_id=field_id)


def _rhs(field: HamiltonianField):
    def f(t, y):
        x, p, _, m00, m01, m10, m11 = y
        hx = field.dh_dx(t, x, p)
        hp = field.dh_dp(t, x, p)
        h = field.h(t, x, p)
        hxx, hxp, hpp = field.second_derivatives(t, x, p)
        return np.array([
            hp,
            -hx,
            p * hp - h,
            hxp * m00 + hpp * m10,
            hxp * m01 + hpp * m11,
            -hxx * m00 - hxp * m10,
            -hxx * m01 - hxp * m11,
        ])

    return f


def integrate(field: HamiltonianField, z0, t0: float, t1: float, rtol: float = 1e-10,
              atol: float = 1e-12, max_step: float = np.inf) -> Trajectory:
    """Integrate ``(x, p, S, M)`` from ``t0`` to ``t1`` (either direction).

    Raises
    ------
    StepFailure
        If the adaptive controller cannot take a step above the floating
        point spacing.
    """
    x0, p0 = float(z0[0]), float(z0[1])
    y0 = np.array([x0, p0, 0.0, 1.0, 0.0, 0.0, 1.0])
    if t1 == t0:
        return Trajectory(t=np.array([t0]), x=np.array([x0]), p=np.array([p0]),
                          action=np.zeros(1), tangent=np.eye(2)[None].copy(),
                          field_id=field.name)

    def m00(t, y):
        return y[3]

    sol = solve_ivp(_rhs(field), (t0, t1), y0, method="DOP853", rtol=rtol, atol=atol,
                    max_step=max_step, events=m00)
    if sol.status == -1:
        last = float(sol.t[-1]) if len(sol.t) else t0
        raise StepFailure(f"integration failed: {sol.message}", last_time=last)
    Y = sol.y
    return Trajectory(t=sol.t, x=Y[0], p=Y[1], action=Y[2],
                      tangent=Y[3:7].T.reshape(-1, 2, 2).copy(), field_id=field.name,
                      caustic_times=tuple(float(s) for s in sol.t_events[0]))


def _yoshida_coefficients():
    w1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
    w0 = -(2.0 ** (1.0 / 3.0)) * w1
    c = [w1 / 2, (w0 + w1) / 2, (w0 + w1) / 2, w1 / 2]
    d = [w1, w0, w1]
    return c, d


def integrate_splitting(well: SeparableWell, z0, t0: float, t1: float, n_steps: int) -> Trajectory:
    """Fixed-step 4th-order symplectic (Yoshida) integrator for separable
    wells. Independent of :func:`integrate`; used as its cross-check."""
    c, d = _yoshida_coefficients()
    m = well.m
    h = (t1 - t0) / n_steps
    x, p = float(z0[0]), float(z0[1])
    S = 0.0
    M = np.eye(2)
    ts, xs, ps, Ss, Ms = [t0], [x], [p], [S], [M.copy()]
    for k in range(n_steps):
        for i in range(4):
            tau = c[i] * h
            S += p * p / (2 * m) * tau
            x += p / m * tau
            M = np.array([[1.0, tau / m], [0.0, 1.0]]) @ M
            if i < 3:
                tau = d[i] * h
                S -= float(well.U(x)) * tau
                p -= float(well.dU_dx(x)) * tau
                M = np.array([[1.0, 0.0], [-float(well.curvature(x)) * tau, 1.0]]) @ M
        ts.append(t0 + (k + 1) * h)
        xs.append(x)
        ps.append(p)
        Ss.append(S)
        Ms.append(M.copy())
    return Trajectory(t=np.array(ts), x=np.array(xs), p=np.array(ps), action=np.array(Ss),
                      tangent=np.array(Ms), field_id=well.name)


@dataclass(frozen=True)
class VanVleckFactor:
    values: np.ndarray
    caustic_indices: np.ndarray
    sign_changes: int


def van_vleck_factor(traj: Trajectory, zero_tol: float = 1e-8) -> VanVleckFactor:
    """``|dx/dx0|_{p0}|**0.5`` per point, with caustic markers.

    A point is a caustic marker when the entry is zero within ``zero_tol``
    or has changed sign since the previous point.
    """
    m00 = traj.tangent[:, 0, 0]
    values = np.sqrt(np.abs(m00))
    s = np.sign(m00)
    changed = np.zeros(len(m00), dtype=bool)
    changed[1:] = (s[1:] * s[:-1]) < 0
    marked = changed | (np.abs(m00) <= zero_tol)
    return VanVleckFactor(values=values, caustic_indices=np.flatnonzero(marked),
                          sign_changes=int(np.count_nonzero(changed)))


def maslov_count(traj: Trajectory, zero_tol: float = 1e-8) -> int:
    """Number of caustic crossings (zeros of ``dx/dx0``) in ``(t0, t_end]``."""
    if len(traj) < 2 or traj.t[-1] == traj.t[0]:
        return 0
    t0, t_end = traj.t[0], traj.t[-1]
    times = [t for t in traj.caustic_times if abs(t - t0) > _CAUSTIC_TIME_TOL]
    if not traj.caustic_times:
        m00 = traj.tangent[:, 0, 0]
        s = np.sign(m00)
        idx = np.flatnonzero((s[1:] * s[:-1]) < 0)
        times = [float(traj.t[i + 1]) for i in idx]
    end_zero = abs(traj.tangent[-1, 0, 0]) <= zero_tol
    if end_zero and not any(abs(t - t_end) <= _CAUSTIC_TIME_TOL for t in times):
        times.append(float(t_end))
    return len(times)


@dataclass(frozen=True)
class FlowMap:
    """Batched characteristic map from ``t0`` to ``t1``.

    ``crossings`` counts sign changes of ``dx/dx0`` along each trajectory and
    ``ambiguous`` marks trajectories whose crossing count cannot be resolved
    at the step resolution (tangency or a caustic at the final time).
    """

    x: np.ndarray
    p: np.ndarray
    action: np.ndarray
    tangent: np.ndarray
    crossings: Optional[np.ndarray] = None
    ambiguous: Optional[np.ndarray] = None
    n_steps: int = 0


def flow_map(field: HamiltonianField, x, p, t0: float, t1: float, rtol: float = 1e-10,
             atol: float = 1e-12, track_caustics: bool = False, zero_tol: float = 1e-9,
             max_steps: int = 1_000_000, caustic_slope=None, stop_on_caustic: bool = False) -> FlowMap:
    """Integrate many characteristics at once with the same 8(5,3) scheme
    used by :func:`integrate`.

    Caustics are zeros of ``D = M00 + s M01`` with ``s = caustic_slope``
    (zero by default), i.e. of ``dx/dx0`` along the initial curve
    ``p0 = p0(x0)`` of slope ``s``.

    Raises
    ------
    CausticReached
        With ``stop_on_caustic``, at the first time any ``D`` vanishes.
    """
    if stop_on_caustic:
        track_caustics = True
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    shape = x.shape
    n = x.size
    if t1 == t0:
        eye = np.broadcast_to(np.eye(2), shape + (2, 2)).copy()
        zeros = np.zeros(shape, dtype=int)
        return FlowMap(x=x.copy(), p=p.copy(), action=np.zeros(shape), tangent=eye,
                       crossings=zeros if track_caustics else None,
                       ambiguous=zeros.astype(bool) if track_caustics else None)
    y0 = np.empty((7, n))
    y0[0] = x.ravel()
    y0[1] = p.ravel()
    y0[2] = 0.0
    y0[3], y0[4], y0[5], y0[6] = 1.0, 0.0, 0.0, 1.0
    f = _rhs(field)

    def fun(t, y):
        return f(t, y.reshape(7, n)).ravel()

    slope = np.zeros(n) if caustic_slope is None else np.broadcast_to(
        np.asarray(caustic_slope, dtype=float), shape).ravel()

    def D(y):
        y = y.reshape(7, n)
        return y[3] + slope * y[4]

    solver = DOP853(fun, t0, y0.ravel(), t1, rtol=rtol, atol=atol)
    crossings = np.zeros(n, dtype=int) if track_caustics else None
    ambiguous = np.zeros(n, dtype=bool) if track_caustics else None
    prev = D(y0)
    steps = 0
    while solver.status == "running":
        msg = solver.step()
        steps += 1
        if solver.status == "failed":
            raise StepFailure(f"batched integration failed: {msg}", last_time=solver.t)
        if steps > max_steps:
            raise StepFailure("step budget exhausted", last_time=solver.t)
        if track_caustics:
            cur = D(solver.y)
            flip = (np.sign(cur) * np.sign(prev)) < 0
            dense = solver.dense_output()
            mid = D(dense(0.5 * (solver.t_old + solver.t)))
            # two crossings inside one step leave the end signs equal
            double = (~flip) & (np.sign(mid) * np.sign(cur) < 0)
            if stop_on_caustic and np.any(flip | double):
                raise CausticReached("characteristics focus before the requested time",
                                     time=_first_zero(dense, D, solver.t_old, solver.t, flip | double))
            crossings += flip.astype(int) + 2 * double.astype(int)
            prev = cur
    Y = solver.y.reshape(7, n)
    if track_caustics:
        ambiguous |= np.abs(D(Y)) <= zero_tol
        if stop_on_caustic and np.any(ambiguous):
            raise CausticReached("characteristics focus at the requested time", time=float(t1))
    tangent = Y[3:7].T.reshape(shape + (2, 2))
    return FlowMap(x=Y[0].reshape(shape), p=Y[1].reshape(shape), action=Y[2].reshape(shape),
                   tangent=tangent,
                   crossings=None if crossings is None else crossings.reshape(shape),
                   ambiguous=None if ambiguous is None else ambiguous.reshape(shape),
                   n_steps=steps)


def _first_zero(dense, D, ta, tb, which):
    """Earliest time in ``[ta, tb]`` at which ``D`` vanishes for a flagged node."""
    grid = np.linspace(ta, tb, 33)
    vals = np.array([D(dense(t))[which] for t in grid])
    best = tb
    for j in range(vals.shape[1]):
        col = vals[:, j]
        idx = np.flatnonzero(np.sign(col[1:]) * np.sign(col[:-1]) <= 0)
        if len(idx) == 0:
            continue
        i = idx[0]
        if col[i] == 0:
            best = min(best, grid[i])
            continue
        sel = np.flatnonzero(which)[j]
        root = brentq(lambda t: D(dense(t))[sel], grid[i], grid[i + 1], xtol=1e-12)
        best = min(best, root)
    return float(best)
