"""Action-angle charts, Bohr-Sommerfeld / EBK quantization and JWKB
eigenfunctions of a single well, in phase space and configuration space.

Phase convention
----------------
With ``W+(x)`` the action from ``x`` to the right turning point and ``W-(x)``
the action from the left turning point to ``x`` (``W- + W+ = pi J``), the
EBK branch amplitudes are::

    p > 0 :  a+ exp(i(-W+/hbar + pi/4))  ==  a- exp(i(W-/hbar - pi/4))
    p < 0 :  a+ exp(i( W+/hbar - pi/4))

with ``a- = (-1)**n a+``. The phase gradient equals the branch momentum and
each turning point, traversed clockwise, lowers the phase by ``pi/2``. In the
forbidden region the amplitude is ``a+ exp(-Wt/hbar)`` on the right and
``(-1)**n a+ exp(-Wt/hbar)`` on the left. Bohr-Sommerfeld states drop the
``pi/4`` offsets.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from .errors import (ActionOutOfRange, InsideAllowedRegion, KvhError,
                     OutsideAllowedRegion, RegionMismatch)
from .quadrature import sin2_quad
from .systems import SeparableWell, turning_points

EBK = "ebk"
BS = "bs"
SCHEMES = (EBK, BS)

MASLOV_SINGLE_WELL = 2

ALLOWED, FORBIDDEN, WINDOW = 0, 1, 2
REGION_NAMES = {ALLOWED: "allowed", FORBIDDEN: "forbidden", WINDOW: "window"}

# a+ conventions: stationary-phase unit norm, numeric norm outside the Airy
# windows, or the bare a+ = 1
NORMALIZATIONS = ("semiclassical", "windowed", "unit")

DEFAULT_WINDOW = 2.0


def _scheme(scheme: str) -> str:
    s = str(scheme).lower()
    if s not in SCHEMES:
        raise ValueError(f"unknown quantization scheme {scheme!r}; use 'ebk' or 'bs'")
    return s


def _speed(well: SeparableWell, E, x):
    return np.sqrt(np.maximum(2 * well.m * (E - np.asarray(well.U(x), dtype=float)), 0.0))


def _evanescent(well: SeparableWell, E, x):
    return np.sqrt(np.maximum(2 * well.m * (np.asarray(well.U(x), dtype=float) - E), 0.0))


def _action_and_period(well: SeparableWell, E: float):
    lo, hi = turning_points(well, E)
    J = sin2_quad(lambda x: _speed(well, E, x), lo, hi) / math.pi

    def inv(x):
        s = _speed(well, E, x)
        return np.where(s > 0, well.m / np.where(s > 0, s, 1.0), 0.0)

    # cancellation in E - U near the turning points limits this integrand to ~1e-12
    T = 2 * sin2_quad(inv, lo, hi, rtol=1e-11)
    return J, T, lo, hi


def action_of_energy(well: SeparableWell, E: float) -> float:
    """``J(E) = (1/pi) * integral of |p| between the turning points``."""
    E = float(E)
    if E == well.U_min:
        return 0.0
    return _action_and_period(well, E)[0]


def period_of_energy(well: SeparableWell, E: float) -> float:
    """Orbit period ``T(E) = closed integral of dx / xdot``."""
    return _action_and_period(well, float(E))[1]


def _small_oscillation_omega(well: SeparableWell) -> float:
    c = float(well.curvature(np.array(well.x_min)))
    return math.sqrt(c / well.m) if c > 0 else 0.0


def _max_energy(well: SeparableWell) -> float:
    return well.U_min + (well.barrier - well.U_min) * (1 - 1e-9)


def max_action(well: SeparableWell) -> float:
    """Largest action whose orbit fits inside the well's domain."""
    return action_of_energy(well, _max_energy(well))


def energy_of_action(well: SeparableWell, J: float) -> Tuple[float, float]:
    """Invert ``J(E)``; returns ``(E, omega)`` with ``omega = 2 pi / T``.

    Newton steps use ``dJ/dE = 1/omega`` and stay inside a shrinking bracket;
    Brent's method takes over if Newton stalls.
    """
    J = float(J)
    if J < 0 or not math.isfinite(J):
        raise ActionOutOfRange(f"action must be finite and non-negative, got {J}")
    if J == 0:
        return well.U_min, _small_oscillation_omega(well)
    lo_E, hi_E = well.U_min, _max_energy(well)
    J_hi, T_hi, _, _ = _action_and_period(well, hi_E)
    if J > J_hi:
        raise ActionOutOfRange(f"J={J} exceeds the largest bound action {J_hi:.6g} on the domain")
    w0 = _small_oscillation_omega(well)
    E = well.U_min + J * w0 if w0 > 0 else well.U_min + J * 2 * math.pi / T_hi
    E = min(max(E, lo_E + 1e-300), hi_E)
    tol = 1e-14 * max(J, 1e-300)
    for _ in range(60):
        Jc, T, _, _ = _action_and_period(well, E)
        r = Jc - J
        if abs(r) <= tol:
            return E, 2 * math.pi / T
        if r > 0:
            hi_E = E
        else:
            lo_E = E
        step = -r * 2 * math.pi / T
        E_new = E + step
        if not lo_E < E_new < hi_E:
            E_new = 0.5 * (lo_E + hi_E)
        if E_new == E:
            break
        E = E_new
    E = brentq(lambda e: action_of_energy(well, e) - J, lo_E, hi_E, xtol=1e-300,
               rtol=4 * np.finfo(float).eps, maxiter=500)
    return E, 2 * math.pi / period_of_energy(well, E)


@dataclass(frozen=True)
class ActionAngleChart:
    """One invariant torus of a single well."""

    well: SeparableWell
    J: float
    E: float
    omega: float
    xi_minus: float
    xi_plus: float
    maslov: int = MASLOV_SINGLE_WELL

    @property
    def hbar(self) -> float:
        return self.well.hbar

    @property
    def well_id(self) -> str:
        return self.well.name

    @property
    def degenerate(self) -> bool:
        return self.J == 0

    def momentum(self, x):
        """``|p|`` on the torus (zero outside the allowed region)."""
        return _speed(self.well, self.E, x)

    def dp_dJ(self, x):
        """``|dp/dJ|`` at fixed ``x``, equal to ``m omega / |p|``; uses
        ``|Im p|`` in the forbidden region."""
        x = np.asarray(x, dtype=float)
        p = np.sqrt(np.abs(2 * self.well.m * (self.E - np.asarray(self.well.U(x), dtype=float))))
        with np.errstate(divide="ignore"):
            return self.well.m * self.omega / p

    def airy_lengths(self) -> Tuple[float, float]:
        """Airy length ``(hbar**2 / (m |U'(xi)|))**(1/3)`` at each turning point."""
        out = []
        for xi in (self.xi_minus, self.xi_plus):
            slope = abs(float(self.well.dU_dx(np.array(xi))))
            out.append((self.hbar ** 2 / (self.well.m * slope)) ** (1 / 3) if slope > 0 else math.inf)
        return out[0], out[1]

    def outside_windows(self, x, multiplier: float = DEFAULT_WINDOW):
        """True where ``x`` lies outside both turning-point exclusion windows."""
        x = np.asarray(x, dtype=float)
        dm, dp = self.airy_lengths()
        return (np.abs(x - self.xi_minus) > multiplier * dm) & (np.abs(x - self.xi_plus) > multiplier * dp)

    def region(self, x, multiplier: Optional[float] = DEFAULT_WINDOW):
        """Region code per point: ALLOWED, FORBIDDEN or WINDOW."""
        x = np.asarray(x, dtype=float)
        code = np.where((x >= self.xi_minus) & (x <= self.xi_plus), ALLOWED, FORBIDDEN)
        if multiplier:
            code = np.where(self.outside_windows(x, multiplier), code, WINDOW)
        return code

    def loop_phase_quanta(self) -> float:
        """``(2 pi J/hbar - maslov pi/2) / 2 pi``; an integer on EBK tori."""
        return (2 * math.pi * self.J / self.hbar - self.maslov * math.pi / 2) / (2 * math.pi)


def make_chart(well: SeparableWell, J: float) -> ActionAngleChart:
    E, omega = energy_of_action(well, J)
    if J == 0:
        lo = hi = well.x_min
    else:
        lo, hi = turning_points(well, E)
    return ActionAngleChart(well=well, J=float(J), E=E, omega=omega, xi_minus=lo, xi_plus=hi)


def chart_of_energy(well: SeparableWell, E: float) -> ActionAngleChart:
    J, T, lo, hi = _action_and_period(well, float(E))
    return ActionAngleChart(well=well, J=J, E=float(E), omega=2 * math.pi / T, xi_minus=lo, xi_plus=hi)


def hamilton_principal_W(chart: ActionAngleChart, x, branch: str = "plus"):
    """Action measured from a turning point.

    ``branch="minus"`` gives ``W-(x)`` from the left turning point and
    ``branch="plus"`` gives ``W+(x)`` up to the right one.

    Raises
    ------
    OutsideAllowedRegion
        If any ``x`` lies outside ``[xi_minus, xi_plus]``.
    """
    if branch not in ("plus", "minus"):
        raise ValueError("branch must be 'plus' or 'minus'")
    xa = np.asarray(x, dtype=float)
    if np.any((xa < chart.xi_minus) | (xa > chart.xi_plus)):
        raise OutsideAllowedRegion("W is defined between the turning points only")
    well, E = chart.well, chart.E

    def speed(y):
        return _speed(well, E, y)

    left = xa <= well.x_min
    half = math.pi * chart.J
    atol = 1e-15 * max(half, chart.hbar)
    w_minus = np.empty_like(xa)
    if np.any(left):
        w_minus[left] = sin2_quad(speed, chart.xi_minus, xa[left], atol=atol)
    if np.any(~left):
        # integrate from the nearer turning point only
        w_minus[~left] = half - sin2_quad(speed, xa[~left], chart.xi_plus, atol=atol)
    w_minus = np.clip(w_minus, 0.0, half)
    out = w_minus if branch == "minus" else half - w_minus
    return float(out) if out.ndim == 0 else out


def forbidden_action_Wtilde(chart: ActionAngleChart, x):
    """``|Im|`` action from the nearest turning point out to ``x``.

    Raises
    ------
    InsideAllowedRegion
        If any ``x`` lies strictly between the turning points.
    """
    xa = np.asarray(x, dtype=float)
    if np.any((xa > chart.xi_minus) & (xa < chart.xi_plus)):
        raise InsideAllowedRegion("Wtilde is defined outside the turning points only")
    well, E = chart.well, chart.E
    start = np.where(xa >= chart.xi_plus, chart.xi_plus, chart.xi_minus)
    out = sin2_quad(lambda y: _evanescent(well, E, y), start, xa, atol=1e-15 * max(chart.J, chart.hbar))
    out = np.abs(out)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class SemiclassicalEigenfunction:
    chart: ActionAngleChart
    scheme: str
    n: int
    a_plus: complex
    nu: int = 0
    normalization: str = "semiclassical"

    @property
    def degenerate(self) -> bool:
        return self.chart.degenerate

    @property
    def a_minus(self) -> complex:
        return (-1) ** self.n * self.a_plus

    @property
    def energy(self) -> float:
        return self.chart.E

    @property
    def offset(self) -> float:
        return math.pi / 4 if self.scheme == EBK else 0.0


def quantized_action(well: SeparableWell, scheme: str, n: int) -> float:
    scheme = _scheme(scheme)
    if n < 0 or int(n) != n:
        raise ValueError(f"quantum number must be a non-negative integer, got {n}")
    shift = MASLOV_SINGLE_WELL / 4 if scheme == EBK else 0.0
    return well.hbar * (int(n) + shift)


def quantize(well: SeparableWell, scheme: str, n: int, normalization: str = "semiclassical",
             x_axis=None) -> SemiclassicalEigenfunction:
    """Quantized JWKB eigenfunction ``J = hbar (n + maslov/4)`` (EBK) or
    ``J = hbar n`` (Bohr-Sommerfeld).

    ``normalization`` selects ``a+``: ``"semiclassical"`` gives
    ``1/sqrt(2 pi)``, the stationary-phase unit norm; ``"windowed"`` gives
    unit trapezoid norm on ``x_axis`` (default: 8001 points over the domain)
    outside the exclusion windows; ``"unit"`` gives ``a+ = 1``.
    """
    scheme = _scheme(scheme)
    J = quantized_action(well, scheme, n)
    chart = make_chart(well, J)
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}")
    eig = SemiclassicalEigenfunction(chart=chart, scheme=scheme, n=int(n), a_plus=1.0 + 0j,
                                     normalization=normalization)
    if normalization == "unit" or eig.degenerate:
        return eig
    if normalization == "semiclassical":
        a = 1 / math.sqrt(2 * math.pi)
    else:
        xs = np.linspace(*well.domain, 8001) if x_axis is None else np.asarray(x_axis, dtype=float)
        vals = eval_config_space(eig, xs).values
        good = np.isfinite(vals)
        mass = np.trapezoid(np.where(good, np.abs(vals) ** 2, 0.0), xs)
        a = 1 / math.sqrt(mass)
    return SemiclassicalEigenfunction(chart=chart, scheme=scheme, n=int(n), a_plus=a + 0j,
                                      normalization=normalization)


def _check_live(eig: SemiclassicalEigenfunction):
    if eig.degenerate:
        raise KvhError("the n=0 Bohr-Sommerfeld torus is a point; it has no eigenfunction")


def _left_sign(eig):
    return (-1) ** eig.n


def eval_phase_space(eig: SemiclassicalEigenfunction, x, branch: str):
    """Branch amplitude at ``x`` without the ``delta(J - J0)`` support.

    ``branch`` is ``"plus"`` (p > 0), ``"minus"`` (p < 0) or
    ``"forbidden"``.

    Raises
    ------
    RegionMismatch
        If the branch does not match the region of some ``x``.
    """
    _check_live(eig)
    c = eig.chart
    xa = np.asarray(x, dtype=float)
    inside = (xa >= c.xi_minus) & (xa <= c.xi_plus)
    hb = c.hbar
    if branch in ("plus", "minus"):
        if not np.all(inside):
            raise RegionMismatch(f"branch {branch!r} requested outside the allowed region")
        Wp = hamilton_principal_W(c, xa, "plus")
        sgn = -1.0 if branch == "plus" else 1.0
        out = eig.a_plus * np.exp(1j * sgn * (Wp / hb - eig.offset))
    elif branch == "forbidden":
        if np.any(inside & (xa != c.xi_minus) & (xa != c.xi_plus)):
            raise RegionMismatch("forbidden branch requested inside the allowed region")
        Wt = forbidden_action_Wtilde(c, xa)
        side = np.where(xa >= c.xi_plus, 1.0, _left_sign(eig))
        out = eig.a_plus * side * np.exp(-Wt / hb)
    else:
        raise ValueError("branch must be 'plus', 'minus' or 'forbidden'")
    return complex(out) if np.ndim(out) == 0 else out


def chart_phase(eig: SemiclassicalEigenfunction, x, p_sign):
    """Unit-modulus branch phase of the eigenfunction at fixed ``J0``,
    extended to any ``x`` by clamping to the turning points.

    Used to paint finite-width ridges, whose support reaches slightly past
    the turning points of ``J0``.
    """
    c = eig.chart
    xa = np.clip(np.asarray(x, dtype=float), c.xi_minus, c.xi_plus)
    xs, inv = np.unique(xa.ravel(), return_inverse=True)
    Wp = np.asarray(hamilton_principal_W(c, xs, "plus"))[inv].reshape(xa.shape)
    sgn = np.where(np.asarray(p_sign) > 0, -1.0, 1.0)
    return np.exp(1j * sgn * (Wp / c.hbar - eig.offset))


@dataclass(frozen=True)
class ConfigEvaluation:
    """Configuration-space values with per-point region codes.

    Points inside a turning-point exclusion window carry ``WINDOW`` and a
    NaN value.
    """

    x: np.ndarray
    values: np.ndarray
    region: np.ndarray

    def to_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re_phi", "im_phi", "region_flag"])
            for xi, v, r in zip(self.x, self.values, self.region):
                w.writerow([f"{xi:.16e}", f"{v.real:.16e}", f"{v.imag:.16e}", int(r)])


def eval_config_space(eig: SemiclassicalEigenfunction, x, window: Optional[float] = DEFAULT_WINDOW,
                      amplitude: bool = True) -> ConfigEvaluation:
    """Sum of both branches times ``|dp/dJ|**0.5`` (the Van Vleck factor).

    Parameters
    ----------
    window : float or None
        Exclusion-window multiplier of the Airy length; ``None`` evaluates
        everywhere.
    amplitude : bool
        Include the ``|dp/dJ|**0.5`` factor. Without it the allowed-side
        value at a turning point is finite, which exposes the ``sqrt 2``
        mismatch with the forbidden side.
    """
    _check_live(eig)
    c = eig.chart
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    inside = (xa >= c.xi_minus) & (xa <= c.xi_plus)
    vals = np.zeros(xa.shape, dtype=complex)
    hb = c.hbar
    if np.any(inside):
        Wp = hamilton_principal_W(c, xa[inside], "plus")
        vals[inside] = 2 * eig.a_plus * np.cos(Wp / hb - eig.offset)
    if np.any(~inside):
        Wt = forbidden_action_Wtilde(c, xa[~inside])
        side = np.where(xa[~inside] >= c.xi_plus, 1.0, _left_sign(eig))
        vals[~inside] = eig.a_plus * side * np.exp(-Wt / hb)
    region = c.region(xa, window)
    if amplitude:
        with np.errstate(invalid="ignore"):
            vals = vals * np.sqrt(c.dp_dJ(xa))
    if window:
        vals = np.where(region == WINDOW, np.nan + 0j, vals)
    return ConfigEvaluation(x=xa, values=vals, region=region)


@dataclass(frozen=True)
class SpectrumLine:
    sector: str
    index: int
    J: float
    value: float
    flag: str = ""


def spectrum(well: SeparableWell, scheme: str, n_max: int, include_classical: bool = False,
             nu_range: Tuple[int, int] = (-2, 2), classical_J: Optional[float] = None) -> List[SpectrumLine]:
    """Semiclassical levels ``(n, J_n, E_n)`` for ``n = 0..n_max``, optionally
    followed by classical-sector lines ``(nu, J0, nu omega(J0) hbar)``."""
    scheme = _scheme(scheme)
    if n_max < 0:
        raise ValueError("n_max must be non-negative")
    lines = []
    for n in range(int(n_max) + 1):
        J = quantized_action(well, scheme, n)
        E, _ = energy_of_action(well, J)
        lines.append(SpectrumLine("semiclassical", n, J, E, "degenerate" if J == 0 else ""))
    if include_classical:
        J0 = quantized_action(well, scheme, 0) if classical_J is None else float(classical_J)
        _, omega = energy_of_action(well, J0)
        lo, hi = nu_range
        for nu in range(int(lo), int(hi) + 1):
            lines.append(SpectrumLine("classical", nu, J0, nu * omega * well.hbar))
    return lines


def spectrum_to_csv(lines: List[SpectrumLine], path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["sector", "n_or_nu", "J", "E_or_freq", "flag"])
        for ln in lines:
            w.writerow([ln.sector, ln.index, f"{ln.J:.16e}", f"{ln.value:.16e}", ln.flag])


def spectrum_to_json(lines: List[SpectrumLine], path):
    rows = [{"sector": ln.sector, "n_or_nu": ln.index, "J": ln.J, "E_or_freq": ln.value,
             "flag": ln.flag} for ln in lines]
    with open(path, "w") as fh:
        json.dump(rows, fh, indent=1)
        fh.write("\n")


def action_field(well: SeparableWell, x, p, J_lo: float, J_hi: float, nodes: int = 257):
    """``J(x, p)`` for points whose action lies in ``[J_lo, J_hi]``; NaN
    elsewhere. Uses a cubic spline of ``J(E)`` across the energy band."""
    from scipy.interpolate import CubicSpline

    E = np.asarray(well.hamiltonian(np.asarray(x, dtype=float), np.asarray(p, dtype=float)), dtype=float)
    J_lo = max(float(J_lo), 0.0)
    J_hi = min(float(J_hi), max_action(well) * (1 - 1e-9))
    E_lo = energy_of_action(well, J_lo)[0]
    E_hi = energy_of_action(well, J_hi)[0]
    Es = np.linspace(E_lo, E_hi, nodes)
    Js = np.array([action_of_energy(well, e) for e in Es])
    Js[0], Js[-1] = J_lo, J_hi
    spline = CubicSpline(Es, Js)
    out = np.full(E.shape, np.nan)
    inside = (E >= E_lo) & (E <= E_hi)
    out[inside] = spline(E[inside])
    return out
