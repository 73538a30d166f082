"""1D Hamiltonian systems: analytic fields, single-well potentials and their
turning points and momentum branches."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import EnergyAboveWell, EnergyBelowWell, KvhError

_SCAN_SAMPLES = 256
_SINGLE_WELL_SAMPLES = 4097
_XTOL = 1e-15


@dataclass(frozen=True)
class HamiltonianField:
    """Analytic Hamiltonian ``H(t, x, p)`` with its first partials.

    The callables must accept numpy arrays and broadcast. ``hessian`` is
    optional; when given it returns ``(H_xx, H_xp, H_pp)`` and is used by the
    variational equations. Otherwise second derivatives are taken by central
    differences of ``dh_dx`` / ``dh_dp``.
    """

    h: Callable
    dh_dx: Callable
    dh_dp: Callable
    hbar: float = 1.0
    time_dependent: bool = False
    hessian: Optional[Callable] = None
    name: str = "field"

    def __post_init__(self):
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")

    def second_derivatives(self, t, x, p):
        if self.hessian is not None:
            return self.hessian(t, x, p)
        x = np.asarray(x, dtype=float)
        p = np.asarray(p, dtype=float)
        ex = 1e-5 * np.maximum(1.0, np.abs(x))
        ep = 1e-5 * np.maximum(1.0, np.abs(p))
        hxx = (self.dh_dx(t, x + ex, p) - self.dh_dx(t, x - ex, p)) / (2 * ex)
        hpp = (self.dh_dp(t, x, p + ep) - self.dh_dp(t, x, p - ep)) / (2 * ep)
        # one symmetric estimate for both mixed entries keeps the flow Jacobian traceless
        hxp = 0.5 * ((self.dh_dp(t, x + ex, p) - self.dh_dp(t, x - ex, p)) / (2 * ex)
                     + (self.dh_dx(t, x, p + ep) - self.dh_dx(t, x, p - ep)) / (2 * ep))
        return hxx, hxp, hpp


def lagrangian(field: HamiltonianField, t, x, p):
    """Phase-space Lagrangian ``p * dH/dp - H``."""
    return p * field.dh_dp(t, x, p) - field.h(t, x, p)


@dataclass(frozen=True)
class SeparableWell:
    """Kinetic-plus-potential Hamiltonian ``p**2/2m + U(x)`` with one
    confining minimum on ``domain``."""

    m: float
    U: Callable
    dU_dx: Callable
    domain: tuple
    hbar: float = 1.0
    d2U_dx2: Optional[Callable] = None
    name: str = "well"
    symmetric: bool = False
    x_min: float = field(init=False)
    U_min: float = field(init=False)

    def __post_init__(self):
        if not self.m > 0:
            raise ValueError("mass must be positive")
        if not self.hbar > 0:
            raise ValueError("hbar must be positive")
        lo, hi = map(float, self.domain)
        if not lo < hi:
            raise ValueError("domain must be an increasing interval")
        object.__setattr__(self, "domain", (lo, hi))
        xs = np.linspace(lo, hi, _SINGLE_WELL_SAMPLES)
        slope = np.asarray(self.dU_dx(xs), dtype=float)
        sign = np.sign(slope)
        nz = sign != 0
        changes = np.flatnonzero(np.diff(sign[nz]) != 0)
        if len(changes) != 1:
            raise KvhError(f"potential is not a single well on {self.domain}: "
                           f"{len(changes)} slope sign changes")
        idx = np.flatnonzero(nz)
        a, b = xs[idx[changes[0]]], xs[idx[changes[0] + 1]]
        if self.dU_dx(a) > 0:
            raise KvhError("interior extremum is a maximum, not a well")
        # exact zeros of the slope on the sample grid are the minimum itself
        zeros = xs[(~nz)]
        zeros = zeros[(zeros > a) & (zeros < b)] if len(zeros) else zeros
        if len(zeros):
            x0 = float(zeros[0])
        else:
            x0 = brentq(self.dU_dx, a, b, xtol=_XTOL)
        u0 = float(self.U(x0))
        if not (self.U(lo) > u0 and self.U(hi) > u0):
            raise KvhError("well is not confining on its domain")
        object.__setattr__(self, "x_min", x0)
        object.__setattr__(self, "U_min", u0)

    @property
    def barrier(self) -> float:
        """Lowest domain-edge potential; bound orbits must stay below it."""
        lo, hi = self.domain
        return float(min(self.U(lo), self.U(hi)))

    def curvature(self, x):
        if self.d2U_dx2 is not None:
            return self.d2U_dx2(x)
        eps = 1e-5 * max(1.0, abs(float(np.max(np.abs(x)))))
        return (self.dU_dx(x + eps) - self.dU_dx(x - eps)) / (2 * eps)

    def hamiltonian(self, x, p):
        return p * p / (2 * self.m) + self.U(x)

    def field(self) -> HamiltonianField:
        m, U, dU = self.m, self.U, self.dU_dx
        curv = self.curvature

        def hess(t, x, p):
            x = np.asarray(x, dtype=float)
            return curv(x), np.zeros_like(x), np.full_like(x, 1.0 / m)

        return HamiltonianField(
            h=lambda t, x, p: p * p / (2 * m) + U(x),
            dh_dx=lambda t, x, p: dU(x) + 0 * p,
            dh_dp=lambda t, x, p: p / m + 0 * x,
            hbar=self.hbar,
            hessian=hess,
            name=self.name,
        )


def characteristic_length(m, U, x_min, hbar):
    """Length where the well depth equals the confinement energy
    ``hbar**2 / (2 m x**2)``; reduces to ``sqrt(hbar/m omega)`` for the
    harmonic well and stays finite when ``U''`` vanishes at the minimum."""
    u0 = U(x_min)

    def g(s):
        return 0.5 * (U(x_min + s) + U(x_min - s)) - u0 - hbar ** 2 / (2 * m * s * s)

    lo, hi = 1e-12, 1.0
    while g(hi) < 0:
        hi *= 2.0
        if hi > 1e12:
            raise KvhError("could not size the well domain")
    while g(lo) > 0:
        lo *= 0.5
    return brentq(g, lo, hi, xtol=1e-14, rtol=1e-12)


def harmonic(m=1.0, omega=1.0, hbar=1.0, domain=None) -> SeparableWell:
    """Harmonic well ``U = m omega**2 x**2 / 2``."""
    if not omega > 0:
        raise ValueError("omega must be positive")
    k = m * omega * omega
    if domain is None:
        xc = math.sqrt(hbar / (m * omega))
        domain = (-20 * xc, 20 * xc)
    return SeparableWell(
        m=m,
        U=lambda x: 0.5 * k * np.asarray(x) ** 2,
        dU_dx=lambda x: k * np.asarray(x),
        d2U_dx2=lambda x: np.full_like(np.asarray(x, dtype=float), k),
        domain=domain,
        hbar=hbar,
        name="ho",
        symmetric=True,
    )


def quartic(m=1.0, lam=1.0, hbar=1.0, domain=None) -> SeparableWell:
    """Quartic well ``U = lam x**4 / 4``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")

    def U(x):
        return 0.25 * lam * np.asarray(x) ** 4

    if domain is None:
        xc = characteristic_length(m, U, 0.0, hbar)
        domain = (-20 * xc, 20 * xc)
    return SeparableWell(
        m=m,
        U=U,
        dU_dx=lambda x: lam * np.asarray(x) ** 3,
        d2U_dx2=lambda x: 3 * lam * np.asarray(x) ** 2,
        domain=domain,
        hbar=hbar,
        name="quartic",
        symmetric=True,
    )


def free_particle(m=1.0, hbar=1.0) -> HamiltonianField:
    return HamiltonianField(
        h=lambda t, x, p: p * p / (2 * m) + 0 * x,
        dh_dx=lambda t, x, p: 0 * x + 0 * p,
        dh_dp=lambda t, x, p: p / m + 0 * x,
        hbar=hbar,
        hessian=lambda t, x, p: (np.zeros_like(np.asarray(x, dtype=float)),
                                 np.zeros_like(np.asarray(x, dtype=float)),
                                 np.full_like(np.asarray(x, dtype=float), 1.0 / m)),
        name="free",
    )


CATALOG = {"ho": harmonic, "quartic": quartic}

_PARAM_ALIASES = {
    "ho": {"m": "m", "omega": "omega", "w": "omega", "hbar": "hbar"},
    "quartic": {"m": "m", "lambda": "lam", "lam": "lam", "hbar": "hbar"},
}


def make_system(name: str, params: Optional[dict] = None) -> SeparableWell:
    """Build a catalog well by name (``"ho"`` or ``"quartic"``)."""
    if name not in CATALOG:
        raise KeyError(f"unknown system {name!r}; choose from {sorted(CATALOG)}")
    kwargs = {}
    for key, value in (params or {}).items():
        try:
            kwargs[_PARAM_ALIASES[name][key]] = float(value)
        except KeyError:
            raise KeyError(f"system {name!r} has no parameter {key!r}") from None
    return CATALOG[name](**kwargs)


def turning_points(well: SeparableWell, E: float):
    """Left and right classical turning points ``U(xi) = E``."""
    E = float(E)
    if E <= well.U_min:
        raise EnergyBelowWell(f"E={E} is not above the well minimum {well.U_min}")
    if E >= well.barrier:
        raise EnergyAboveWell(f"E={E} reaches the domain barrier {well.barrier}")
    lo, hi = well.domain
    x0 = well.x_min

    def g(x):
        return float(well.U(x)) - E

    def flank(a, b):
        xs = np.linspace(a, b, _SCAN_SAMPLES)
        vals = np.asarray(well.U(xs), dtype=float) - E
        idx = np.flatnonzero(np.sign(vals[:-1]) != np.sign(vals[1:]))
        i = idx[0]
        if vals[i] == 0:
            return float(xs[i])
        if vals[i + 1] == 0:
            return float(xs[i + 1])
        return brentq(g, xs[i], xs[i + 1], xtol=_XTOL, rtol=4 * np.finfo(float).eps)

    return flank(lo, x0), flank(x0, hi)


def momentum_branches(well: SeparableWell, E: float, x):
    """Momentum branches ``(p_plus, p_minus)`` at energy ``E``; purely
    imaginary where ``U(x) > E``."""
    x = np.asarray(x, dtype=float)
    kinetic = 2 * well.m * (E - np.asarray(well.U(x), dtype=float))
    mag = np.sqrt(np.abs(kinetic))
    p_plus = np.where(kinetic >= 0, mag + 0j, 1j * mag)
    if p_plus.ndim == 0:
        p_plus = complex(p_plus)
    return p_plus, -p_plus
