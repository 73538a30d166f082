"""Finite-index models of fractional powers of the Dirac delta.

``G^a_k(x) = k**a exp(-a (k x)**2 / 2) / (2 pi)**(a/2)`` is the Gaussian
family and ``D^a_k(x) = k**a`` on ``|x| < 1/(2k)`` (zero outside) is the step
family. Both have unit mass at ``a = 1`` and products ``d^a d^b`` with
``a + b = 1`` tend weakly to the delta itself.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Dict, Sequence

import numpy as np

from .errors import ExponentSumInvalid

FAMILIES = ("gaussian", "step")


@dataclass(frozen=True)
class GeneralizedDelta:
    family: str
    a: float
    k: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}")
        if not 0 < self.a <= 1:
            raise ValueError("exponent a must lie in (0, 1]")
        if not self.k > 0:
            raise ValueError("index k must be positive")

    def __call__(self, x):
        return evaluate(self, x)

    @property
    def width(self) -> float:
        """Full ``1/e**2`` width of ``(G^a_k)**(1/a)``, i.e. ``4/k``; the box
        width ``1/k`` for the step family."""
        return 4.0 / self.k if self.family == "gaussian" else 1.0 / self.k


def gaussian(a: float, k: float, x):
    x = np.asarray(x, dtype=float)
    return k ** a * np.exp(-0.5 * a * (k * x) ** 2) / (2 * math.pi) ** (a / 2)


def step(a: float, k: float, x):
    x = np.asarray(x, dtype=float)
    return np.where(np.abs(x) < 0.5 / k, k ** a, 0.0)


def evaluate(gd: GeneralizedDelta, x):
    f = gaussian if gd.family == "gaussian" else step
    out = f(gd.a, gd.k, x)
    return float(out) if np.ndim(out) == 0 else out


def _product_integral(family: str, a: float, b: float, k: float, fn: Callable, points: int = 4001):
    if family == "gaussian":
        half = 12.0 / (k * math.sqrt(min(a + b, 1.0)))
        x = np.linspace(-half, half, points)
        vals = gaussian(a, k, x) * gaussian(b, k, x)
        return np.trapezoid(fn(x) * vals, x), np.trapezoid(vals, x)
    # the product is a box of height k on |x| < 1/2k; Gauss-Legendre is exact for the mass
    t, w = np.polynomial.legendre.leggauss(64)
    x = 0.5 / k * t
    wts = 0.5 / k * w * k ** (a + b)
    return float(np.sum(wts * fn(x))), float(np.sum(wts))


def product_identity_residual(a: float, b: float, k: float, test_fn: Callable = np.cos,
                              family: str = "gaussian"):
    """``|int f d^a_k d^b_k dx - f(0) c_k|`` with ``c_k`` the product's mass.

    Returns ``(residual, c_k)``.

    Raises
    ------
    ExponentSumInvalid
        Unless ``a + b == 1``.
    """
    if not math.isclose(a + b, 1.0, rel_tol=0, abs_tol=1e-12):
        raise ExponentSumInvalid(f"a + b must equal 1, got {a} + {b}")
    if family not in FAMILIES:
        raise ValueError(f"family must be one of {FAMILIES}")
    integral, mass = _product_integral(family, a, b, k, test_fn)
    return abs(integral - float(test_fn(0.0)) * mass), float(mass)


def convergence_order(ks: Sequence[float], errors: Sequence[float]) -> float:
    """Least-squares slope of ``-log(error)`` against ``log(k)``."""
    ks = np.asarray(ks, dtype=float)
    err = np.asarray(errors, dtype=float)
    good = err > 0
    if good.sum() < 2:
        return math.inf
    slope = np.polyfit(np.log(ks[good]), np.log(err[good]), 1)[0]
    return float(-slope)


def k_ladder(a: float, b: float, ks: Sequence[float] = (4, 8, 16, 32),
             test_fns: Dict[str, Callable] = None, family: str = "gaussian") -> dict:
    """Residuals and masses across ``ks`` with the fitted decay order."""
    if test_fns is None:
        test_fns = {"cos": np.cos, "gauss": lambda x: np.exp(-x * x), "quadratic": lambda x: 1 + x + x * x}
    report = {"family": family, "a": a, "b": b, "k": list(map(float, ks)), "tests": {}}
    for name, fn in test_fns.items():
        res, mass = zip(*(product_identity_residual(a, b, k, fn, family) for k in ks))
        report["tests"][name] = {"residual": list(res), "mass": list(mass),
                                 "order": convergence_order(ks, res)}
    return report


def ladder_to_json(report: dict, path):
    with open(path, "w") as fh:
        json.dump(report, fh, indent=1)
        fh.write("\n")


def sqrt_delta_orthonormality(eig0, eig1, k: float, x_axis, p_axis) -> complex:
    """Phase-space inner product of finite-``k`` square-root-delta
    eigenfunction models of two charts of one well."""
    from .grids import eigen_ridge

    g0 = eigen_ridge(eig0, x_axis, p_axis, k)
    g1 = eigen_ridge(eig1, x_axis, p_axis, k)
    integrand = np.conj(g0.values) * g1.values
    return complex(np.trapezoid(np.trapezoid(integrand, g0.p_axis, axis=1), g0.x_axis))
