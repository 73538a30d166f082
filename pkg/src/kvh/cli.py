"""Command-line entry point.

Commands write CSV, JSON or binary artifacts into ``--out``. Exit codes:
0 on success, 2 on usage or configuration errors, 3 on numerical failures
(the message goes to standard error).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from . import plotting
from .diagnostics import compare_to_exact, exact_ho_eigenfunction, hj_ridge, norm_phase, physical_density
from .eigen import (DEFAULT_WINDOW, SCHEMES, _evanescent, _speed, eval_config_space, eval_phase_space,
                    quantize, spectrum, spectrum_to_csv, spectrum_to_json)
from .errors import KvhError
from .grids import ConfigGrid, PhaseSpaceGrid, axis, eigen_ridge, gaussian_state, read_bin
from .propagators import PropagatorKind, project_to_config, propagate
from .quadrature import sin2_quad
from .systems import CATALOG, make_system

EXIT_OK, EXIT_USAGE, EXIT_NUMERIC = 0, 2, 3
FORMATS = ("csv", "json", "bin")
MIN_COUNT = 16

_DEFAULTS = {
    "system": "ho", "params": {}, "hbar": None, "out": ".", "format": "csv", "threads": 1, "plot": False,
    "x": (-6.0, 6.0, 128), "p": (-6.0, 6.0, 128), "rtol": 1e-10, "atol": 1e-12,
}


class UsageError(ValueError):
    pass


# parsing helpers


def _floats(text: str, count: Optional[int] = None, name: str = "value"):
    try:
        vals = [float(v) for v in str(text).split(",") if v.strip() != ""]
    except ValueError:
        raise UsageError(f"malformed {name} {text!r}") from None
    if count is not None and len(vals) != count:
        raise UsageError(f"{name} needs {count} comma-separated numbers, got {text!r}")
    return vals


def _axis_spec(value, name):
    if isinstance(value, str):
        lo, hi, n = _floats(value, 3, f"{name} axis")
    else:
        try:
            lo, hi, n = (float(v) for v in value)
        except (TypeError, ValueError):
            raise UsageError(f"malformed {name} axis {value!r}") from None
    if n != int(n):
        raise UsageError(f"{name} axis count must be an integer")
    return float(lo), float(hi), int(n)


def _params(value):
    if value is None:
        return {}
    if isinstance(value, dict):
        return {str(k): float(v) for k, v in value.items()}
    out = {}
    for item in str(value).split(","):
        if not item.strip():
            continue
        if "=" not in item:
            raise UsageError(f"parameter {item!r} is not of the form key=value")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = float(v)
        except ValueError:
            raise UsageError(f"parameter {k.strip()!r} has non-numeric value {v!r}") from None
    return out


@dataclass
class RunConfig:
    """Validated settings shared by every command."""

    system: str
    params: dict
    x: tuple
    p: tuple
    scheme: str = "ebk"
    tolerances: dict = field(default_factory=lambda: {"rtol": 1e-10, "atol": 1e-12})
    out: str = "."
    format: str = "csv"
    threads: int = 1
    plot: bool = False

    def __post_init__(self):
        if self.system not in CATALOG:
            raise UsageError(f"unknown system {self.system!r}; choose from {sorted(CATALOG)}")
        hbar = self.params.get("hbar", 1.0)
        if not hbar > 0:
            raise UsageError("hbar must be positive")
        for name, spec in (("x", self.x), ("p", self.p)):
            lo, hi, n = spec
            if n < MIN_COUNT:
                raise UsageError(f"{name} grid count must be at least {MIN_COUNT}")
            if not lo < hi:
                raise UsageError(f"{name} axis needs min < max")
        if self.scheme not in SCHEMES:
            raise UsageError(f"unknown scheme {self.scheme!r}; use 'ebk' or 'bs'")
        if self.format not in FORMATS:
            raise UsageError(f"format must be one of {FORMATS}")
        if self.threads < 1:
            raise UsageError("threads must be at least 1")

    @property
    def hbar(self) -> float:
        return self.params.get("hbar", 1.0)

    def well(self):
        return make_system(self.system, self.params)

    def x_axis(self):
        return axis(*self.x)

    def p_axis(self):
        return axis(*self.p)

    def path(self, stem: str, ext: Optional[str] = None) -> str:
        os.makedirs(self.out, exist_ok=True)
        return os.path.join(self.out, f"{stem}.{ext or self.format}")


def _load_config_file(path):
    if path is None:
        return {}
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from None
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    return doc


def _pick(args, doc, key, attr=None):
    """Flag value if given, else config-file value, else built-in default."""
    v = getattr(args, attr or key, None)
    if v is not None:
        return v
    if key in doc:
        return doc[key]
    return _DEFAULTS.get(key)


def build_config(args):
    """Merge flags over the config file; returns ``(RunConfig, file document)``."""
    doc = _load_config_file(args.config)
    params = _params(doc.get("params"))
    params.update(_params(args.params))
    hbar = args.hbar if args.hbar is not None else doc.get("hbar")
    if hbar is not None:
        params["hbar"] = float(hbar)
    grid = doc.get("grid", {})
    x = args.x if getattr(args, "x", None) is not None else grid.get("x", _DEFAULTS["x"])
    p = args.p if getattr(args, "p", None) is not None else grid.get("p", _DEFAULTS["p"])
    tol = dict(doc.get("tolerances", {}))
    for key in ("rtol", "atol"):
        if getattr(args, key, None) is not None:
            tol[key] = getattr(args, key)
        tol.setdefault(key, _DEFAULTS[key])
    return RunConfig(
        system=str(_pick(args, doc, "system")),
        params=params,
        x=_axis_spec(x, "x"),
        p=_axis_spec(p, "p"),
        scheme=str(_pick(args, doc, "scheme") or "ebk").lower(),
        tolerances={k: float(v) for k, v in tol.items()},
        out=str(_pick(args, doc, "out")),
        format=str(_pick(args, doc, "format")).lower(),
        threads=int(_pick(args, doc, "threads")),
        plot=bool(args.plot or doc.get("plot", False)),
    ), doc


# output helpers


def _tabular_format(cfg: RunConfig) -> str:
    if cfg.format == "bin":
        raise UsageError("binary format applies to grids only; use csv or json for tables")
    return cfg.format


def _write_json(doc, path):
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1, allow_nan=False)
        fh.write("\n")


def _clean(v):
    v = float(v)
    return v if math.isfinite(v) else None


def write_grid(grid, cfg: RunConfig, stem: str) -> str:
    path = cfg.path(stem)
    if cfg.format == "bin":
        grid.to_bin(path)
    elif cfg.format == "csv":
        grid.to_csv(path)
    else:
        doc = {"t": grid.t, "hbar": grid.hbar, "x": grid.x_axis.tolist(),
               "re": grid.values.real.tolist(), "im": grid.values.imag.tolist()}
        if isinstance(grid, PhaseSpaceGrid):
            doc["p"] = grid.p_axis.tolist()
        _write_json(doc, path)
    return path


def load_grid(path: str, hbar: float = 1.0):
    """Read a grid written by :func:`write_grid` in any format."""
    if not os.path.exists(path):
        raise UsageError(f"no such grid file {path!r}")
    ext = os.path.splitext(path)[1].lower()
    if ext == ".json":
        with open(path) as fh:
            doc = json.load(fh)
        vals = np.asarray(doc["re"]) + 1j * np.asarray(doc["im"])
        if "p" in doc:
            return PhaseSpaceGrid(doc["x"], doc["p"], vals, doc.get("t", 0.0), doc.get("hbar", hbar))
        return ConfigGrid(doc["x"], vals, doc.get("t", 0.0), doc.get("hbar", hbar))
    if ext == ".csv":
        data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        if data.shape[1] == 4:
            xs, ps = np.unique(data[:, 0]), np.unique(data[:, 1])
            vals = (data[:, 2] + 1j * data[:, 3]).reshape(len(xs), len(ps))
            return PhaseSpaceGrid(xs, ps, vals, 0.0, hbar)
        return ConfigGrid(data[:, 0], data[:, 1] + 1j * data[:, 2], 0.0, hbar)
    return read_bin(path)


# initial states


def initial_state(spec: str, cfg: RunConfig, kind: Optional[PropagatorKind] = None) -> PhaseSpaceGrid:
    """Build a phase-space grid from ``gaussian:x,p,sx,sp``, ``eigen_ridge:n,k``,
    ``hj_ridge:n,k`` or ``file:path``.

    ``eigen_ridge`` uses the semiclassical ridge when ``kind`` is the
    semiclassical propagator, so that projecting the result recovers the
    configuration-space eigenfunction.
    """
    if not spec or ":" not in spec:
        raise UsageError(f"malformed initial spec {spec!r}")
    tag, body = spec.split(":", 1)
    xs, ps = cfg.x_axis(), cfg.p_axis()
    if tag == "gaussian":
        x0, p0, sx, sp = _floats(body, 4, "gaussian spec")
        if not (sx > 0 and sp > 0):
            raise UsageError("gaussian widths must be positive")
        return gaussian_state(xs, ps, x0, p0, sx, sp, cfg.hbar)
    if tag in ("eigen_ridge", "hj_ridge"):
        n, k = _floats(body, 2, f"{tag} spec")
        if n < 0 or n != int(n):
            raise UsageError("quantum number must be a non-negative integer")
        if not k > 0:
            raise UsageError("ridge index k must be positive")
        eig = quantize(cfg.well(), cfg.scheme, int(n))
        if eig.degenerate:
            raise UsageError("the n=0 Bohr-Sommerfeld torus has no ridge")
        if tag == "hj_ridge":
            return hj_ridge(eig, xs, ps, k)
        return eigen_ridge(eig, xs, ps, k, semiclassical=kind is PropagatorKind.KVH_SC)
    if tag == "file":
        g = load_grid(body, cfg.hbar)
        if not isinstance(g, PhaseSpaceGrid):
            raise UsageError(f"{body!r} does not hold a phase-space grid")
        return g
    raise UsageError(f"unknown initial state kind {tag!r}")


# phase-space tables


def _angle_integral(well, E, lo, hi, evanescent):
    rate = _evanescent if evanescent else _speed

    def inv(y):
        s = rate(well, E, y)
        return np.where(s > 0, well.m / np.where(s > 0, s, 1.0), 0.0)

    # E - U loses digits next to a turning point; 1e-9 rad is ample for a table
    return sin2_quad(inv, lo, hi, rtol=1e-11, atol=1e-9)


def phase_space_table(eig, x_axis):
    """Rows ``(branch, angle, x, p, amp, value)`` for each branch.

    On the torus the angle is ``theta = omega t`` with ``theta = 0`` at the
    right turning point and the lower branch (p < 0) on ``(0, pi)``. In the
    forbidden region the angle is the imaginary-time analogue ``vartheta``,
    signed positive to the right of the well; it reduces to ``x = A cosh
    vartheta`` for the oscillator. ``amp`` is the branch coefficient:
    ``a+`` for p > 0 and ``a-`` for p < 0.
    """
    c = eig.chart
    well = c.well
    rows = []
    inside = (x_axis > c.xi_minus) & (x_axis < c.xi_plus)
    xin = x_axis[inside]
    if len(xin):
        theta_minus = c.omega * _angle_integral(well, c.E, xin, np.full_like(xin, c.xi_plus), False)
        pin = c.momentum(xin)
        vp = eval_phase_space(eig, xin, "plus")
        vm = eval_phase_space(eig, xin, "minus")
        for xi, th, p, a, b in zip(xin, theta_minus, pin, vp, vm):
            rows.append(("plus", 2 * math.pi - th, xi, p, eig.a_plus, a))
            rows.append(("minus", th, xi, -p, eig.a_minus, b))
    xout = x_axis[~inside & ((x_axis <= c.xi_minus) | (x_axis >= c.xi_plus))]
    if len(xout):
        right = xout >= c.xi_plus
        start = np.where(right, c.xi_plus, c.xi_minus)
        lo, hi = np.minimum(start, xout), np.maximum(start, xout)
        vt = c.omega * _angle_integral(well, c.E, lo, hi, True) * np.where(right, 1.0, -1.0)
        vals = eval_phase_space(eig, xout, "forbidden")
        kappa = np.sqrt(np.maximum(2 * well.m * (np.asarray(well.U(xout)) - c.E), 0.0))
        for xi, th, kp, r, v in zip(xout, vt, kappa, right, vals):
            rows.append(("forbidden", th, xi, kp, eig.a_plus if r else eig.a_minus, v))
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


# commands


def cmd_spectrum(args, cfg: RunConfig, doc: dict) -> int:
    n_max = args.n_max if args.n_max is not None else doc.get("n_max", 10)
    nu = args.nu_range if args.nu_range is not None else doc.get("nu_range", "-2,2")
    nu = _floats(nu, 2, "nu range") if isinstance(nu, str) else list(nu)
    if int(n_max) != n_max or n_max < 0:
        raise UsageError("--n-max must be a non-negative integer")
    include = bool(args.include_classical or doc.get("include_classical", False))
    cj = args.classical_J if args.classical_J is not None else doc.get("classical_J")
    fmt = _tabular_format(cfg)
    lines = spectrum(cfg.well(), cfg.scheme, int(n_max), include, (int(nu[0]), int(nu[1])), cj)
    path = cfg.path("spectrum", fmt)
    (spectrum_to_csv if fmt == "csv" else spectrum_to_json)(lines, path)
    if cfg.plot:
        plotting.plot_spectrum(lines, cfg.path("spectrum", "png"))
    print(path)
    return EXIT_OK


def cmd_eigenfunction(args, cfg: RunConfig, doc: dict) -> int:
    n = args.n if args.n is not None else doc.get("n")
    if n is None or n < 0:
        raise UsageError("--n must be a non-negative integer")
    window = args.window if args.window is not None else doc.get("window", DEFAULT_WINDOW)
    fmt = _tabular_format(cfg)
    eig = quantize(cfg.well(), cfg.scheme, int(n))
    if eig.degenerate:
        raise UsageError("the n=0 Bohr-Sommerfeld torus is a point and has no eigenfunction")
    xs = cfg.x_axis()
    space = args.space or doc.get("space", "config")
    path = cfg.path(f"eigenfunction_{space}", fmt)
    if space == "config":
        ev = eval_config_space(eig, xs, window=window)
        if fmt == "csv":
            ev.to_csv(path)
        else:
            _write_json({"energy": eig.energy, "J": eig.chart.J, "x": ev.x.tolist(),
                         "re_phi": [_clean(v) for v in ev.values.real],
                         "im_phi": [_clean(v) for v in ev.values.imag],
                         "region_flag": ev.region.astype(int).tolist()}, path)
        if cfg.plot:
            ref = None
            if cfg.system == "ho":
                well = cfg.well()
                omega = math.sqrt(well.curvature(0.0) / well.m)
                ref = exact_ho_eigenfunction(well.m, omega, well.hbar, int(n), xs).values
            plotting.plot_config(xs, ev.values, cfg.path(f"eigenfunction_{space}", "png"), ref)
    elif space == "phase":
        rows = phase_space_table(eig, xs)
        head = ["branch", "angle", "x", "p", "re_amp", "im_amp", "re", "im", "arg"]
        if fmt == "csv":
            with open(path, "w", newline="") as fh:
                w = csv.writer(fh, lineterminator="\n")
                w.writerow(head)
                for b, th, x, p, a, v in rows:
                    w.writerow([b] + [f"{u:.16e}" for u in (th, x, p, a.real, a.imag, v.real, v.imag,
                                                             np.angle(v))])
        else:
            _write_json({"energy": eig.energy, "J": eig.chart.J,
                         "rows": [dict(zip(head, (b, th, x, p, complex(a).real, complex(a).imag, v.real,
                                                  v.imag, float(np.angle(v)))))
                                  for b, th, x, p, a, v in rows]}, path)
    else:
        raise UsageError("--space must be 'config' or 'phase'")
    print(path)
    return EXIT_OK


def _norms(grid: PhaseSpaceGrid) -> dict:
    l1 = np.trapezoid(np.trapezoid(grid.values, grid.p_axis, axis=1), grid.x_axis)
    return {"l2_norm": norm_phase(grid), "integral_re": float(l1.real), "integral_im": float(l1.imag)}


def cmd_propagate(args, cfg: RunConfig, doc: dict) -> int:
    kind = PropagatorKind.parse(args.kind or doc.get("kind", "kvh-ps"))
    t1 = args.t if args.t is not None else doc.get("t")
    if t1 is None:
        raise UsageError("--t is required")
    spec = args.initial or doc.get("initial")
    grid0 = initial_state(spec, cfg, kind)
    grid1, info = propagate(cfg.well().field(), grid0, float(t1), kind, rtol=cfg.tolerances["rtol"],
                            atol=cfg.tolerances["atol"], threads=cfg.threads, return_info=True)
    path = write_grid(grid1, cfg, "psi")
    before, after = _norms(grid0), _norms(grid1)
    report = {
        "kind": kind.value, "t0": grid0.t, "t1": grid1.t, "initial": spec,
        "before": before, "after": after,
        "l2_relative_change": abs(after["l2_norm"] - before["l2_norm"]) / max(before["l2_norm"], 1e-300),
        "max_det_deviation": info.max_det_deviation, "steps": info.steps,
        "caustic_crossings": list(info.crossings) if info.crossings else None,
    }
    _write_json(report, cfg.path("conservation", "json"))
    if cfg.plot:
        plotting.plot_phase_grid(grid1, cfg.path("psi", "png"), f"{kind.value}, t = {grid1.t:g}")
    print(path)
    return EXIT_OK


def cmd_project(args, cfg: RunConfig, doc: dict) -> int:
    src = args.input or doc.get("input")
    if not src:
        raise UsageError("--input is required")
    grid = load_grid(src, cfg.hbar)
    if not isinstance(grid, PhaseSpaceGrid):
        raise UsageError(f"{src!r} does not hold a phase-space grid")
    out = project_to_config(grid, args.tol if args.tol is not None else doc.get("tol", 1e-10))
    path = write_grid(out, cfg, "psi_config")
    if cfg.plot:
        plotting.plot_config(out.x_axis, out.values, cfg.path("psi_config", "png"))
    print(path)
    return EXIT_OK


def _interior_max(rep, eig, window):
    keep = eig.chart.outside_windows(rep.x_axis, window)
    keep &= (rep.x_axis > eig.chart.xi_minus) & (rep.x_axis < eig.chart.xi_plus)
    return float(np.max(np.abs(rep.integral_delta_f_per_x[keep]))) if np.any(keep) else 0.0


def cmd_density_check(args, cfg: RunConfig, doc: dict) -> int:
    spec = args.initial or doc.get("initial")
    grid = initial_state(spec, cfg)
    rep = physical_density(grid)
    extra = {"initial": spec}
    tag = spec.split(":", 1)[0]
    if tag in ("eigen_ridge", "hj_ridge"):
        # the branch phase jumps where a ridge crosses p = 0, so the envelope
        # is checked outside the turning-point windows against the same state
        # on a grid of half the resolution
        n = int(_floats(spec.split(":", 1)[1], 2)[0])
        eig = quantize(cfg.well(), cfg.scheme, n)
        half = replace(cfg, x=cfg.x[:2] + ((cfg.x[2] + 1) // 2,), p=cfg.p[:2] + ((cfg.p[2] + 1) // 2,))
        coarse = physical_density(initial_state(spec, half))
        inner, env = _interior_max(rep, eig, DEFAULT_WINDOW), _interior_max(coarse, eig, DEFAULT_WINDOW)
        extra["envelope"] = {"window_airy_lengths": DEFAULT_WINDOW, "max_abs_outside_windows": inner,
                             "half_resolution_max_abs_outside_windows": env, "within": inner <= env}
    path = cfg.path("density", "json")
    rep.to_json(path, extra)
    if cfg.plot:
        plotting.plot_density(rep, cfg.path("density", "png"))
    print(path)
    return EXIT_OK


def cmd_compare(args, cfg: RunConfig, doc: dict) -> int:
    if cfg.system != "ho":
        raise UsageError("compare needs the exact oscillator; use --system ho")
    n = args.n if args.n is not None else doc.get("n", 0)
    if n < 0:
        raise UsageError("--n must be a non-negative integer")
    window = args.window if args.window is not None else doc.get("window", DEFAULT_WINDOW)
    well = cfg.well()
    omega = math.sqrt(well.curvature(0.0) / well.m)
    rep = compare_to_exact(well.m, omega, well.hbar, int(n), cfg.scheme, window)
    path = cfg.path("compare", "json")
    _write_json(rep, path)
    if cfg.plot and rep.get("waveform_rel_l2_error") is not None:
        xs = cfg.x_axis()
        ev = eval_config_space(quantize(well, cfg.scheme, int(n)), xs, window=window)
        ref = exact_ho_eigenfunction(well.m, omega, well.hbar, int(n), xs).values
        plotting.plot_config(xs, ev.values, cfg.path("compare", "png"), ref)
    print(path)
    return EXIT_OK


COMMANDS = {
    "spectrum": cmd_spectrum, "eigenfunction": cmd_eigenfunction, "propagate": cmd_propagate,
    "project": cmd_project, "density-check": cmd_density_check, "compare": cmd_compare,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("global options")
    g.add_argument("--system", help="catalog system: ho or quartic")
    g.add_argument("--params", help="system parameters as k=v,... (m, omega, lambda, hbar)")
    g.add_argument("--hbar", type=float)
    g.add_argument("--out", help="output directory")
    g.add_argument("--format", choices=FORMATS)
    g.add_argument("--config", help="JSON config file; flags override its values")
    g.add_argument("--threads", type=int)
    g.add_argument("--plot", action="store_true", help="also render PNG figures")
    g.add_argument("--scheme", type=str.lower, choices=SCHEMES)
    g.add_argument("--x", help="x axis as min,max,count")
    g.add_argument("--p", help="p axis as min,max,count")
    g.add_argument("--rtol", type=float)
    g.add_argument("--atol", type=float)

    parser = argparse.ArgumentParser(prog="kvh", description="Semiclassical phase-space wave tools.")
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="semiclassical energy levels")
    s.add_argument("--n-max", type=int)
    s.add_argument("--include-classical", action="store_true")
    s.add_argument("--nu-range", help="lo,hi")
    s.add_argument("--classical-J", type=float)

    s = sub.add_parser("eigenfunction", parents=[common], help="eigenfunction tables")
    s.add_argument("--n", type=int)
    s.add_argument("--space", choices=("config", "phase"))
    s.add_argument("--window", type=float, help="exclusion window in Airy lengths")

    s = sub.add_parser("propagate", parents=[common], help="evolve a phase-space grid")
    s.add_argument("--kind", help="scalar, lve, kvn, kvh-ps or kvh-sc")
    s.add_argument("--t", type=float, help="final time")
    s.add_argument("--initial", help="gaussian:x,p,sx,sp | eigen_ridge:n,k | hj_ridge:n,k | file:path")

    s = sub.add_parser("project", parents=[common], help="integrate a phase-space grid over p")
    s.add_argument("--input", help="phase-space grid file")
    s.add_argument("--tol", type=float, help="boundary decay tolerance")

    s = sub.add_parser("density-check", parents=[common], help="physical density diagnostics")
    s.add_argument("--initial", help="initial state spec, as for propagate")

    s = sub.add_parser("compare", parents=[common], help="JWKB versus exact oscillator")
    s.add_argument("--n", type=int)
    s.add_argument("--window", type=float)
    return parser


_VALUE_FLAGS = ("--x", "--p", "--nu-range", "--initial", "--params")


def _join_negative_values(argv):
    # "--x -3,3,64" would otherwise be read as an option
    out, it = [], iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg, doc = build_config(args)
        return COMMANDS[args.command](args, cfg, doc)
    except KvhError as exc:
        print(f"kvh: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (UsageError, ValueError, KeyError, TypeError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"kvh: error: {msg}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
