"""Configuration-driven command line front end.

Commands: nodoid-table, solve, sweep, circle-check, flux, estimates.
One TOML config describes a scenario; outputs (CSV tables, binary grids,
SVG plots) land in the output directory together with manifest.json,
which records the config hash, every output file, the verdicts, and a
machine-readable reason on failure.  Reruns with the same config produce
byte-identical CSVs.

Exit codes: 0 ok, 1 solver failure, 2 config error, 3 certification
failure.  Verbosity via the CMC_LOG environment variable
(quiet/info/debug).
"""

from __future__ import annotations

import argparse
import functools
import hashlib
import json
import logging
import math
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from . import barrier, boundary, flux, nodoid, solver, svgplot
from .boundary import BoundaryFunction, CertificationError
from .field import ScalarField
from .problem import (CapSides, EnvelopeSides, ExplicitSides, SolverConfig,
                      StripProblem, collin, lopez)
from .solver import SolverError

log = logging.getLogger("cmcstrip.cli")


class ConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# config schema

_SCHEMA = {
    "scenario": {"name", "case", "H", "t"},
    "boundary": {"form", "a", "b", "c", "csv", "window", "modulus"},
    "domain": {"truncation", "nx", "ny"},
    "sides": {"policy", "M", "pad", "theta", "x0", "z0"},
    "solver": {"residual_tol", "max_newton", "max_halvings", "continuation_steps",
               "picard_iters", "linear_tol", "wall_layer"},
    "sweep": {"truncations", "window", "floor"},
    "circle_check": {"kind", "R", "centers", "samples"},
    "flux": {"rectangles", "arcs", "arc_samples", "random_paths", "seed",
             "gap_thresholds"},
    "estimates": {"cap_M"},
    "nodoid_table": {"H", "t_min", "t_max", "count", "log_spacing",
                     "profile_samples", "profile_t"},
    "output": {"solution_csv", "solution_grid", "plots"},
}


def load_config(path):
    try:
        with open(path, "rb") as fh:
            conf = tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config is not valid TOML: {exc}")
    for section, body in conf.items():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        if not isinstance(body, dict):
            raise ConfigError(f"section [{section}] must be a table")
        for key in body:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
    return conf


def config_hash(conf):
    return hashlib.sha256(
        json.dumps(conf, sort_keys=True, default=str).encode()).hexdigest()


# ---------------------------------------------------------------------------
# boundary forms (module-level functions: deterministic and picklable)

def _form_zero(x, a, b, c):
    return np.zeros_like(np.asarray(x, dtype=float))


def _form_affine(x, a, b, c):
    return a * np.asarray(x, dtype=float) + b


def _form_quadratic(x, a, b, c):
    x = np.asarray(x, dtype=float)
    return a * x * x + b * x + c


def _form_neg_quadratic(x, a, b, c):
    x = np.asarray(x, dtype=float)
    return -a * x * x + b * x + c


def _form_abs(x, a, b, c):
    return a * np.abs(np.asarray(x, dtype=float)) + b


def _form_sin(x, a, b, c):
    return a * np.sin(np.asarray(x, dtype=float) * (b if b else 1.0)) + c


_FORMS = {
    "zero": _form_zero,
    "affine": _form_affine,
    "quadratic": _form_quadratic,
    "neg_quadratic": _form_neg_quadratic,
    "abs": _form_abs,
    "sin": _form_sin,
}


def _build_boundary(conf, H, truncation):
    bconf = conf.get("boundary", {})
    form = bconf.get("form", "zero")
    window = bconf.get("window")
    if window is None:
        margin = max(4.0, 2.0 / H if H > 0 else 4.0)
        window = [truncation[0] - margin, truncation[1] + margin]
    if form == "csv":
        path = bconf.get("csv")
        if not path:
            raise ConfigError("boundary form 'csv' needs the csv key")
        return BoundaryFunction.from_csv(path, modulus=bconf.get("modulus"))
    if form not in _FORMS:
        raise ConfigError(
            f"unknown boundary form {form!r}; known: {sorted(_FORMS)} and 'csv'")
    fn = functools.partial(_FORMS[form], a=float(bconf.get("a", 1.0)),
                           b=float(bconf.get("b", 0.0)), c=float(bconf.get("c", 0.0)))
    return BoundaryFunction.from_callable(fn, window[0], window[1],
                                          modulus=bconf.get("modulus"))


def _build_case(conf):
    sconf = conf.get("scenario", {})
    kind = sconf.get("case", "collin")
    if kind == "collin":
        return collin()
    if kind == "lopez":
        if "t" not in sconf:
            raise ConfigError("lopez case needs scenario.t")
        return lopez(float(sconf["t"]))
    raise ConfigError(f"unknown case {kind!r}")


def _strip_half_width(case, H):
    if case.kind == "collin":
        return 0.5 / H
    return nodoid.params_from_t(H, case.t).h


def _build_sides(conf, H):
    sconf = conf.get("sides", {})
    policy = sconf.get("policy", "cap")
    if policy == "cap":
        return CapSides(M=sconf.get("M"), pad=sconf.get("pad"))
    if policy == "envelope":
        return EnvelopeSides(_build_case(conf))
    if policy == "explicit-cylinder":
        hc = barrier.HalfCylinder(H=H, x0=float(sconf.get("x0", 0.0)),
                                  z0=float(sconf.get("z0", 0.0)),
                                  theta=float(sconf.get("theta", 0.0)))
        trunc = conf.get("domain", {}).get("truncation", [-4.0, 4.0])
        return ExplicitSides(
            left=functools.partial(_cyl_trace, hc=hc, x=float(trunc[0])),
            right=functools.partial(_cyl_trace, hc=hc, x=float(trunc[1])))
    raise ConfigError(f"unknown sides policy {policy!r}")


def _cyl_trace(y, hc, x):
    return hc.eval(x, y)


def _build_problem(conf):
    sconf = conf.get("scenario", {})
    if "H" not in sconf:
        raise ConfigError("scenario.H is required")
    H = float(sconf["H"])
    case = _build_case(conf)
    l = _strip_half_width(case, H)
    dconf = conf.get("domain", {})
    trunc = dconf.get("truncation", [-4.0, 4.0])
    if not (isinstance(trunc, list) and len(trunc) == 2 and trunc[0] < trunc[1]):
        raise ConfigError(f"domain.truncation must be [lo, hi], got {trunc}")
    f = _build_boundary(conf, H, trunc)
    p = StripProblem(H=H, l=l, x_lo=float(trunc[0]), x_hi=float(trunc[1]),
                     nx=int(dconf.get("nx", 65)), ny=int(dconf.get("ny", 33)),
                     boundary=f, sides=_build_sides(conf, H))
    return p, case


def _build_solver_config(conf):
    sc = conf.get("solver", {})
    return SolverConfig(
        residual_tol=float(sc.get("residual_tol", 1e-11)),
        max_newton=int(sc.get("max_newton", 60)),
        max_halvings=int(sc.get("max_halvings", 30)),
        continuation_steps=int(sc.get("continuation_steps", 8)),
        picard_iters=int(sc.get("picard_iters", 2)),
        linear_tol=float(sc.get("linear_tol", 1e-12)),
        wall_layer=float(sc.get("wall_layer", 0.25)),
    )


# ---------------------------------------------------------------------------
# deterministic output helpers

def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


class Manifest:
    def __init__(self, command, conf, out_dir):
        self.data = {"command": command, "config_sha256": config_hash(conf),
                     "status": "ok", "reason": "", "outputs": [], "verdicts": {}}
        self.out_dir = Path(out_dir)

    def add_output(self, path):
        self.data["outputs"].append(str(Path(path).name))

    def verdict(self, key, value):
        self.data["verdicts"][key] = value

    def fail(self, status, reason):
        self.data["status"] = status
        self.data["reason"] = reason

    def write(self):
        self.data["outputs"] = sorted(self.data["outputs"])
        with open(self.out_dir / "manifest.json", "w") as fh:
            json.dump(self.data, fh, sort_keys=True, indent=2)
            fh.write("\n")


# ---------------------------------------------------------------------------
# commands

def cmd_nodoid_table(conf, out_dir, jobs):
    man = Manifest("nodoid-table", conf, out_dir)
    nconf = conf.get("nodoid_table", {})
    H = float(nconf.get("H", 1.0))
    t_min = float(nconf.get("t_min", 0.01))
    t_max = float(nconf.get("t_max", 100.0))
    count = int(nconf.get("count", 50))
    if (H <= 0 or t_min <= 0 or t_max < t_min or count < 1
            or (count > 1 and t_max == t_min)):
        raise ConfigError(
            f"invalid nodoid range: H={H}, t in [{t_min}, {t_max}], count={count}")
    if count == 1:
        ts = np.array([t_min])
    elif nconf.get("log_spacing", True):
        ts = np.logspace(math.log10(t_min), math.log10(t_max), count)
    else:
        ts = np.linspace(t_min, t_max, count)
    rows = []
    hs, rhos = [], []
    for t in ts:
        pa = nodoid.params_from_t(H, float(t))
        rows.append((float(t), pa.c, pa.rho, pa.h, pa.h_error, pa.rho - pa.t))
        hs.append(pa.h)
        rhos.append(pa.rho)
    path = Path(out_dir) / "nodoid_table.csv"
    _write_csv(path, ["t", "c", "rho", "h", "h_error", "neck_gap"], rows)
    man.add_output(path)
    hs, rhos = np.array(hs), np.array(rhos)
    h_gap = float(abs(hs[-1] - 0.5 / H))
    neck_gap_err = float(abs((rhos[-1] - ts[-1]) - 0.5 / H))
    man.verdict("h_strictly_increasing", bool(np.all(np.diff(hs) > 0)))
    man.verdict("rho_strictly_increasing", bool(np.all(np.diff(rhos) > 0)))
    man.verdict("h_below_half_over_H", bool(np.all(hs < 0.5 / H)))
    man.verdict("last_h_vs_limit_half_over_H", h_gap)
    man.verdict("last_h_vs_limit_within_1e-2", bool(h_gap < 1e-2))
    man.verdict("last_neck_gap_vs_limit_half_over_H", neck_gap_err)
    man.verdict("last_neck_gap_vs_limit_within_1e-3", bool(neck_gap_err < 1e-3))
    if conf.get("output", {}).get("plots", True):
        t_prof = float(nconf.get("profile_t", 1.0))
        prof = nodoid.profile(nodoid.params_from_t(H, t_prof),
                              int(nconf.get("profile_samples", 400)))
        ppath = Path(out_dir) / "nodoid_profile.svg"
        svgplot.line_plot(ppath,
                          [(f"t={t_prof:g}", list(prof.r), list(prof.u)),
                           (f"mirror", list(prof.r), list(-prof.u))],
                          title=f"neck profile, H={H:g}", xlabel="radius",
                          ylabel="height")
        man.add_output(ppath)
    man.write()
    return man


def _solve_scenario(conf, out_dir, man):
    p, case = _build_problem(conf)
    cfg = _build_solver_config(conf)
    u = solver.solve_dirichlet(p, cfg)
    oconf = conf.get("output", {})
    if oconf.get("solution_csv", True):
        path = Path(out_dir) / "solution.csv"
        u.to_csv(path)
        man.add_output(path)
    if oconf.get("solution_grid", True):
        path = Path(out_dir) / "solution.grid"
        u.to_binary(path)
        man.add_output(path)
    man.verdict("solver_residual_inf_norm", solver.solution_residual(u, p, cfg))
    return p, case, cfg, u


def cmd_solve(conf, out_dir, jobs):
    man = Manifest("solve", conf, out_dir)
    p, case, cfg, u = _solve_scenario(conf, out_dir, man)
    man.verdict("value_at_origin", float(u.at(min(max(0.0, p.x_lo), p.x_hi), 0.0)))
    man.write()
    return man


def cmd_sweep(conf, out_dir, jobs):
    man = Manifest("sweep", conf, out_dir)
    p, case = _build_problem(conf)
    cfg = _build_solver_config(conf)
    wconf = conf.get("sweep", {})
    ns = [float(n) for n in wconf.get("truncations", [4, 6, 8])]
    window = wconf.get("window", [-1.0, 1.0])
    floor = float(wconf.get("floor", 1e-9))
    series = solver.uniqueness_gap(p, case, tuple(window), ns, cfg, jobs=jobs)
    rows = []
    for k, (n, g) in enumerate(zip(series.truncations, series.gaps)):
        step_ok = True if k == 0 else (
            series.gaps[k] < series.gaps[k - 1]
            or (series.gaps[k] <= floor and series.gaps[k - 1] <= floor))
        rows.append((n, g, floor, step_ok))
    path = Path(out_dir) / "sweep_gap.csv"
    _write_csv(path, ["truncation", "gap", "floor", "decreasing_or_floor"], rows)
    man.add_output(path)
    man.verdict("strictly_decreasing", series.strictly_decreasing)
    man.verdict("decreasing_to_floor", series.decreasing_to_floor(floor))
    if conf.get("output", {}).get("plots", True):
        ppath = Path(out_dir) / "sweep_gap.svg"
        svgplot.line_plot(ppath, [("gap", series.truncations,
                                   [max(g, 1e-17) for g in series.gaps])],
                          title="extremal gap vs truncation", xlabel="truncation",
                          ylabel="max window gap", logy=True)
        man.add_output(ppath)
    man.write()
    return man


def cmd_circle_check(conf, out_dir, jobs):
    man = Manifest("circle-check", conf, out_dir)
    cconf = conf.get("circle_check", {})
    if "R" not in cconf:
        raise ConfigError("circle_check.R is required")
    R = float(cconf["R"])
    kind = cconf.get("kind", "under")
    sconf = conf.get("scenario", {})
    H = float(sconf.get("H", 1.0))
    trunc = conf.get("domain", {}).get("truncation", [-4.0, 4.0])
    f = _build_boundary(conf, H, trunc)
    kwargs = {}
    if "centers" in cconf:
        kwargs["centers"] = int(cconf["centers"])
    if "samples" in cconf:
        kwargs["samples"] = int(cconf["samples"])
    if kind == "under":
        rep = boundary.check_uniform_under_condition(f, R, **kwargs)
        rows = [("verdict", rep.verdict, ""),
                ("radius", R, ""),
                ("subwindow", rep.subwindow[0], rep.subwindow[1]),
                ("touched_count", len(rep.touched), ""),
                ("violation_count", len(rep.violations), "")]
        for v in rep.violations[:50]:
            rows.append(("violation", float(v), ""))
        path = Path(out_dir) / "circle_check.csv"
        _write_csv(path, ["record", "value", "extra"], rows)
        man.add_output(path)
        man.verdict("verdict", rep.verdict)
        man.write()
        if not rep.holds:
            witness = float(rep.violations[0]) if len(rep.violations) else None
            man.fail("certification-failed",
                     f"under condition {rep.verdict} at radius {R}"
                     + (f"; witness x={witness}" if witness is not None else ""))
            man.write()
            raise CertificationError(man.data["reason"])
        return man
    if kind == "upper":
        pts = boundary.find_upper_condition_points(f, R, **kwargs)
        path = Path(out_dir) / "circle_check.csv"
        _write_csv(path, ["record", "value", "extra"],
                   [("verdict", "points", ""), ("radius", R, ""),
                    ("count", len(pts), "")]
                   + [("point", float(v), "") for v in pts[:2000]])
        man.add_output(path)
        man.verdict("count", int(len(pts)))
        man.write()
        return man
    raise ConfigError(f"unknown circle_check.kind {kind!r}")


def _default_rectangles(p):
    w = min(p.x_hi - p.x_lo, 2.0 * p.l)
    cx = 0.5 * (p.x_lo + p.x_hi)
    out = []
    for s in (0.8, 0.55, 0.3):
        out.append([cx - 0.5 * s * (p.x_hi - p.x_lo), cx + 0.5 * s * (p.x_hi - p.x_lo),
                    -s * p.l, s * p.l])
    return out


def cmd_flux(conf, out_dir, jobs):
    man = Manifest("flux", conf, out_dir)
    p, case, cfg, u = _solve_scenario(conf, out_dir, man)
    fconf = conf.get("flux", {})
    rows = []

    rects = fconf.get("rectangles", _default_rectangles(p))
    srows = []
    for k, rect in enumerate(rects):
        rep = flux.stokes_residual(u, tuple(float(v) for v in rect))
        srows.append((f"rect{k}", rect[0], rect[1], rect[2], rect[3],
                      rep.circulation, rep.expected, rep.residual, rep.error))
    spath = Path(out_dir) / "stokes_report.csv"
    _write_csv(spath, ["id", "x0", "x1", "y0", "y1", "circulation",
                       "expected_2HA", "residual", "error_estimate"], srows)
    man.add_output(spath)

    arc_samples = int(fconf.get("arc_samples", 401))
    for k, a in enumerate(fconf.get("arcs", [0.0])):
        kind = "collin" if case.kind == "collin" else "lopez"
        arc = flux.make_arc(kind, float(a), p.H, arc_samples,
                            t=case.t if case.kind == "lopez" else None)
        inside = ((arc.vertices[:, 0] >= p.x_lo) & (arc.vertices[:, 0] <= p.x_hi)
                  & (np.abs(arc.vertices[:, 1]) <= p.l * (1 + 1e-12)))
        if not np.all(inside):
            man.verdict(f"arc{k}_skipped_outside_hull", True)
            continue
        rep = flux.divergence_diagnostic(u, arc)
        rows.append((arc.tag, rep.length, rep.flux, rep.ratio, rep.error))

    n_rand = int(fconf.get("random_paths", 0))
    if n_rand:
        rng = np.random.default_rng(int(fconf.get("seed", 0)))
        for k in range(n_rand):
            m = int(rng.integers(2, 6))
            verts = np.column_stack([
                rng.uniform(p.x_lo, p.x_hi, m + 1),
                rng.uniform(-p.l, p.l, m + 1)])
            keep = np.concatenate([[True], np.any(np.diff(verts, axis=0) != 0.0,
                                                  axis=1)])
            verts = verts[keep]
            if len(verts) < 2:
                continue
            pth = flux.ArcPath(vertices=verts, tag=f"rand{k}")
            fv = flux.integrate_along(u, pth)
            rows.append((pth.tag, fv.length, fv.value,
                         fv.value / fv.length if fv.length else 0.0, fv.error))

    thresholds = fconf.get("gap_thresholds", [])
    if thresholds:
        up, low = solver.extremal_fields(p, case, cfg)
        diff = ScalarField(x=up.x, y=up.y, values=up.values - low.values, H=0.0)
        anchor = float(fconf.get("arcs", [0.0])[0])
        kind = "collin" if case.kind == "collin" else "lopez"
        arc = flux.make_arc(kind, anchor, p.H, arc_samples,
                            t=case.t if case.kind == "lopez" else None)
        for c in thresholds:
            pieces = flux.clip_to_region(
                arc, lambda x, y, _c=float(c): diff.at(
                    np.clip(x, p.x_lo, p.x_hi), np.clip(y, -p.l, p.l)) >= 2.0 * _c)
            total = 0.0
            tot_len = 0.0
            for piece in pieces:
                fu = flux.integrate_along(up, piece)
                fl_ = flux.integrate_along(low, piece)
                total += fu.value - fl_.value
                tot_len += piece.length
            rows.append((f"gap-arc(c={float(c)!r})", tot_len, total,
                         total / tot_len if tot_len else 0.0, 0.0))
            man.verdict(f"gap_arc_pieces_c={float(c)!r}", len(pieces))

    path = Path(out_dir) / "flux_report.csv"
    _write_csv(path, ["path_id", "length", "integral", "ratio", "error_estimate"],
               rows)
    man.add_output(path)
    man.verdict("max_abs_ratio", max((abs(r[3]) for r in rows), default=0.0))
    if conf.get("output", {}).get("plots", True) and srows:
        ppath = Path(out_dir) / "stokes_residuals.svg"
        svgplot.line_plot(
            ppath, [("residual", list(range(len(srows))),
                     [max(r[7], 1e-17) for r in srows])],
            title="loop residual |circulation - 2HA|", xlabel="rectangle index",
            ylabel="residual", logy=True)
        man.add_output(ppath)
    man.write()
    return man


def cmd_estimates(conf, out_dir, jobs):
    man = Manifest("estimates", conf, out_dir)
    p, case, cfg, u = _solve_scenario(conf, out_dir, man)
    report = solver.verify_height_estimates(u, p.boundary, case, p, cfg,
                                            cap_M=conf.get("estimates", {}).get("cap_M"))
    rows = []
    for e in report.entries:
        rows.append((e.name,
                     "pass" if e.passed else ("n/a" if e.passed is None else "fail"),
                     e.worst_slack if math.isfinite(e.worst_slack) else "",
                     f"({e.worst_node[0]!r};{e.worst_node[1]!r})" if e.worst_node else "",
                     e.bound))
    path = Path(out_dir) / "estimates.csv"
    _write_csv(path, ["estimate", "status", "worst_slack", "worst_node", "bound"],
               rows)
    man.add_output(path)
    man.verdict("tol", report.tol)
    man.verdict("all_passed", report.all_passed)
    man.write()
    return man


_COMMANDS = {
    "nodoid-table": cmd_nodoid_table,
    "solve": cmd_solve,
    "sweep": cmd_sweep,
    "circle-check": cmd_circle_check,
    "flux": cmd_flux,
    "estimates": cmd_estimates,
}


def _setup_logging():
    level = {"quiet": logging.WARNING, "info": logging.INFO,
             "debug": logging.DEBUG}.get(os.environ.get("CMC_LOG", "info"),
                                         logging.INFO)
    logging.basicConfig(level=level,
                        format="%(levelname)s %(name)s: %(message)s")


def main(argv=None):
    _setup_logging()
    parser = argparse.ArgumentParser(
        prog="cmcstrip",
        description="prescribed-curvature strip graphs: solves, barriers, flux")
    parser.add_argument("command", choices=sorted(_COMMANDS))
    parser.add_argument("--config", required=True, help="TOML scenario file")
    parser.add_argument("--out", default="out", help="output directory")
    parser.add_argument("--jobs", type=int, default=1,
                        help="parallel workers for sweeps")
    args = parser.parse_args(argv)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        conf = load_config(args.config)
        _COMMANDS[args.command](conf, out_dir, max(1, args.jobs))
        return 0
    except ConfigError as exc:
        log.error("config error: %s", exc)
        _write_failure_manifest(args, out_dir, "config-error", str(exc))
        return 2
    except CertificationError as exc:
        log.error("certification failure: %s", exc)
        _write_failure_manifest(args, out_dir, "certification-failed", str(exc))
        return 3
    except SolverError as exc:
        log.error("solver failure: %s", exc)
        _write_failure_manifest(args, out_dir, "solver-failed", str(exc))
        return 1
    except ValueError as exc:
        # invalid geometry/range reaching a constructor counts as a config error
        log.error("invalid configuration value: %s", exc)
        _write_failure_manifest(args, out_dir, "config-error", str(exc))
        return 2


def _write_failure_manifest(args, out_dir, status, reason):
    try:
        conf = load_config(args.config)
    except Exception:
        conf = {}
    man = Manifest(args.command, conf, out_dir)
    man.fail(status, reason)
    man.write()


if __name__ == "__main__":
    sys.exit(main())
