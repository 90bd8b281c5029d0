"""Experiment driver.

Configs are flat ``key = value`` text with dotted sections::

    model.id = burgers
    data.id = step
    data.left = 1
    data.right = 0
    scheme.names = godunov, grp
    grid.lambda = 0.5
    grid.k0 = 0.03125
    grid.domain = -0.5, 1.0
    time.T = 1.0
    study.kinds = run, convergence

Exit codes: 0 when every enabled ``check.*`` passes, 2 when one fails, 1 on
invalid configs and runtime errors.
"""
import argparse
import hashlib
import json
import math
import os
import sys
import tempfile
import warnings
from dataclasses import asdict, dataclass, field
from typing import Dict, List

import numpy as np

from . import __version__
from .analysis import (RefinementFamily, aligned_rectangles, balance_study, consistency_study,
                       convergence_study, godunov_compatibility, reference_entropy_solution,
                       uniqueness_cross_check)
from .errors import CFLError, ConfigError, DomainError, NumericalError, UsageError
from .flux import SCHEMES, SchemeId
from .mesh import LIMITERS, BoundaryPolicy, Grid, project
from .models import MODEL_IDS, IsentropicEuler, make_model
from .problems import (AdvectionTranslate, BurgersRiemann, BurgersSmooth, Constant, EulerProfile,
                       Gaussian, Sine, StationaryShock, Step, Sum, random_bv)

STUDIES = {
    "run": "evolve every scheme on the base grid and export requested time levels",
    "consistency": "E(k) of the interface-pair defect and the fitted order q_hat",
    "convergence": "L1 errors at T against a reference, fitted rate, L1_loc metric",
    "compatibility": "coincidence with Godunov on piecewise constants and the L1 gap G(k)",
    "balance": "balance-law residuals on grid-aligned rectangles under refinement",
    "cross-check": "L1 distance between two schemes' solutions across the family",
}
DATA_IDS = ("constant", "sine", "step", "sine-step", "gaussian", "random-bv", "stationary-shock")
EXACT_IDS = ("advection-translate", "burgers-smooth-prebreak", "burgers-shock-riemann")

# key -> (kind, default); kind in float, int, str, list, floats, bool
KEYS = {
    "model.id": ("str", None),
    "model.a": ("float", 1.0),
    "model.gamma": ("float", 1.4),
    "model.kappa": ("float", 1.0),
    "data.id": ("str", None),
    "data.value": ("float", 0.0),
    "data.mean": ("float", 0.0),
    "data.amp": ("float", 1.0),
    "data.freq": ("float", 1.0),
    "data.left": ("float", 1.0),
    "data.right": ("float", 0.0),
    "data.x0": ("float", 0.0),
    "data.base": ("float", 1.0),
    "data.width": ("float", 0.1),
    "data.pieces": ("int", 8),
    "data.low": ("float", -1.0),
    "data.high": ("float", 1.0),
    "data.velocity": ("float", 0.0),
    "scheme.names": ("list", ["godunov"]),
    "scheme.order": ("int", None),
    "scheme.limiter": ("str", "minmod"),
    "grid.lambda": ("float", None),
    "grid.k0": ("float", None),
    "grid.domain": ("floats", [0.0, 1.0]),
    "grid.levels": ("int", 5),
    "time.T": ("float", None),
    "boundary.kind": ("str", "periodic"),
    "boundary.padding": ("int", 2),
    "cfl.target": ("float", 1.0),
    "study.kinds": ("list", ["run"]),
    "study.refinement_ratio": ("int", 64),
    "study.extrapolate": ("bool", True),
    "study.reference": ("str", "godunov"),
    "study.exact": ("str", None),
    "study.window": ("floats", None),
    "study.cross": ("list", None),
    "study.rectangles": ("int", 10),
    "study.quadrature_points": ("int", 256),
    "study.rule": ("str", "midpoint"),
    "output.dir": ("str", "fvlab-out"),
    "output.levels": ("list", ["final"]),
    "run.seed": ("int", 0),
    "run.jobs": ("int", 1),
    "check.q_min": ("float", None),
    "check.q_max": ("float", None),
    "check.saturated": ("bool", None),
    "check.rate_min": ("float", None),
    "check.rate_max": ("float", None),
    "check.decreasing": ("bool", None),
    "check.exponent_min": ("float", None),
    "check.ratio_max": ("float", None),
    "check.coincidence_max": ("float", None),
    "check.cross_factor": ("float", None),
    "check.mass_drift_max": ("float", None),
}


@dataclass
class ExperimentConfig:
    values: Dict[str, object]
    text_hash: str
    warnings: List[str] = field(default_factory=list)

    def __getitem__(self, key):
        return self.values[key]

    @property
    def model(self):
        return make_model(self["model.id"], a=self["model.a"], gamma=self["model.gamma"],
                          kappa=self["model.kappa"])

    @property
    def schemes(self):
        return [scheme_from(n, self["scheme.order"], self["scheme.limiter"]) for n in self["scheme.names"]]

    @property
    def boundary(self):
        return BoundaryPolicy(self["boundary.kind"], self["boundary.padding"])

    @property
    def domain(self):
        return tuple(self["grid.domain"])

    @property
    def base_grid(self):
        return Grid.from_step(self["grid.k0"], self["grid.lambda"], *self.domain)


def scheme_from(name, order=None, limiter="minmod"):
    return SchemeId.parse(name, order=order, limiter=limiter)


def _convert(kind, raw):
    if kind == "float":
        return float(raw)
    if kind == "int":
        v = float(raw)
        if v != int(v):
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(v)
    if kind == "bool":
        low = raw.lower()
        if low in ("true", "yes", "1", "on"):
            return True
        if low in ("false", "no", "0", "off"):
            return False
        raise ValueError(f"expected a boolean, got {raw!r}")
    if kind == "list":
        return [p.strip() for p in raw.split(",") if p.strip()]
    if kind == "floats":
        return [float(p) for p in raw.split(",") if p.strip()]
    return raw


def parse_config(text):
    """Syntax pass: (values by key, line number by key, diagnostics)."""
    values, lines, diags = {}, {}, []
    for no, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            diags.append((f"line {no}", f"expected 'key = value', got {body!r}"))
            continue
        key, raw = (s.strip() for s in body.split("=", 1))
        if key not in KEYS:
            diags.append((f"line {no}: {key}", "unknown key"))
            continue
        if key in values:
            diags.append((f"line {no}: {key}", f"duplicate key (first set on line {lines[key]})"))
            continue
        try:
            values[key] = _convert(KEYS[key][0], raw)
        except ValueError as exc:
            diags.append((f"line {no}: {key}", str(exc)))
            continue
        lines[key] = no
    return values, lines, diags


def validate_config(text):
    """Parse and validate a config; raises ConfigError carrying every diagnostic."""
    values, lines, diags = parse_config(text)

    def where(key):
        return f"line {lines[key]}: {key}" if key in lines else key

    def bad(key, msg):
        diags.append((where(key), msg))

    for key, (_, default) in KEYS.items():
        values.setdefault(key, default)
    for key in ("model.id", "data.id", "grid.lambda", "grid.k0", "time.T"):
        if values[key] is None:
            bad(key, "required key is missing")
    if values["model.id"] is not None and values["model.id"] not in MODEL_IDS:
        bad("model.id", f"unknown model {values['model.id']!r}; allowed: {', '.join(MODEL_IDS)}")
    if values["data.id"] is not None and values["data.id"] not in DATA_IDS:
        bad("data.id", f"unknown initial data {values['data.id']!r}; allowed: {', '.join(DATA_IDS)}")
    for name in values["scheme.names"]:
        base = name.split("/")[0]
        if base not in SCHEMES:
            bad("scheme.names", f"unknown scheme {base!r}; allowed: {', '.join(SCHEMES)}")
    if values["scheme.limiter"] not in LIMITERS:
        bad("scheme.limiter", f"unknown limiter {values['scheme.limiter']!r}; allowed: {', '.join(LIMITERS)}")
    if values["scheme.order"] not in (None, 1, 2):
        bad("scheme.order", "order must be 1 or 2")
    for kind in values["study.kinds"]:
        if kind not in STUDIES:
            bad("study.kinds", f"unknown study {kind!r}; allowed: {', '.join(STUDIES)}")
    if values["boundary.kind"] not in ("periodic", "outflow"):
        bad("boundary.kind", "allowed: periodic, outflow")
    if values["study.reference"] not in ("godunov", "exact"):
        bad("study.reference", "allowed: godunov, exact")
    if values["study.exact"] is not None and values["study.exact"] not in EXACT_IDS:
        bad("study.exact", f"allowed: {', '.join(EXACT_IDS)}")
    if values["study.rule"] not in ("midpoint", "gauss"):
        bad("study.rule", "allowed: midpoint, gauss")
    if values["study.cross"] is not None and len(values["study.cross"]) != 2:
        bad("study.cross", "expected exactly two schemes")
    if "cross-check" in values["study.kinds"] and values["study.cross"] is None:
        bad("study.cross", "cross-check study needs two schemes")
    if "convergence" in values["study.kinds"] and values["study.reference"] == "exact" \
            and values["study.exact"] is None:
        bad("study.exact", "an exact reference needs study.exact")
    if len(values["grid.domain"]) != 2 or values["grid.domain"][1] <= values["grid.domain"][0]:
        bad("grid.domain", "expected 'a, b' with a < b")
    if values["study.window"] is not None and len(values["study.window"]) != 2:
        bad("study.window", "expected 'c, d'")
    for key in ("grid.lambda", "grid.k0", "time.T"):
        if values[key] is not None and not values[key] > 0:
            bad(key, "must be positive")
    if not 0 < values["cfl.target"] <= 1:
        bad("cfl.target", "must lie in (0, 1]")
    if values["grid.levels"] < 1:
        bad("grid.levels", "must be at least 1")
    if values["run.jobs"] < 1:
        bad("run.jobs", "must be at least 1")
    notes = []
    if not diags:
        try:
            Grid.from_step(values["grid.k0"], values["grid.lambda"], *values["grid.domain"])
        except UsageError as exc:
            bad("grid.k0", str(exc))
        try:
            make_model(values["model.id"], a=values["model.a"], gamma=values["model.gamma"],
                       kappa=values["model.kappa"])
        except (UsageError, DomainError) as exc:
            bad("model.id", str(exc))
    if not diags:
        k0, T = values["grid.k0"], values["time.T"]
        n = max(1, int(round(T / k0)))
        if abs(n * k0 - T) > 1e-12 * max(T, k0):
            notes.append(f"time.T={T} snapped to {n * k0!r} (N={n} steps of k0={k0!r})")
            values["time.T"] = n * k0
    if diags:
        raise ConfigError(diags)
    digest = hashlib.sha256(text.encode()).hexdigest()[:16]
    cfg = ExperimentConfig(values, digest, notes)
    try:
        u0 = initial_data(cfg, np.random.default_rng(values["run.seed"]))
        gf = project(u0, cfg.base_grid, 1, boundary=cfg.boundary, dim=cfg.model.dim)
        product = values["grid.lambda"] * cfg.model.wave_speed_bound(gf.avg)
        if product > values["cfl.target"]:
            notes.append(f"a-priori CFL product {product:.6g} exceeds target {values['cfl.target']}")
    except (DomainError, UsageError) as exc:
        raise ConfigError([("data.id", str(exc))]) from None
    return cfg


def initial_data(cfg, rng):
    v = cfg.values
    did = v["data.id"]
    if did == "constant":
        prof = Constant(v["data.value"])
    elif did == "sine":
        prof = Sine(v["data.mean"], v["data.amp"], v["data.freq"])
    elif did == "step":
        prof = Step(v["data.left"], v["data.right"], v["data.x0"])
    elif did == "sine-step":
        prof = Sum((Sine(v["data.mean"], v["data.amp"], v["data.freq"]),
                    Step(v["data.left"], v["data.right"], v["data.x0"])))
    elif did == "gaussian":
        prof = Gaussian(v["data.base"], v["data.amp"], v["data.x0"], v["data.width"])
    elif did == "random-bv":
        a, b = cfg.domain
        prof = random_bv(rng, a, b, v["data.pieces"], v["data.low"], v["data.high"])
    elif did == "stationary-shock":
        model = cfg.model
        if not isinstance(model, IsentropicEuler):
            raise UsageError("stationary-shock data needs the euler-isentropic model")
        return StationaryShock(v["data.left"], v["data.right"], v["data.x0"], v["data.amp"],
                               0.5 * v["data.amp"], model)
    else:
        raise UsageError(f"unknown initial data {did!r}")
    model = cfg.model
    if isinstance(model, IsentropicEuler):
        return EulerProfile(density=prof, velocity=Constant(v["data.velocity"]), model=model)
    return prof


def exact_solution(cfg, u0):
    v = cfg.values
    eid = v["study.exact"]
    if eid == "advection-translate":
        return AdvectionTranslate(u0, v["model.a"], cfg.domain if v["boundary.kind"] == "periodic" else None)
    if eid == "burgers-smooth-prebreak":
        return BurgersSmooth(u0, span=cfg.domain)
    if eid == "burgers-shock-riemann":
        return BurgersRiemann(v["data.left"], v["data.right"], v["data.x0"])
    raise UsageError(f"unknown exact solution {eid!r}")


# -- artifacts -----------------------------------------------------------------

def atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def csv_text(columns, rows, units, config_hash):
    out = [f"# units: {units}; config_hash={config_hash}", ",".join(columns)]
    for row in rows:
        out.append(",".join(_fmt(v) for v in row))
    return "\n".join(out) + "\n"


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    if v is None:
        return "nan"
    return f"{float(v):.16e}"


@dataclass
class Check:
    name: str
    passed: bool
    detail: str

    def line(self):
        return f"{'PASS' if self.passed else 'FAIL'} {self.name}: {self.detail}"


@dataclass
class Outcome:
    status: int
    artifacts: Dict[str, str]
    checks: List[Check]
    manifest: dict
    message: str = ""


def _bound_checks(cfg, prefix, value, lo_key=None, hi_key=None):
    checks = []
    v = cfg.values
    if lo_key and v[lo_key] is not None:
        ok = value is not None and value >= v[lo_key]
        checks.append(Check(f"{prefix} >= {v[lo_key]}", ok, f"measured {value}"))
    if hi_key and v[hi_key] is not None:
        ok = value is not None and value <= v[hi_key]
        checks.append(Check(f"{prefix} <= {v[hi_key]}", ok, f"measured {value}"))
    return checks


class Experiment:
    def __init__(self, cfg, jobs=None):
        self.cfg = cfg
        self.jobs = jobs or cfg["run.jobs"]
        self.rng = np.random.default_rng(cfg["run.seed"])
        self.u0 = initial_data(cfg, self.rng)
        self.model = cfg.model
        self.files = {}
        self.checks = []
        self.summaries = {}

    def family(self):
        cfg = self.cfg
        return RefinementFamily(cfg["grid.k0"], cfg["grid.levels"], cfg["grid.lambda"], cfg.domain,
                                self.model, self.u0, cfg["time.T"], cfg.boundary)

    def emit(self, name, columns, rows, units):
        self.files[name] = csv_text(columns, rows, units, self.cfg.text_hash)

    def study_run(self):
        cfg = self.cfg
        grid = cfg.base_grid
        from .scheme import run
        for s in cfg.schemes:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                traj = run(self.u0, s, grid, self.model, cfg["time.T"], cfg.boundary,
                           cfl_target=cfg["cfl.target"])
            wanted = []
            for item in cfg["output.levels"]:
                wanted.append(traj.nsteps if item == "final" else int(item))
            for n in sorted(set(wanted)):
                if not 0 <= n <= traj.nsteps:
                    raise UsageError(f"output.levels: level {n} outside 0..{traj.nsteps}")
                header = (f"units: x in length, averages in state units, slopes per length; "
                          f"t={n * traj.k:.16e}; config_hash={cfg.text_hash}")
                self.files[f"run_{s.name}_n{n}.csv"] = traj.level(n).to_csv(header)
            drift = traj.mass_drift()
            self.summaries[f"run/{s}"] = {
                "steps": traj.nsteps, "k": traj.k, "cfl_max": float(traj.cfl.max(initial=0.0)),
                "mass_drift": drift, "mass": traj.mass.tolist(), "cfl": traj.cfl.tolist(),
                "max_norm": traj.max_norm.tolist()}
            if cfg["check.mass_drift_max"] is not None:
                self.checks.append(Check(f"run {s} mass drift <= {cfg['check.mass_drift_max']}",
                                         drift <= cfg["check.mass_drift_max"], f"measured {drift:.3e}"))

    def study_consistency(self):
        cfg = self.cfg
        for s in cfg.schemes:
            rep, meas = consistency_study(s, self.u0, self.model, cfg.base_grid, cfg["grid.levels"],
                                          cfg.boundary, cfg["study.refinement_ratio"],
                                          cfg["study.extrapolate"], jobs=self.jobs)
            fitted = [None] * len(rep.ks) if rep.saturated else \
                [10 ** (rep.intercept + rep.p_hat * math.log10(k)) for k in rep.ks]
            rows = [(k, e, f, rep.q_hat, rep.residual) for k, e, f in zip(rep.ks, rep.errors, fitted)]
            self.emit(f"consistency_{s.name}.csv", ["k", "error", "fitted", "q_hat", "residual"], rows,
                      "k in time, error in state*length")
            self.summaries[f"consistency/{s}"] = {"summary": rep.summary(), "q_hat": rep.q_hat,
                                                 "saturated": rep.saturated, "residual": rep.residual}
            if cfg["check.saturated"] is not None:
                self.checks.append(Check(f"consistency {s} saturated", rep.saturated == cfg["check.saturated"],
                                         rep.summary()))
            if not rep.saturated:
                self.checks += _bound_checks(cfg, f"consistency {s} q_hat", rep.q_hat,
                                             "check.q_min", "check.q_max")

    def reference(self, family):
        cfg = self.cfg
        if cfg["study.reference"] == "exact":
            return exact_solution(cfg, self.u0)
        return reference_entropy_solution(self.u0, self.model, family.finest, cfg["time.T"],
                                          cfg.boundary, cfg["study.refinement_ratio"])

    def window(self, family):
        w = self.cfg["study.window"]
        return tuple(w) if w is not None else family.default_window()

    def study_convergence(self):
        cfg = self.cfg
        family = self.family()
        ref = self.reference(family)
        for s in cfg.schemes:
            rep = convergence_study(s, family, ref, self.window(family), jobs=self.jobs)
            if rep.blowup:
                self.summaries[f"convergence/{s}"] = {"blowup": rep.blowup}
                self.checks.append(Check(f"convergence {s} bounded", False, rep.blowup))
                continue
            rows = [(k, e, l, n, rep.rate) for k, e, l, n in zip(rep.ks, rep.errors, rep.l1loc, rep.sup_norms)]
            self.emit(f"convergence_{s.name}.csv", ["k", "l1_error", "l1loc", "sup_norm", "rate"], rows,
                      "k in time, errors in state*length")
            self.summaries[f"convergence/{s}"] = {"rate": rep.rate, "residual": rep.fit.residual,
                                                 "bounded": rep.bounded,
                                                 "strictly_decreasing": rep.strictly_decreasing}
            self.checks += _bound_checks(cfg, f"convergence {s} rate", rep.rate,
                                         "check.rate_min", "check.rate_max")
            if cfg["check.decreasing"]:
                self.checks.append(Check(f"convergence {s} strictly decreasing", rep.strictly_decreasing,
                                         f"errors {np.array2string(rep.errors, precision=3)}"))

    def study_compatibility(self):
        cfg = self.cfg
        for s in cfg.schemes:
            if s.name == "godunov":
                continue
            rep = godunov_compatibility(s, self.u0, self.model, cfg.base_grid, cfg["grid.levels"],
                                        cfg.boundary)
            rows = [(k, g, ga, rep.exponent) for k, g, ga in zip(rep.ks, rep.gaps, rep.average_gaps)]
            self.emit(f"compatibility_{s.name}.csv", ["k", "gap", "average_gap", "exponent"], rows,
                      "k in time, gaps in state*length")
            self.summaries[f"compatibility/{s}"] = {"coincidence": rep.coincidence, "exponent": rep.exponent}
            if cfg["check.coincidence_max"] is not None:
                self.checks.append(Check(f"compatibility {s} coincidence <= {cfg['check.coincidence_max']}",
                                         rep.coincidence <= cfg["check.coincidence_max"],
                                         f"measured {rep.coincidence:.3e}"))
            self.checks += _bound_checks(cfg, f"compatibility {s} exponent", rep.exponent, "check.exponent_min")

    def study_balance(self):
        cfg = self.cfg
        family = self.family()
        rects = aligned_rectangles(family.grid(0), cfg["time.T"], cfg["study.rectangles"], cfg["run.seed"])
        from .scheme import run
        for s in cfg.schemes:
            trajs = [run(self.u0, s, family.grid(m), self.model, cfg["time.T"], cfg.boundary)
                     for m in range(family.levels)]
            st = balance_study(trajs, rects, self.model, cfg["study.quadrature_points"], cfg["study.rule"])
            rows = [(k, w, st.fit.exponent) for k, w in zip(st.ks, st.worst)]
            self.emit(f"balance_{s.name}.csv", ["k", "worst_residual", "exponent"], rows,
                      "k in time, residual in state*length")
            self.summaries[f"balance/{s}"] = {"exponent": st.fit.exponent,
                                             "finest_over_coarsest": st.finest_over_coarsest}
            self.checks += _bound_checks(cfg, f"balance {s} exponent", st.fit.exponent, "check.exponent_min")
            self.checks += _bound_checks(cfg, f"balance {s} finest/coarsest", st.finest_over_coarsest,
                                         hi_key="check.ratio_max")

    def study_cross_check(self):
        cfg = self.cfg
        family = self.family()
        a, b = (scheme_from(n, cfg["scheme.order"], cfg["scheme.limiter"]) for n in cfg["study.cross"])
        rep = uniqueness_cross_check(a, b, family, self.window(family), jobs=self.jobs)
        rows = [(k, d, rep.increment) for k, d in zip(rep.ks, rep.distances)]
        self.emit("crosscheck.csv", ["k", "distance", "increment"], rows, "k in time, distances in state*length")
        self.summaries[f"cross-check/{a}~{b}"] = {"distances": rep.distances.tolist(),
                                                 "increment": rep.increment}
        if cfg["check.cross_factor"] is not None:
            bound = cfg["check.cross_factor"] * rep.increment
            self.checks.append(Check(f"cross-check {a} vs {b} finest <= {cfg['check.cross_factor']} x increment",
                                     rep.distances[-1] <= bound,
                                     f"distance {rep.distances[-1]:.3e}, bound {bound:.3e}"))


def run_experiment(cfg, out_dir=None, jobs=None):
    """Execute the configured studies; returns an Outcome (artifacts written atomically)."""
    out_dir = out_dir or cfg["output.dir"]
    manifest = {"fvlab_version": __version__, "config_hash": cfg.text_hash,
                "config": {k: v for k, v in cfg.values.items()}, "warnings": list(cfg.warnings),
                "studies": cfg["study.kinds"]}
    try:
        exp = Experiment(cfg, jobs)
        for kind in cfg["study.kinds"]:
            getattr(exp, "study_" + kind.replace("-", "_"))()
    except (CFLError, NumericalError, DomainError, UsageError) as exc:
        return Outcome(1, {}, [], manifest, f"error: {exc}")
    manifest["results"] = exp.summaries
    manifest["checks"] = [asdict(c) for c in exp.checks]
    manifest["artifacts"] = sorted(exp.files) + ["summary.txt"]
    summary = [f"config {cfg.text_hash}"] + [f"warning: {w}" for w in cfg.warnings]
    summary += [c.line() for c in exp.checks] or ["no checks enabled"]
    files = dict(exp.files)
    files["summary.txt"] = "\n".join(summary) + "\n"
    files["manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True, default=_json_default) + "\n"
    for name, text in sorted(files.items()):
        atomic_write(os.path.join(out_dir, name), text)
    status = 0 if all(c.passed for c in exp.checks) else 2
    return Outcome(status, {n: os.path.join(out_dir, n) for n in files}, exp.checks, manifest,
                   files["summary.txt"])


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return str(obj)


def build_parser():
    p = argparse.ArgumentParser(prog="fvlab", description="Finite volume consistency and convergence studies.")
    p.add_argument("config", nargs="?", help="experiment config file")
    p.add_argument("--out", help="output directory (overrides output.dir)")
    p.add_argument("--seed", type=int, help="seed for randomized data (overrides run.seed)")
    p.add_argument("--jobs", type=int, help="worker threads for family members (overrides run.jobs)")
    p.add_argument("--list-studies", action="store_true", help="list study kinds and exit")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.list_studies:
        for name, text in STUDIES.items():
            print(f"{name:14s} {text}")
        return 0
    if not args.config:
        print("error: a config file is required", file=sys.stderr)
        return 1
    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    try:
        cfg = validate_config(_override(text, "run.seed", args.seed))
    except ConfigError as exc:
        for loc, msg in exc.diagnostics:
            print(f"{args.config}: {loc}: {msg}", file=sys.stderr)
        return 1
    if args.jobs is not None and args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return 1
    outcome = run_experiment(cfg, args.out, args.jobs)
    if outcome.status == 1:
        print(outcome.message, file=sys.stderr)
    else:
        sys.stdout.write(outcome.message)
    return outcome.status


def _override(text, key, value):
    """Replace (or append) ``key = value`` in config text."""
    if value is None:
        return text
    kept = [ln for ln in text.splitlines() if ln.split("#", 1)[0].split("=", 1)[0].strip() != key]
    return "\n".join(kept + [f"{key} = {value}"]) + "\n"


if __name__ == "__main__":
    sys.exit(main())
