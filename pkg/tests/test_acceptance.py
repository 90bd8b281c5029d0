"""Acceptance criteria, one PASS/FAIL line each (see the "acceptance criteria"
section of the pytest terminal summary)."""
import numpy as np
import pytest

from fvlab.analysis import (RefinementFamily, aligned_rectangles, balance_study, coincidence_defect,
                            consistency_study, convergence_study, godunov_compatibility,
                            reference_entropy_solution, run_family, uniqueness_cross_check)
from fvlab.flux import SCHEMES, SchemeId
from fvlab.mesh import BoundaryPolicy, Grid, l1_distance, project
from fvlab.models import Burgers, IsentropicEuler, LinearAdvection
from fvlab.problems import (AdvectionTranslate, BurgersSmooth, EulerProfile, Gaussian, Sine,
                            StationaryShock, Step, Sum, random_bv)
from fvlab.riemann import euler_star_state
from fvlab.scheme import run

pytestmark = pytest.mark.acceptance

PERIODIC = BoundaryPolicy("periodic")
OUTFLOW = BoundaryPolicy("outflow")
BURGERS = Burgers()
EULER = IsentropicEuler(1.4, 1.0)

SINE = Sine(1.0, 0.5)
STEP = Step(1.0, 0.0, 0.5)
JUMP = Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5)))
PULSE = EulerProfile(Gaussian(1.0, 0.2, 0.5, 0.1), model=EULER)

# every periodic / Euler trajectory produced here is re-examined by criteria 7 and 8
PERIODIC_RUNS = []
EULER_RUNS = []


def _keep(trajectories):
    for tr in trajectories:
        if tr.boundary.kind == "periodic":
            PERIODIC_RUNS.append((str(tr.scheme), tr.mass_drift()))
        if tr.min_density is not None:
            EULER_RUNS.append((str(tr.scheme), float(tr.min_density.min())))
    return trajectories


def _row(name, report, ok):
    return f"{name}: {report.summary()} {'ok' if ok else 'FAILED'}"


def test_criterion_1_consistency_table(criterion):
    g0 = Grid(0, 1, 16, 0.5)
    rows, oks = [], []

    for label, prof in (("sine", SINE), ("step", STEP), ("sine+step", JUMP)):
        rep, _ = consistency_study("godunov/1", prof, BURGERS, g0, 5, PERIODIC)
        ok = rep.saturated and np.all(rep.errors <= 1e-12)
        rows.append(_row(f"godunov/1 {label}", rep, ok))
        oks.append(ok)

    cases = [
        ("godunov/2 jump", "godunov/2", JUMP, -0.2, 0.3),
        ("grp/2 jump", "grp/2", JUMP, 0.8, 1.3),
        ("grp/2 smooth", "grp/2", SINE, 1.7, 2.3),
        ("muscl/2 smooth", "muscl/2", SINE, 1.7, np.inf),
    ]
    for label, scheme, prof, lo, hi in cases:
        rep, _ = consistency_study(scheme, prof, BURGERS, g0, 5, PERIODIC)
        ok = (not rep.saturated) and lo <= rep.q_hat <= hi and rep.residual <= 0.1
        rows.append(_row(label, rep, ok))
        oks.append(ok)

    shock = StationaryShock(model=EULER)
    rep, _ = consistency_study("acoustic/2", shock, EULER, Grid(0, 1, 16, 0.25), 5, OUTFLOW)
    ok = (not rep.saturated) and -0.2 <= rep.q_hat <= 0.4 and rep.residual <= 0.1
    rows.append(_row("acoustic/2 strong jump", rep, ok))
    oks.append(ok)

    assert criterion("1 consistency-order table", all(oks), "; ".join(rows)), rows


def test_criterion_2_balance_residuals(criterion):
    g0 = Grid(-0.5, 1.5, 16, 0.5)
    rects = aligned_rectangles(g0, 1.0, 10, seed=1)
    details, oks = [], []
    for scheme in (SchemeId("godunov", 1), SchemeId("grp", 2)):
        trajs = [run(Step(1.0, 0.0, 0.0), scheme, g0.refine(2 ** m), BURGERS, 1.0, OUTFLOW) for m in range(8)]
        study = balance_study(trajs, rects, BURGERS)
        ok = study.fit.exponent > 0.5 and study.finest_over_coarsest <= 1e-2
        details.append(f"{scheme}: exponent {study.fit.exponent:.3f}, finest/coarsest "
                       f"{study.finest_over_coarsest:.2e}")
        oks.append(ok)
    assert criterion("2 Lax-Wendroff balance residuals", all(oks), "; ".join(details)), details


def test_criterion_3_convergence_rates(criterion):
    details, oks = [], []

    adv = LinearAdvection(1.0)
    fam = RefinementFamily(0.5 / 32, 5, 0.5, (0.0, 1.0), adv, Sine(0.0, 1.0), 0.5, PERIODIC)
    sol = AdvectionTranslate(Sine(0.0, 1.0), 1.0, (0.0, 1.0))
    rep = convergence_study("godunov", fam, lambda x, t: sol(x, t), trajectories=_keep(run_family("godunov", fam)))
    ok = abs(rep.rate - 1.0) <= 0.2 and rep.bounded
    details.append(f"advection/godunov rate {rep.rate:.3f}")
    oks.append(ok)

    fam = RefinementFamily(0.5 / 8, 5, 0.5, (-0.25, 0.75), BURGERS, Step(1.0, 0.0, 0.0), 0.5, OUTFLOW)
    ref = reference_entropy_solution(fam.u0, BURGERS, fam.finest, fam.T, OUTFLOW, 64)
    rep = convergence_study("godunov", fam, ref)
    ok = rep.strictly_decreasing and rep.rate >= 0.6 and rep.bounded
    details.append(f"burgers shock/godunov rate {rep.rate:.3f}, strictly decreasing {rep.strictly_decreasing}")
    oks.append(ok)

    fam = RefinementFamily(0.5 / 32, 5, 0.5, (0.0, 1.0), BURGERS, SINE, 0.25, PERIODIC)
    sol = BurgersSmooth(SINE)
    rep = convergence_study("grp/2", fam, lambda x, t: sol(x, t), trajectories=_keep(run_family("grp/2", fam)))
    ok = abs(rep.rate - 2.0) <= 0.3 and rep.bounded
    details.append(f"burgers smooth/grp rate {rep.rate:.3f}")
    oks.append(ok)

    assert criterion("3 convergence rates", all(oks), "; ".join(details)), details


def test_criterion_4_semigroup_invariants(criterion):
    rng = np.random.default_rng(2024)
    grid = Grid(0, 1, 64, 0.5)
    T = 200 * grid.k
    worst_growth, worst_expansion, steps = -np.inf, -np.inf, []
    for _ in range(5):
        a = run(random_bv(rng, 0, 1), SchemeId("godunov"), grid, BURGERS, T, PERIODIC)
        b = run(random_bv(rng, 0, 1), SchemeId("godunov"), grid, BURGERS, T, PERIODIC)
        _keep([a, b])
        steps.append(a.nsteps)
        for tr in (a, b):
            worst_growth = max(worst_growth, float(np.max(np.diff(tr.max_norm))))
        d = np.array([l1_distance(a.level(n), b.level(n)) for n in range(a.nsteps + 1)])
        worst_expansion = max(worst_expansion, float(np.max(np.diff(d))))
    ok = min(steps) >= 200 and worst_growth <= 1e-12 and worst_expansion <= 1e-12
    detail = (f"{min(steps)} steps x 5 pairs; max one-step growth of max-norm {worst_growth:.2e}, "
              f"of L1 distance {worst_expansion:.2e}")
    assert criterion("4 semigroup invariants", ok, detail), detail


def test_criterion_5_godunov_compatibility(criterion):
    rng = np.random.default_rng(5)
    g0 = Grid(0, 1, 32, 0.5)
    pc = [project(p, g0, 1) for p in (SINE, STEP, JUMP, random_bv(rng, 0, 1), random_bv(rng, 0, 1))]
    euler_pc = [project(PULSE, Grid(0, 1, 32, 0.25), 1, dim=2),
                project(StationaryShock(model=EULER), Grid(0, 1, 32, 0.25), 1, dim=2)]
    details, oks = [], []
    for name in ("grp", "muscl", "acoustic"):
        scheme = SchemeId(name, 2)
        rep = godunov_compatibility(scheme, Sine(1.0, 0.25), BURGERS, g0, 5, PERIODIC, coincidence_data=pc)
        euler = max(coincidence_defect(scheme, xi, EULER, OUTFLOW) for xi in euler_pc)
        coincide = max(rep.coincidence, euler)
        ok = coincide <= 1e-13 and rep.exponent >= 0.9
        details.append(f"{name}: coincidence {coincide:.1e}, gap exponent {rep.exponent:.3f}")
        oks.append(ok)
    assert criterion("5 Godunov compatibility", all(oks), "; ".join(details)), details


def test_criterion_6_uniqueness_cross_check(criterion):
    details, oks = [], []

    fam = RefinementFamily(0.5 / 8, 5, 0.5, (-0.25, 0.75), BURGERS, Step(1.0, 0.0, 0.0), 0.5, OUTFLOW)
    rep = uniqueness_cross_check("godunov", "grp/2", fam)
    ok = rep.within_bound and rep.decreasing
    details.append(f"grp vs godunov (burgers riemann): d_finest {rep.distances[-1]:.2e} <= 3 x "
                   f"{rep.increment:.2e}, decreasing {rep.decreasing}")
    oks.append(ok)

    fam = RefinementFamily(0.25 / 16, 5, 0.25, (0.0, 1.0), EULER, PULSE, 0.25, PERIODIC)
    ta, tb = _keep(run_family("grp/2", fam)), _keep(run_family("muscl/2", fam))
    rep = uniqueness_cross_check("grp/2", "muscl/2", fam, trajectories=(ta, tb))
    ok = rep.within_bound and rep.decreasing
    details.append(f"muscl vs grp (euler pulse): d_finest {rep.distances[-1]:.2e} <= 3 x "
                   f"{rep.increment:.2e}, decreasing {rep.decreasing}")
    oks.append(ok)

    assert criterion("6 uniqueness cross-check", all(oks), "; ".join(details)), details


def _periodic_sweep():
    cases = [(LinearAdvection(1.0), Gaussian(0.5, 1.0, 0.5, 0.1), Grid(0, 1, 64, 0.5)),
             (BURGERS, Sine(0.2, 1.0), Grid(0, 1, 64, 0.5)),
             (EULER, PULSE, Grid(0, 1, 64, 0.25))]
    out = []
    for model, u0, grid in cases:
        for name in SCHEMES:
            for order in (1, 2):
                out.append(run(u0, SchemeId(name, order), grid, model, 0.5, PERIODIC))
    return _keep(out)


def test_criterion_7_conservation(criterion):
    _periodic_sweep()
    worst = max(d for _, d in PERIODIC_RUNS)
    ok = worst <= 1e-12
    detail = f"{len(PERIODIC_RUNS)} periodic runs, worst relative mass drift {worst:.2e}"
    assert criterion("7 conservation", ok, detail), detail


def test_criterion_8_euler_solver_health(criterion):
    rng = np.random.default_rng(8)
    n = 1000
    rl, rr = rng.uniform(0.05, 20.0, n), rng.uniform(0.05, 20.0, n)
    ul, ur = rng.uniform(-2.0, 2.0, n), rng.uniform(-2.0, 2.0, n)
    left, right = np.stack([rl, ul], -1), np.stack([rr, ur], -1)
    a = euler_star_state(left, right, EULER)
    b = euler_star_state(np.stack([rr, -ur], -1), np.stack([rl, -ul], -1), EULER)
    residual = float(np.max(a.residual))
    mirror = float(max(np.max(np.abs(b.pressure - a.pressure) / (1 + np.abs(a.pressure))),
                       np.max(np.abs(b.velocity + a.velocity))))
    if not EULER_RUNS:
        _periodic_sweep()
    rho_min = min(r for _, r in EULER_RUNS)
    ok = residual <= 1e-10 and mirror <= 1e-10 and rho_min > 0
    detail = (f"{n} pairs: max residual {residual:.1e}, mirror defect {mirror:.1e}; "
              f"{len(EULER_RUNS)} Euler runs, min density {rho_min:.3f}")
    assert criterion("8 Euler solver health", ok, detail), detail
