import numpy as np
import pytest
from hypothesis import given, strategies as st

from fvlab import analysis
from fvlab.analysis import (RefinementFamily, aligned_rectangles, average_convergence_check, balance_residual,
                            coincidence_defect, compatibility_gap, consistency_error, convergence_study,
                            fit_consistency_order, fit_power_law, godunov_compatibility, parallel_map,
                            reference_entropy_solution, run_family, uniqueness_cross_check)
from fvlab.errors import InsufficientDataError, NumericalError, UsageError
from fvlab.flux import SchemeId
from fvlab.mesh import BoundaryPolicy, Grid, l1_error, project
from fvlab.models import Burgers, LinearAdvection
from fvlab.problems import AdvectionTranslate, Constant, Sine, Step, Sum
from fvlab.scheme import run, upsilon

BURGERS = Burgers()
PERIODIC = BoundaryPolicy("periodic")
OUTFLOW = BoundaryPolicy("outflow")


def test_parallel_map_keeps_order():
    assert parallel_map(lambda x: x * x, range(10), jobs=4) == [x * x for x in range(10)]


@given(st.floats(-3, 3), st.floats(0.1, 10))
def test_power_fit_recovers_exact_law(p, c):
    x = 2.0 ** -np.arange(5)
    fit = fit_power_law(x, c * x ** p)
    assert fit.exponent == pytest.approx(p, abs=1e-9)
    assert fit.constant == pytest.approx(c, rel=1e-9)
    assert fit.residual <= 1e-9 and fit.conclusive


def test_consistency_fit_exact_cube():
    ks = [1 / 8, 1 / 16, 1 / 32, 1 / 64]
    rep = fit_consistency_order({k: k ** 3 for k in ks})
    assert round(rep.q_hat, 3) == 1.000 and not rep.saturated and rep.conclusive


def test_consistency_fit_needs_four_levels():
    with pytest.raises(InsufficientDataError):
        fit_consistency_order({0.1: 1e-3, 0.05: 1e-4, 0.025: 1e-5})


def test_consistency_fit_saturation():
    rep = fit_consistency_order({k: 1e-14 for k in (0.1, 0.05, 0.025, 0.0125)})
    assert rep.saturated and rep.conclusive and "saturated" in rep.summary()


def test_consistency_fit_flags_noisy_data():
    ks = [1 / 8, 1 / 16, 1 / 32, 1 / 64]
    rep = fit_consistency_order(dict(zip(ks, [1e-3, 1e-6, 1e-4, 1e-7])))
    assert not rep.conclusive and "non-conclusive" in rep.summary()


def test_family_geometry():
    fam = RefinementFamily(0.05, 4, 0.5, (0.0, 1.0), BURGERS, Sine(), 0.5, OUTFLOW)
    np.testing.assert_allclose(fam.ks, 0.05 * 2.0 ** -np.arange(4))
    assert fam.finest.ncells == 80
    assert fam.default_window() == pytest.approx((0.2, 0.8))
    with pytest.raises(UsageError):
        RefinementFamily(0.05, 4, 0.5, (0.0, 1.0), BURGERS, Sine(), 0.52)


# -- reference solution --------------------------------------------------------

def test_reference_ratio_minimum():
    with pytest.raises(UsageError):
        reference_entropy_solution(Sine(), BURGERS, Grid(0, 1, 8, 0.5), 0.25, PERIODIC, refinement_ratio=8)


def test_reference_constant_data():
    ref = reference_entropy_solution(Constant(0.3), BURGERS, Grid(0, 1, 4, 0.5), 0.5, PERIODIC, 16)
    for t in (0.0, 0.25, 0.5):
        np.testing.assert_array_equal(ref(np.linspace(0, 1, 9, endpoint=False), t), 0.3)


def test_reference_advection_error_scales_with_fine_cell():
    sol = AdvectionTranslate(Sine(0, 1), 1.0, (0.0, 1.0))
    errs = []
    for ratio in (16, 32):
        g = Grid(0, 1, 8, 0.5)
        ref = reference_entropy_solution(Sine(0, 1), LinearAdvection(1.0), g, 0.5, PERIODIC, ratio)
        errs.append(l1_error(ref.at_time(0.5), lambda x: sol(x, 0.5)))
        h_fine = g.h / ratio
        assert errs[-1] <= 5 * h_fine
    assert errs[1] < errs[0]


def test_reference_burgers_shock_location():
    g = Grid(-0.5, 1.5, 16, 0.5)
    ref = reference_entropy_solution(Step(1, 0, 0), BURGERS, g, 1.0, OUTFLOW, 16)
    gf = ref.at_time(1.0)
    cell = int(np.argmin(np.abs(gf.avg[:, 0] - 0.5)))
    assert abs(gf.grid.centers[cell] - 0.5) <= gf.grid.h


# -- consistency ----------------------------------------------------------------

@pytest.mark.parametrize("extrapolate", [False, True])
@pytest.mark.parametrize("n", [8, 16])
def test_godunov_order_one_consistency_is_exact(n, extrapolate):
    xi = project(Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5))), Grid(0, 1, n, 0.5), 1)
    meas = consistency_error(SchemeId("godunov", 1), xi, BURGERS, PERIODIC, 16, extrapolate)
    assert meas.error <= 1e-13


def test_consistency_error_is_larger_for_unmatched_scheme():
    xi = project(Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5))), Grid(0, 1, 16, 0.5), 2, boundary=PERIODIC)
    g = consistency_error(SchemeId("godunov", 2), xi, BURGERS, PERIODIC, 16)
    r = consistency_error(SchemeId("grp", 2), xi, BURGERS, PERIODIC, 16)
    assert r.error < g.error


# -- balance residual -----------------------------------------------------------

def test_balance_constant_field():
    traj = run(Constant(0.7), SchemeId("godunov"), Grid(0, 1, 8, 0.5), BURGERS, 0.5, PERIODIC)
    rep = balance_residual(upsilon(traj), (0.25, 0.75, 0.0, 0.5), BURGERS)
    assert rep.magnitude <= 1e-14


@pytest.mark.parametrize("rect", [(0.1, 0.7, 0.0, 0.3), (-0.4, 0.33, 0.05, 0.9), (0.0, 1.0, 0.2, 0.25)])
def test_balance_exact_advection(rect):
    sol = AdvectionTranslate(Sine(0.5, 1.0), 1.0, (0.0, 1.0))
    rep = balance_residual(sol, rect, LinearAdvection(1.0), 256, rule="gauss")
    assert rep.magnitude <= 1e-8


def test_balance_misaligned_rectangle():
    traj = run(Sine(), SchemeId("godunov"), Grid(0, 1, 8, 0.5), BURGERS, 0.5, PERIODIC)
    with pytest.raises(UsageError):
        balance_residual(upsilon(traj), (0.1, 0.75, 0.0, 0.5), BURGERS)


def test_balance_needs_enough_points():
    with pytest.raises(UsageError):
        balance_residual(lambda x, t: x, (0, 1, 0, 1), BURGERS, quadrature_points=32)


def test_balance_of_reference_vanishes_under_refinement():
    g = Grid(-0.5, 1.5, 8, 0.5)
    rect = (0.0, 1.0, 0.0, 0.5)
    res = [balance_residual(reference_entropy_solution(Step(1, 0, 0), BURGERS, g, 0.5, OUTFLOW, r, 1),
                            rect, BURGERS).magnitude for r in (16, 32)]
    assert res[1] < res[0] and res[1] < 1e-2


def test_aligned_rectangles():
    g = Grid(0, 1, 16, 0.5)
    rects = aligned_rectangles(g, 0.5, 12, seed=3)
    assert len(set(rects)) == 12
    for x1, x2, t1, t2 in rects:
        assert x1 < x2 and t1 < t2
        for v, s in ((x1, g.h), (x2, g.h), (t1, g.k), (t2, g.k)):
            assert abs(v / s - round(v / s)) < 1e-9


# -- convergence ----------------------------------------------------------------

def test_advection_convergence_rate():
    fam = RefinementFamily(0.5 / 16, 4, 0.5, (0.0, 1.0), LinearAdvection(1.0), Sine(0, 1), 0.25, PERIODIC)
    sol = AdvectionTranslate(Sine(0, 1), 1.0, (0.0, 1.0))
    rep = convergence_study("godunov", fam, lambda x, t: sol(x, t))
    assert rep.rate == pytest.approx(1.0, abs=0.15)
    assert rep.strictly_decreasing and rep.bounded
    assert np.all(np.diff(rep.l1loc) < 0)


def test_godunov_sup_norm_bounded_by_data():
    fam = RefinementFamily(0.5 / 16, 3, 0.5, (0.0, 1.0), BURGERS, Sine(0.2, 1.0), 0.5, PERIODIC)
    for tr in run_family("godunov", fam):
        assert tr.max_norm.max() <= tr.max_norm[0]


def test_blowup_is_reported(monkeypatch):
    def boom(*a, **kw):
        raise NumericalError("blow-up: max-norm 1e9 at step 3", step=3)

    monkeypatch.setattr(analysis, "run_family", boom)
    fam = RefinementFamily(0.5 / 16, 3, 0.5, (0.0, 1.0), BURGERS, Sine(), 0.5, PERIODIC)
    rep = convergence_study("grp", fam, lambda x, t: x)
    assert rep.blowup and "blow-up" in rep.blowup and not rep.bounded


def test_average_check_order_one_is_identical():
    fam = RefinementFamily(0.5 / 16, 3, 0.5, (0.0, 1.0), LinearAdvection(1.0), Sine(0, 1), 0.25, PERIODIC)
    sol = AdvectionTranslate(Sine(0, 1), 1.0, (0.0, 1.0))
    rep = average_convergence_check(run_family("godunov", fam), lambda x, t: sol(x, t), (0.0, 1.0))
    np.testing.assert_array_equal(rep.distances, rep.averaged_distances)
    assert rep.inequality_holds and rep.both_decrease


def test_average_check_smooth_second_order():
    fam = RefinementFamily(0.5 / 16, 3, 0.5, (0.0, 1.0), LinearAdvection(1.0), Sine(0, 1), 0.25, PERIODIC)
    sol = AdvectionTranslate(Sine(0, 1), 1.0, (0.0, 1.0))
    rep = average_convergence_check(run_family("grp/2", fam), lambda x, t: sol(x, t), (0.0, 1.0))
    assert rep.inequality_holds and rep.both_decrease
    # averaging costs one order: the averaged distances decay like k, the full ones like k^2
    assert fit_power_law(rep.ks, rep.averaged_distances).exponent == pytest.approx(1.0, abs=0.15)
    assert fit_power_law(rep.ks, rep.distances).exponent == pytest.approx(2.0, abs=0.15)


# -- compatibility --------------------------------------------------------------

@pytest.mark.parametrize("name", ["grp", "muscl", "acoustic"])
def test_coincidence_on_piecewise_constants(name):
    xi = project(Sum((Sine(1.0, 0.25), Step(0.5, 0.0, 0.5))), Grid(0, 1, 32, 0.5), 1)
    assert coincidence_defect(SchemeId(name, 2), xi, BURGERS, PERIODIC) <= 1e-13


def test_zero_slope_gap_vanishes_on_averages():
    xi = project(Sine(1.0, 0.25), Grid(0, 1, 32, 0.5), 1)
    full, averaged = compatibility_gap(SchemeId("grp", 2), xi, BURGERS, PERIODIC)
    assert averaged == 0.0 and full >= 0.0


def test_coincidence_rejects_sloped_input():
    xi = project(Sine(1.0, 0.25), Grid(0, 1, 32, 0.5), 2, boundary=PERIODIC)
    with pytest.raises(UsageError):
        coincidence_defect(SchemeId("grp", 2), xi, BURGERS, PERIODIC)


def test_compatibility_rejects_godunov():
    with pytest.raises(UsageError):
        godunov_compatibility("godunov", Sine(), BURGERS, Grid(0, 1, 8, 0.5))


def test_compatibility_gap_shrinks():
    rep = godunov_compatibility("grp/2", Sine(1.0, 0.25), BURGERS, Grid(0, 1, 32, 0.5), 4, PERIODIC)
    assert rep.coincidence <= 1e-13
    assert rep.exponent >= 0.8
    assert np.all(np.diff(rep.average_gaps) < 0)


# -- cross-check ----------------------------------------------------------------

def test_godunov_against_itself():
    fam = RefinementFamily(0.5 / 8, 3, 0.5, (0.0, 1.0), BURGERS, Sine(0.2, 1.0), 0.5, PERIODIC)
    rep = uniqueness_cross_check("godunov", "godunov", fam)
    np.testing.assert_array_equal(rep.distances, 0.0)
    assert rep.decreasing and rep.within_bound


def test_cross_check_needs_two_levels():
    fam = RefinementFamily(0.5 / 8, 1, 0.5, (0.0, 1.0), BURGERS, Sine(), 0.5, PERIODIC)
    with pytest.raises(InsufficientDataError):
        uniqueness_cross_check("grp", "godunov", fam)
