"""Refinement studies: consistency order, balance residuals, convergence,
Godunov compatibility and scheme cross-checks.

The exact solution u(x, t; xi) that the consistency defect needs is not
available in closed form.  It is replaced by order-1 Godunov on a grid
refined ``refinement_ratio`` times, whose own trace integrals are summed at the
coarse interface positions.  By default the oracle is Richardson-extrapolated
in the refinement ratio (2 G_{2R} - G_R), which removes its leading O(k/R)
error term.
"""
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple

import numpy as np

from .errors import InsufficientDataError, NumericalError, UsageError
from .flux import GODUNOV, SchemeId
from .mesh import (GAUSS_NODES, GAUSS_WEIGHTS, BoundaryPolicy, Grid, GridFunction,
                   cell_average_function, l1_distance, l1_error, l1loc_metric, project)
from .models import as_state
from .scheme import SpacetimeField, Trajectory, evolve_step, interface_integrals, run, upsilon

FLOOR = 1e-12
RESIDUAL_FLAG = 0.1


def parallel_map(fn, items, jobs=1):
    """Map ``fn`` over ``items``; results come back in input order."""
    items = list(items)
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


# -- power-law fits -------------------------------------------------------------

@dataclass(frozen=True)
class PowerFit:
    """log10 y = exponent * log10 x + intercept, with RMS residual in log10 units."""

    exponent: float
    intercept: float
    residual: float
    npoints: int

    @property
    def conclusive(self):
        return self.residual <= RESIDUAL_FLAG

    @property
    def constant(self):
        return 10.0 ** self.intercept


def fit_power_law(x, y, min_points=2):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    keep = (x > 0) & (y > 0) & np.isfinite(y)
    if keep.sum() < max(min_points, 2):
        raise InsufficientDataError(f"need at least {max(min_points, 2)} positive points, got {keep.sum()}")
    lx, ly = np.log10(x[keep]), np.log10(y[keep])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    return PowerFit(float(slope), float(intercept), float(np.sqrt(np.mean(resid ** 2))), int(keep.sum()))


# -- refinement families --------------------------------------------------------

@dataclass(frozen=True)
class RefinementFamily:
    """Grids with k_m = k0 2^-m, m = 0..levels-1, sharing lambda, domain and data."""

    k0: float
    levels: int
    lam: float
    domain: Tuple[float, float]
    model: object
    u0: Callable
    T: float
    boundary: BoundaryPolicy = BoundaryPolicy()

    def __post_init__(self):
        if self.levels < 1:
            raise UsageError("a refinement family needs at least one level")
        Grid.from_step(self.k0, self.lam, *self.domain)
        n = self.T / self.k0
        if abs(n - round(n)) > 1e-9 * max(1.0, n):
            raise UsageError(f"T={self.T} is not an integer multiple of k0={self.k0}")

    def k(self, m):
        return self.k0 * 2.0 ** (-m)

    def grid(self, m):
        return Grid.from_step(self.k0, self.lam, *self.domain).refine(2 ** m)

    @property
    def grids(self):
        return [self.grid(m) for m in range(self.levels)]

    @property
    def finest(self):
        return self.grid(self.levels - 1)

    @property
    def ks(self):
        return np.array([self.k(m) for m in range(self.levels)])

    def default_window(self, margin_cells=2):
        """Whole domain, minus ``margin_cells`` coarsest cells at outflow ends."""
        a, b = self.domain
        if self.boundary.kind == "outflow":
            h0 = self.grid(0).h
            return (a + margin_cells * h0, b - margin_cells * h0)
        return (a, b)


def run_family(scheme, family, jobs=1, blowup_factor=None):
    """Run every member; levels are stored at the coarsest member's time levels."""
    if isinstance(scheme, str):
        scheme = SchemeId.parse(scheme)

    def member(m):
        return run(family.u0, scheme, family.grid(m), family.model, family.T, family.boundary,
                   store_every=2 ** m, blowup_factor=blowup_factor)

    return parallel_map(member, range(family.levels), jobs)


def common_refinement(f, g):
    """Represent two nested dyadic grid functions exactly on the finer grid."""
    if (f.grid.a, f.grid.b, f.grid.lam) != (g.grid.a, g.grid.b, g.grid.lam):
        raise UsageError("grid functions are not on nested grids of one family")
    nf, ng = f.grid.ncells, g.grid.ncells
    if nf <= ng:
        if ng % nf:
            raise UsageError("grids are not nested")
        return f.refine(ng // nf), g
    if nf % ng:
        raise UsageError("grids are not nested")
    return f, g.refine(nf // ng)


def field_distance(gf, target, t=None, window=None):
    """L1 distance over ``window`` between a grid function and a target.

    ``target`` is a grid function on a nested grid, a SpacetimeField (evaluated
    at ``t``) or a callable ``(x, t) -> state``."""
    if isinstance(target, SpacetimeField):
        target = target.at_time(t)
    if isinstance(target, GridFunction):
        a, b = common_refinement(gf, target)
        return l1_distance(a, b, window)
    return l1_error(gf, lambda x: target(x, t), window)


# -- reference solution --------------------------------------------------------

def reference_entropy_solution(u0, model, grid, T, boundary=None, refinement_ratio=64,
                               store_every=None):
    """Order-1 Godunov on ``grid`` refined ``refinement_ratio`` times.

    Levels are stored at the time levels of ``grid`` unless ``store_every`` is
    given."""
    if refinement_ratio < 16:
        raise UsageError("the reference needs a refinement ratio of at least 16")
    fine = grid.refine(refinement_ratio)
    traj = run(u0, GODUNOV, fine, model, T, boundary,
               store_every=store_every or refinement_ratio)
    return upsilon(traj)


# -- consistency ---------------------------------------------------------------

def _oracle_integrals(xi, model, boundary, ratio):
    """Fine-Godunov flux integrals over [0, k) at the coarse interfaces."""
    fine = cell_average_function(xi.refine(ratio))
    acc = np.zeros((xi.grid.ncells + 1, xi.dim))
    gf = fine
    for n in range(ratio):
        acc += interface_integrals(gf, GODUNOV, model, boundary)[::ratio]
        if n + 1 < ratio:
            gf = evolve_step(gf, GODUNOV, model, boundary, step=n)
    return acc


@dataclass(frozen=True)
class ConsistencyMeasurement:
    k: float
    error: float
    per_cell: np.ndarray
    worst_cell: int


def consistency_error(scheme, xi, model, boundary=None, refinement_ratio=64, extrapolate=True,
                      margin=None):
    """max_j |int_0^k (F_{j+1/2} - F_{j-1/2}) dt - (oracle pair difference)|.

    ``margin`` cells are dropped at each end (default 2 for outflow, 0 for
    periodic boundaries)."""
    boundary = boundary or BoundaryPolicy()
    if isinstance(scheme, str):
        scheme = SchemeId.parse(scheme)
    if refinement_ratio < 2:
        raise UsageError("refinement_ratio must be at least 2")
    if margin is None:
        margin = 2 if boundary.kind == "outflow" else 0
    coarse = interface_integrals(xi, scheme, model, boundary)
    oracle = _oracle_integrals(xi, model, boundary, refinement_ratio)
    if extrapolate:
        oracle = 2.0 * _oracle_integrals(xi, model, boundary, 2 * refinement_ratio) - oracle
    per_cell = np.abs(np.diff(coarse - oracle, axis=0)).max(axis=1)
    inner = per_cell[margin:per_cell.size - margin]
    if inner.size == 0:
        raise UsageError("margin leaves no cells")
    j = int(np.argmax(inner))
    return ConsistencyMeasurement(xi.grid.k, float(inner[j]), per_cell, j + margin)


@dataclass(frozen=True)
class ConsistencyReport:
    ks: np.ndarray
    errors: np.ndarray
    saturated: bool
    p_hat: Optional[float] = None
    q_hat: Optional[float] = None
    intercept: Optional[float] = None
    residual: Optional[float] = None

    @property
    def conclusive(self):
        return self.saturated or (self.residual is not None and self.residual <= RESIDUAL_FLAG)

    def rows(self):
        return [(float(k), float(e)) for k, e in zip(self.ks, self.errors)]

    def summary(self):
        if self.saturated:
            return "saturated: every E(k) below the floor (order beyond the measurable range)"
        flag = "" if self.conclusive else " [non-conclusive]"
        return f"q_hat={self.q_hat:.3f} (p_hat={self.p_hat:.3f}, residual={self.residual:.3f}){flag}"


def fit_consistency_order(errors, floor=FLOOR):
    """Least-squares fit of log10 E against log10 k; q_hat = slope - 2.

    ``errors`` maps k to E(k).  Points at or below 10x the 1e-13 noise floor are
    not used unless all points are below ``floor`` (saturation)."""
    items = sorted(dict(errors).items(), reverse=True)
    if len(items) < 4:
        raise InsufficientDataError(f"consistency order needs >= 4 levels, got {len(items)}")
    ks = np.array([k for k, _ in items], dtype=float)
    es = np.array([e for _, e in items], dtype=float)
    if np.all(es <= floor):
        return ConsistencyReport(ks, es, saturated=True)
    usable = es > 10 * 1e-13
    if usable.sum() < 4:
        raise InsufficientDataError("fewer than 4 errors above the noise floor")
    fit = fit_power_law(ks[usable], es[usable], min_points=4)
    return ConsistencyReport(ks, es, saturated=False, p_hat=fit.exponent, q_hat=fit.exponent - 2,
                             intercept=fit.intercept, residual=fit.residual)


def consistency_study(scheme, profile, model, grid0, levels=5, boundary=None, refinement_ratio=64,
                      extrapolate=True, order=None, limiter=None, jobs=1):
    """E(k) on the projections of ``profile`` onto grid0 refined 2^m times."""
    boundary = boundary or BoundaryPolicy()
    if isinstance(scheme, str):
        scheme = SchemeId.parse(scheme)
    order = scheme.order if order is None else order
    limiter = scheme.limiter if limiter is None else limiter

    def level(m):
        grid = grid0.refine(2 ** m)
        xi = project(profile, grid, order, limiter, boundary, dim=model.dim)
        return consistency_error(scheme, xi, model, boundary, refinement_ratio, extrapolate)

    meas = parallel_map(level, range(levels), jobs)
    return fit_consistency_order({m.k: m.error for m in meas}), meas


# -- balance residual ----------------------------------------------------------

@dataclass(frozen=True)
class BalanceResidualReport:
    rectangle: Tuple[float, float, float, float]
    residual: np.ndarray
    mass_change: np.ndarray
    flux_difference: np.ndarray
    rule: str
    points: int

    @property
    def magnitude(self):
        return float(np.max(np.abs(self.residual)))


def _nodes(lo, hi, pieces, per_piece, rule):
    """Composite quadrature nodes/weights on [lo, hi] split into ``pieces`` equal parts."""
    edges = np.linspace(lo, hi, pieces + 1)
    if rule == "midpoint":
        s = (np.arange(per_piece) + 0.5) / per_piece
        w = np.full(per_piece, 1.0 / per_piece)
    elif rule == "gauss":
        s = 0.5 * (GAUSS_NODES + 1.0)
        w = 0.5 * GAUSS_WEIGHTS
        reps = max(1, math.ceil(per_piece / GAUSS_NODES.size))
        s = ((np.arange(reps)[:, None] + s[None, :]) / reps).ravel()
        w = np.tile(w / reps, reps)
    else:
        raise UsageError(f"unknown quadrature rule {rule!r}")
    width = np.diff(edges)
    x = edges[:-1, None] + width[:, None] * s[None, :]
    return x.ravel(), (width[:, None] * w[None, :]).ravel()


def _snap(value, origin, step, what):
    s = (value - origin) / step
    n = int(round(s))
    if abs(s - n) > 1e-9:
        raise UsageError(f"{what}={value} is not aligned with the grid (spacing {step})")
    return n


def balance_residual(field, rectangle, model, quadrature_points=256, rule="midpoint"):
    """int u(x,t2) - int u(x,t1) + int f(u(x2,t)) - int f(u(x1,t)) over a rectangle.

    ``field`` is a SpacetimeField (the rectangle must be grid-aligned; the
    flux on an interface is the mean of f over the two one-sided limits) or a
    callable ``(x, t) -> state`` (any rectangle)."""
    x1, x2, t1, t2 = map(float, rectangle)
    if not (x2 > x1 and t2 > t1):
        raise UsageError("degenerate rectangle")
    if quadrature_points < 64:
        raise UsageError("use at least 64 quadrature points per edge")
    dim = model.dim
    if isinstance(field, SpacetimeField):
        grid, k = field.grid, field.traj.k
        i1, i2 = _snap(x1, grid.a, grid.h, "x1"), _snap(x2, grid.a, grid.h, "x2")
        n1, n2 = _snap(t1, 0.0, k, "t1"), _snap(t2, 0.0, k, "t2")
        if i1 < 0 or i2 > grid.ncells or n1 < 0 or n2 > field.traj.nsteps:
            raise UsageError("rectangle leaves the computed region")
        x1, x2 = grid.a + i1 * grid.h, grid.a + i2 * grid.h
        t1, t2 = n1 * k, n2 * k
        xs, wx = _nodes(x1, x2, i2 - i1, math.ceil(quadrature_points / (i2 - i1)), rule)
        ts, wt = _nodes(t1, t2, n2 - n1, math.ceil(quadrature_points / (n2 - n1)), rule)

        def mass(t):
            return wx @ field(xs, t)

        def edge_flux(x):
            lo, hi = field.trace(x, ts)
            return wt @ (0.5 * (model.flux(lo) + model.flux(hi)))
    else:
        xs, wx = _nodes(x1, x2, 1, quadrature_points, rule)
        ts, wt = _nodes(t1, t2, 1, quadrature_points, rule)

        def mass(t):
            return wx @ as_state(field(xs, t), dim)

        def edge_flux(x):
            vals = np.stack([as_state(field(np.array([x]), t), dim)[0] for t in ts])
            return wt @ model.flux(vals)
    dm = mass(t2) - mass(t1)
    df = edge_flux(x2) - edge_flux(x1)
    n = int(max(xs.size, ts.size))
    return BalanceResidualReport((x1, x2, t1, t2), dm + df, dm, df, rule, n)


def aligned_rectangles(grid, T, count=10, seed=0):
    """``count`` distinct rectangles aligned with ``grid`` interfaces and its time levels."""
    rng = np.random.default_rng(seed)
    nsteps = int(round(T / grid.k))
    if grid.ncells < 2 or nsteps < 2:
        raise UsageError("grid too coarse for aligned rectangles")
    out = set()
    while len(out) < count:
        i1, i2 = sorted(rng.choice(grid.ncells + 1, size=2, replace=False))
        n1, n2 = sorted(rng.choice(nsteps + 1, size=2, replace=False))
        out.add((grid.a + i1 * grid.h, grid.a + i2 * grid.h, n1 * grid.k, n2 * grid.k))
    return sorted(out)


@dataclass(frozen=True)
class BalanceStudy:
    ks: np.ndarray
    residuals: np.ndarray  # (levels, rectangles)
    fit: PowerFit

    @property
    def worst(self):
        return self.residuals.max(axis=1)

    @property
    def finest_over_coarsest(self):
        return float(self.worst[-1] / self.worst[0])


def balance_study(trajectories, rectangles, model, quadrature_points=256, rule="midpoint"):
    """Worst residual over ``rectangles`` per level, with a power-law fit in k."""
    res = np.array([[balance_residual(upsilon(tr), r, model, quadrature_points, rule).magnitude
                     for r in rectangles] for tr in trajectories])
    ks = np.array([tr.k for tr in trajectories])
    return BalanceStudy(ks, res, fit_power_law(ks, res.max(axis=1)))


# -- convergence ---------------------------------------------------------------

@dataclass
class ConvergenceReport:
    scheme: SchemeId
    ks: np.ndarray
    errors: np.ndarray
    l1loc: np.ndarray
    sup_norms: np.ndarray
    hypothesis_bound: float
    fit: Optional[PowerFit]
    blowup: Optional[str] = None
    trajectories: List[Trajectory] = field(default_factory=list, repr=False)

    @property
    def rate(self):
        return None if self.fit is None else self.fit.exponent

    @property
    def strictly_decreasing(self):
        return bool(np.all(np.diff(self.errors) < 0))

    @property
    def bounded(self):
        return self.blowup is None and bool(np.all(self.sup_norms <= self.hypothesis_bound))


def convergence_study(scheme, family, reference, window=None, n_max=20, jobs=1, bound_factor=10.0,
                      trajectories=None):
    """Errors of Upsilon^{k_m}(., T) against ``reference`` over a fixed window.

    ``reference`` is a SpacetimeField or a callable ``(x, t) -> state``.  A run
    whose max-norm exceeds 1e3 times its initial value is reported as blow-up
    and the study stops for this scheme."""
    if isinstance(scheme, str):
        scheme = SchemeId.parse(scheme)
    window = window or family.default_window()
    if trajectories is None:
        try:
            trajectories = run_family(scheme, family, jobs, blowup_factor=1e3)
        except NumericalError as exc:
            return ConvergenceReport(scheme, family.ks, np.array([]), np.array([]), np.array([]),
                                     np.inf, None, blowup=str(exc))
    T = family.T
    errors = np.array([field_distance(tr.final, reference, T, window) for tr in trajectories])
    if isinstance(reference, SpacetimeField):
        ref_T = reference.at_time(T)
        l1loc = np.array([l1loc_metric(*common_refinement(tr.final, ref_T), n_max=n_max)
                          for tr in trajectories])
    else:
        l1loc = np.array([l1loc_metric(tr.final, lambda x: reference(x, T), n_max=n_max)
                          for tr in trajectories])
    sup = np.array([tr.max_norm.max() for tr in trajectories])
    bound = bound_factor * max(tr.max_norm[0] for tr in trajectories)
    fit = fit_power_law(family.ks, errors) if len(trajectories) >= 2 and np.all(errors > 0) else None
    return ConvergenceReport(scheme, family.ks, errors, l1loc, sup, bound, fit,
                             trajectories=list(trajectories))


@dataclass(frozen=True)
class AverageConvergenceReport:
    ks: np.ndarray
    distances: np.ndarray
    averaged_distances: np.ndarray
    inequality_holds: bool

    @property
    def ratios(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            return self.averaged_distances / self.distances

    @property
    def both_decrease(self):
        return bool(self.distances[-1] < self.distances[0]
                    and self.averaged_distances[-1] < self.averaged_distances[0])


def average_convergence_check(trajectories, reference, window, times=None, subwindows=4):
    """Spacetime L1 distances of Upsilon and its cell-average field to the reference.

    The time integral uses the trapezoid rule on ``times`` (default: the time
    levels of the coarsest trajectory).  Also verifies int|Y^av| <= int|Y| on
    cell-aligned subwindows at every stored level."""
    coarse = trajectories[0]
    if times is None:
        times = coarse.times
    times = np.asarray(times, dtype=float)
    c, d = window
    dist, avg_dist = [], []
    ok = True
    for tr in trajectories:
        fld = upsilon(tr)
        e, ea = [], []
        for t in times:
            gf = fld.at_time(t)
            av = cell_average_function(gf)
            e.append(field_distance(gf, reference, t, window))
            ea.append(field_distance(av, reference, t, window))
        dist.append(np.trapezoid(e, times) if len(times) > 1 else e[0])
        avg_dist.append(np.trapezoid(ea, times) if len(times) > 1 else ea[0])
        grid = tr.grid
        i_lo = int(math.ceil((c - grid.a) / grid.h - 1e-9))
        i_hi = int(math.floor((d - grid.a) / grid.h + 1e-9))
        cuts = np.unique(np.linspace(i_lo, i_hi, subwindows + 1).round().astype(int))
        zero = GridFunction(grid, np.zeros((grid.ncells, tr.final.dim)))
        for gf in tr.levels.values():
            av = cell_average_function(gf)
            for lo, hi in zip(cuts[:-1], cuts[1:]):
                w = (grid.a + lo * grid.h, grid.a + hi * grid.h)
                if l1_distance(av, zero, w) > l1_distance(gf, zero, w) * (1 + 1e-13) + 1e-15:
                    ok = False
    ks = np.array([tr.k for tr in trajectories])
    return AverageConvergenceReport(ks, np.array(dist), np.array(avg_dist), ok)


# -- Godunov compatibility -----------------------------------------------------

@dataclass(frozen=True)
class CompatibilityReport:
    scheme: SchemeId
    coincidence: float
    ks: np.ndarray
    gaps: np.ndarray
    average_gaps: np.ndarray
    fit: Optional[PowerFit]

    @property
    def exponent(self):
        return None if self.fit is None else self.fit.exponent


def godunov_step(xi, model, boundary):
    return evolve_step(cell_average_function(xi), GODUNOV, model, boundary)


def coincidence_defect(scheme, xi, model, boundary=None):
    """max |averages of Phi^k xi - averages of Phi^{k,G} xi| for piecewise-constant xi."""
    boundary = boundary or BoundaryPolicy()
    if xi.order != 1:
        raise UsageError("coincidence is defined on piecewise-constant input")
    ours = evolve_step(xi, scheme, model, boundary)
    ref = evolve_step(xi, GODUNOV, model, boundary)
    return float(np.max(np.abs(ours.avg - ref.avg)))


def compatibility_gap(scheme, xi, model, boundary=None, window=None):
    """(int |Phi^k xi - Phi^{k,G} xi^{k,av}| dx, same integral for the averages only)."""
    boundary = boundary or BoundaryPolicy()
    ours = evolve_step(xi, scheme, model, boundary)
    ref = godunov_step(xi, model, boundary)
    full = l1_distance(ours, ref, window)
    averaged = l1_distance(cell_average_function(ours), ref, window)
    return full, averaged


def godunov_compatibility(scheme, profile, model, grid0, levels=5, boundary=None, window=None,
                          coincidence_data=None):
    """Coincidence on piecewise constants and the gap scaling on smooth data.

    ``coincidence_data`` (default: the order-1 projection of ``profile`` on
    ``grid0``) are the piecewise-constant inputs for part (i)."""
    boundary = boundary or BoundaryPolicy()
    if isinstance(scheme, str):
        scheme = SchemeId.parse(scheme)
    if scheme.name not in ("grp", "muscl", "acoustic"):
        raise UsageError("compatibility is checked for grp, muscl and acoustic")
    if coincidence_data is None:
        coincidence_data = [project(profile, grid0, 1, boundary=boundary, dim=model.dim)]
    coincide = max(coincidence_defect(scheme, xi, model, boundary) for xi in coincidence_data)
    ks, gaps, avg_gaps = [], [], []
    for m in range(levels):
        grid = grid0.refine(2 ** m)
        xi = project(profile, grid, scheme.order, scheme.limiter, boundary, dim=model.dim)
        g, ga = compatibility_gap(scheme, xi, model, boundary, window)
        ks.append(grid.k)
        gaps.append(g)
        avg_gaps.append(ga)
    ks, gaps = np.array(ks), np.array(gaps)
    fit = fit_power_law(ks, gaps) if levels >= 2 and np.all(gaps > 0) else None
    return CompatibilityReport(scheme, coincide, ks, gaps, np.array(avg_gaps), fit)


# -- uniqueness cross-check ----------------------------------------------------

@dataclass(frozen=True)
class CrossCheckReport:
    ks: np.ndarray
    distances: np.ndarray
    increment: float
    factor: float = 3.0

    @property
    def decreasing(self):
        return bool(np.all(np.diff(self.distances) < 0) or np.all(self.distances == 0))

    @property
    def within_bound(self):
        return bool(self.distances[-1] <= self.factor * self.increment)


def uniqueness_cross_check(scheme_a, scheme_b, family, window=None, jobs=1, trajectories=None,
                           factor=3.0):
    """d_m = ||Upsilon_a^{k_m}(T) - Upsilon_b^{k_m}(T)||_1 over ``window``.

    The bound uses scheme_a's self-convergence increment at the finest level,
    ||Upsilon_a^{k_{M-2}}(T) - Upsilon_a^{k_{M-1}}(T)||_1."""
    if family.levels < 2:
        raise InsufficientDataError("cross-check needs at least two levels")
    window = window or family.default_window()
    if trajectories is None:
        ta = run_family(scheme_a, family, jobs)
        tb = ta if str(scheme_a) == str(scheme_b) else run_family(scheme_b, family, jobs)
    else:
        ta, tb = trajectories
    d = np.array([l1_distance(a.final, b.final, window) for a, b in zip(ta, tb)])
    inc = l1_distance(*common_refinement(ta[-2].final, ta[-1].final), window)
    return CrossCheckReport(family.ks, d, inc, factor)
