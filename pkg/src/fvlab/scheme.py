"""Finite volume scheme Phi^k = P^k S(k): averages are advanced with the exact
time integrals of the interface traces, then slopes are re-limited."""
import math
import warnings
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .errors import CFLError, DomainError, NumericalError, UsageError
from .flux import SchemeId, build_trace, interface_data
from .mesh import BoundaryPolicy, GridFunction, project, reconstruct
from .models import IsentropicEuler


def check_cfl(gf, model, cfl_target=1.0, step=None):
    """Return lambda * (max wave speed over the range of ``gf``); raise on violation."""
    if not 0 < cfl_target <= 1:
        raise UsageError("cfl_target must lie in (0, 1]")
    lo, hi = gf.edge_values()
    bound = model.wave_speed_bound(np.concatenate([lo, hi, gf.avg]))
    product = gf.grid.lam * bound
    if product > cfl_target:
        raise CFLError(product, cfl_target, step)
    return product


def interface_integrals(gf, scheme, model, boundary):
    """Exact integrals over [0, k) of the traces at the M + 1 interfaces."""
    data = interface_data(gf, boundary)
    return build_trace(scheme, data, model).integral(gf.grid.k)


def update_averages(gf, integrals):
    with np.errstate(over="ignore", invalid="ignore"):
        return gf.avg - (integrals[1:] - integrals[:-1]) / gf.grid.h


def evolve_step(gf, scheme, model, boundary=None, cfl_target=1.0, step=None):
    """One step of the FVS; returns the re-limited grid function."""
    boundary = boundary or BoundaryPolicy()
    check_cfl(gf, model, cfl_target, step)
    new = update_averages(gf, interface_integrals(gf, scheme, model, boundary))
    bad = ~np.all(np.isfinite(new), axis=1)
    if np.any(bad):
        cell = int(np.argmax(bad))
        raise NumericalError(f"non-finite average in cell {cell}", cell=cell, step=step)
    if isinstance(model, IsentropicEuler) and np.any(new[:, 0] <= 0):
        cell = int(np.argmax(new[:, 0] <= 0))
        raise DomainError(f"nonpositive density in cell {cell}" +
                          ("" if step is None else f" at step {step}"))
    return reconstruct(new, gf.grid, scheme.order, scheme.limiter, boundary)


@dataclass
class Trajectory:
    grid: object
    scheme: SchemeId
    model: object
    boundary: BoundaryPolicy
    T: float
    nsteps: int
    levels: dict
    mass: np.ndarray
    max_norm: np.ndarray
    cfl: np.ndarray
    min_density: Optional[np.ndarray] = None
    warnings: List[str] = field(default_factory=list)

    @property
    def k(self):
        return self.grid.k

    @property
    def times(self):
        return np.arange(self.nsteps + 1) * self.k

    @property
    def initial(self):
        return self.levels[0]

    @property
    def final(self):
        return self.levels[self.nsteps]

    def level(self, n):
        try:
            return self.levels[n]
        except KeyError:
            raise UsageError(f"time level {n} was not stored") from None

    def mass_drift(self):
        """max_n |mass_n - mass_0| relative to the L1 norm of the initial data."""
        scale = self.grid.h * np.abs(self.initial.avg).sum(axis=0)
        scale = np.where(scale > 0, scale, 1.0)
        return float(np.max(np.abs(self.mass - self.mass[0]) / scale))


def snap_steps(T, k):
    """Number of steps N with N k closest to T, and whether T had to be snapped."""
    n = int(round(T / k))
    return n, abs(n * k - T) > 1e-12 * max(T, k)


def run(u0, scheme, grid, model, T, boundary=None, cfl_target=1.0, store_every=1,
        blowup_factor=None):
    """theta^0 = P^k u0, theta^{n+1} = Phi^k theta^n for n < N = T/k.

    Only every ``store_every``-th level (and the last) is kept in memory."""
    boundary = boundary or BoundaryPolicy()
    if isinstance(scheme, str):
        scheme = SchemeId.parse(scheme)
    nsteps, snapped = snap_steps(T, grid.k)
    notes = []
    if snapped:
        msg = f"T={T} snapped to {nsteps * grid.k!r} (N={nsteps} steps of k={grid.k!r})"
        warnings.warn(msg)
        notes.append(msg)
    gf = project(u0, grid, scheme.order, scheme.limiter, boundary, dim=model.dim)
    levels = {0: gf}
    mass = np.empty((nsteps + 1, gf.dim))
    norm = np.empty(nsteps + 1)
    cfl = np.empty(nsteps)
    euler = isinstance(model, IsentropicEuler)
    rho_min = np.empty(nsteps + 1) if euler else None
    mass[0], norm[0] = gf.mass(), gf.max_norm()
    if euler:
        rho_min[0] = gf.avg[:, 0].min()
    for n in range(nsteps):
        try:
            cfl[n] = check_cfl(gf, model, cfl_target, step=n)
            gf = evolve_step(gf, scheme, model, boundary, cfl_target=1.0, step=n)
        except (NumericalError, DomainError, CFLError) as exc:
            if getattr(exc, "step", None) is None:
                exc.step = n
                exc.args = (f"{exc.args[0]} (step {n})",) + exc.args[1:]
            raise
        mass[n + 1], norm[n + 1] = gf.mass(), gf.max_norm()
        if euler:
            rho_min[n + 1] = gf.avg[:, 0].min()
        if blowup_factor is not None and norm[n + 1] > blowup_factor * max(norm[0], 1e-300):
            raise NumericalError(f"blow-up: max-norm {norm[n + 1]:.3e} at step {n + 1}", step=n + 1)
        if (n + 1) % store_every == 0 or n + 1 == nsteps:
            levels[n + 1] = gf
    return Trajectory(grid=grid, scheme=scheme, model=model, boundary=boundary,
                      T=nsteps * grid.k, nsteps=nsteps, levels=levels, mass=mass,
                      max_norm=norm, cfl=cfl, min_density=rho_min, warnings=notes)


class SpacetimeField:
    """Time-affine interpolant between consecutive stored levels of a trajectory."""

    def __init__(self, traj):
        self.traj = traj

    @property
    def grid(self):
        return self.traj.grid

    @property
    def T(self):
        return self.traj.T

    def at_time(self, t):
        traj = self.traj
        k = traj.k
        if t < -1e-12 * k or t > traj.T + 1e-12 * max(k, traj.T):
            raise DomainError(f"t={t} outside [0, {traj.T}]")
        s = t / k
        n = int(round(s))
        if abs(s - n) <= 1e-9:
            return traj.level(min(max(n, 0), traj.nsteps))
        n = min(int(math.floor(s)), traj.nsteps - 1)
        w = s - n
        return traj.level(n).combine(traj.level(n + 1), 1.0 - w, w)

    def __call__(self, x, t):
        return self.at_time(t)(x)

    def one_sided(self, x, t):
        """(left limit, right limit) at a point; they differ only at interfaces."""
        gf = self.at_time(t)
        eps = 1e-9 * gf.grid.h
        return gf(np.asarray(x) - eps), gf(np.asarray(x) + eps)

    def trace(self, x, times):
        """One-sided limits at the point ``x`` for an array of times, shape (len(times), D)."""
        traj = self.traj
        times = np.asarray(times, dtype=float)
        if np.any(times < -1e-12 * traj.k) or np.any(times > traj.T * (1 + 1e-12) + 1e-15):
            raise DomainError("trace times outside [0, T]")
        s = times / traj.k
        n = np.clip(np.floor(s).astype(int), 0, max(traj.nsteps - 1, 0))
        w = np.clip(s - n, 0.0, 1.0)[:, None]
        eps = 1e-9 * traj.grid.h
        pts = np.array([x - eps, x + eps], dtype=float)
        cache = {}

        def values(m):
            if m not in cache:
                cache[m] = traj.level(m)(pts)
            return cache[m]

        left = np.empty((times.size, traj.initial.dim))
        right = np.empty_like(left)
        for i, m in enumerate(n):
            a = values(m)
            b = values(min(m + 1, traj.nsteps))
            v = (1.0 - w[i]) * a + w[i] * b
            left[i], right[i] = v[0], v[1]
        return left, right


def upsilon(traj):
    return SpacetimeField(traj)
