"""Uniform grids, piecewise-polynomial grid functions and L1 metrics.

A :class:`GridFunction` stores, per cell, the average and (for order 2) the
slope of a linear polynomial centred at the cell midpoint, so the cell
average of the represented function is exactly the stored average.
"""
import io
from dataclasses import dataclass

import numpy as np

from .errors import SizeError, UsageError
from .models import as_state

GAUSS_NODES, GAUSS_WEIGHTS = np.polynomial.legendre.leggauss(5)
LIMITERS = ("minmod", "van-leer", "none")


@dataclass(frozen=True)
class Grid:
    """Uniform cells on [a, b] with time step k = lam * h."""

    a: float
    b: float
    ncells: int
    lam: float

    def __post_init__(self):
        if self.ncells < 1:
            raise SizeError("grid needs at least one cell")
        if not self.b > self.a:
            raise UsageError("empty domain")
        if not self.lam > 0:
            raise UsageError("lambda must be positive")

    @classmethod
    def from_step(cls, k, lam, a, b):
        h = k / lam
        m = (b - a) / h
        ncells = int(round(m))
        if ncells < 1 or abs(m - ncells) > 1e-9 * max(1.0, m):
            raise UsageError(f"domain length {b - a} is not an integer multiple of h={h}")
        return cls(a=float(a), b=float(b), ncells=ncells, lam=float(lam))

    @property
    def h(self):
        return (self.b - self.a) / self.ncells

    @property
    def k(self):
        return self.lam * self.h

    @property
    def centers(self):
        return self.a + (np.arange(self.ncells) + 0.5) * self.h

    @property
    def interfaces(self):
        return self.a + np.arange(self.ncells + 1) * self.h

    def refine(self, factor):
        if int(factor) != factor or factor < 1:
            raise UsageError("refinement factor must be a positive integer")
        return Grid(self.a, self.b, self.ncells * int(factor), self.lam)

    def cell_of(self, x):
        idx = np.floor((np.asarray(x, dtype=float) - self.a) / self.h).astype(int)
        return np.clip(idx, 0, self.ncells - 1)


@dataclass(frozen=True)
class BoundaryPolicy:
    kind: str = "periodic"
    padding: int = 2

    def __post_init__(self):
        if self.kind not in ("periodic", "outflow"):
            raise UsageError(f"unknown boundary kind {self.kind!r}")
        if self.padding < 1:
            raise UsageError("padding must cover the flux stencil (>= 1 cell)")

    def pad(self, arr, width=None, ghost_zero=False):
        """Extend a per-cell array (M, D) with ``width`` ghost cells per side.

        Outflow ghosts copy the boundary cell, or are zero when ``ghost_zero``
        (used for slopes)."""
        w = self.padding if width is None else width
        if self.kind == "periodic":
            if w > arr.shape[0]:
                raise SizeError("padding wider than the grid")
            return np.concatenate([arr[-w:], arr, arr[:w]], axis=0)
        if ghost_zero:
            ghost = np.zeros((w,) + arr.shape[1:])
            return np.concatenate([ghost, arr, ghost], axis=0)
        return np.concatenate([np.repeat(arr[:1], w, axis=0), arr,
                               np.repeat(arr[-1:], w, axis=0)], axis=0)


class GridFunction:
    """Piecewise-linear (or constant) function on a grid; immutable."""

    __slots__ = ("grid", "avg", "slope", "order")

    def __init__(self, grid, avg, slope=None, order=None):
        avg = np.array(avg, dtype=float)
        if avg.ndim == 1:
            avg = avg[:, None]
        if avg.shape[0] != grid.ncells:
            raise SizeError(f"{avg.shape[0]} averages for {grid.ncells} cells")
        if slope is None:
            slope = np.zeros_like(avg)
        else:
            slope = np.array(slope, dtype=float).reshape(avg.shape)
        if order is None:
            order = 2 if np.any(slope != 0) else 1
        if order == 1 and np.any(slope != 0):
            raise UsageError("order-1 grid functions have zero slopes")
        avg.flags.writeable = False
        slope.flags.writeable = False
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "avg", avg)
        object.__setattr__(self, "slope", slope)
        object.__setattr__(self, "order", int(order))

    def __setattr__(self, name, value):
        raise AttributeError("GridFunction is immutable")

    def __repr__(self):
        return f"GridFunction(ncells={self.grid.ncells}, dim={self.dim}, order={self.order})"

    @property
    def dim(self):
        return self.avg.shape[1]

    def edge_values(self):
        """(value at left edge, value at right edge) of every cell."""
        half = 0.5 * self.grid.h * self.slope
        return self.avg - half, self.avg + half

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        j = self.grid.cell_of(x)
        dx = (x - self.grid.centers[j])[..., None]
        return self.avg[j] + self.slope[j] * dx

    def mass(self):
        return self.grid.h * self.avg.sum(axis=0)

    def max_norm(self):
        lo, hi = self.edge_values()
        return float(max(np.max(np.abs(lo)), np.max(np.abs(hi))))

    def combine(self, other, wa, wb):
        """wa * self + wb * other (same grid)."""
        _check_same_grid(self, other)
        order = max(self.order, other.order)
        return GridFunction(self.grid, wa * self.avg + wb * other.avg,
                            wa * self.slope + wb * other.slope, order=order)

    def refine(self, factor):
        """Exact representation on a grid refined ``factor`` times."""
        fine = self.grid.refine(factor)
        sub = (np.arange(factor) + 0.5) / factor - 0.5
        avg = (self.avg[:, None, :] + self.slope[:, None, :] * sub[None, :, None] * self.grid.h)
        slope = np.repeat(self.slope, factor, axis=0)
        return GridFunction(fine, avg.reshape(-1, self.dim), slope, order=self.order)

    def to_csv(self, header=None):
        d = self.dim
        cols = ["j", "x_center"] + [f"avg_{i}" for i in range(d)] + [f"slope_{i}" for i in range(d)]
        data = np.column_stack([np.arange(self.grid.ncells), self.grid.centers, self.avg, self.slope])
        buf = io.StringIO()
        if header:
            buf.write(f"# {header}\n")
        buf.write(",".join(cols) + "\n")
        for row in data:
            buf.write(f"{int(row[0])}," + ",".join(f"{v:.16e}" for v in row[1:]) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text, grid):
        lines = [ln for ln in text.splitlines() if ln and not ln.startswith("#")]
        names = lines[0].split(",")
        rows = np.array([[float(v) for v in ln.split(",")] for ln in lines[1:]])
        d = sum(1 for n in names if n.startswith("avg_"))
        return cls(grid, rows[:, 2:2 + d], rows[:, 2 + d:2 + 2 * d])


def _check_same_grid(f, g):
    if f.grid != g.grid:
        raise UsageError("grid functions live on different grids")
    if f.dim != g.dim:
        raise UsageError("grid functions have different state dimensions")


def cell_averages(u0, grid, dim=None):
    """Per-cell averages of a callable by 5-point Gauss-Legendre quadrature."""
    x = grid.centers[:, None] + 0.5 * grid.h * GAUSS_NODES[None, :]
    vals = np.asarray(u0(x), dtype=float)
    if vals.ndim == 2:
        vals = vals[..., None]
    if dim is not None and vals.shape[-1] != dim:
        raise UsageError(f"initial data has {vals.shape[-1]} components, model needs {dim}")
    return 0.5 * np.einsum("q,mqd->md", GAUSS_WEIGHTS, vals)


def _minmod(*args):
    stack = np.stack(args)
    same = np.all(stack > 0, axis=0) | np.all(stack < 0, axis=0)
    return np.where(same, np.sign(stack[0]) * np.min(np.abs(stack), axis=0), 0.0)


def limited_slopes(avg, grid, limiter, boundary):
    """Slopes from the central, left and right divided differences of the averages."""
    if limiter not in LIMITERS:
        raise UsageError(f"unknown limiter {limiter!r}; expected one of {LIMITERS}")
    if grid.ncells < 3:
        raise SizeError("order-2 reconstruction needs at least 3 cells")
    padded = boundary.pad(avg, width=1)
    left = (padded[1:-1] - padded[:-2]) / grid.h
    right = (padded[2:] - padded[1:-1]) / grid.h
    central = 0.5 * (left + right)
    if limiter == "minmod":
        return _minmod(central, left, right)
    if limiter == "van-leer":
        prod = left * right
        with np.errstate(invalid="ignore", divide="ignore"):
            vl = 2.0 * prod / (left + right)
        return np.where(prod > 0, vl, 0.0)
    return central


def reconstruct(avg, grid, order, limiter="minmod", boundary=None):
    boundary = boundary or BoundaryPolicy()
    if order == 1:
        return GridFunction(grid, avg, order=1)
    if order != 2:
        raise UsageError("only orders 1 and 2 are supported")
    return GridFunction(grid, avg, limited_slopes(np.asarray(avg, dtype=float).reshape(grid.ncells, -1),
                                                  grid, limiter, boundary), order=2)


def project(u0, grid, order=1, limiter="minmod", boundary=None, dim=None):
    """Average-preserving projection onto piecewise polynomials of the given order."""
    if isinstance(u0, GridFunction):
        if u0.grid != grid:
            raise UsageError("projection of a grid function requires the same grid")
        avg = u0.avg
    else:
        avg = cell_averages(u0, grid, dim)
    return reconstruct(avg, grid, order, limiter, boundary)


def cell_average_function(gf):
    """Same averages, zero slopes."""
    return GridFunction(gf.grid, gf.avg, order=1)


def _abs_linear_integral(alpha, beta, p, q):
    """Integral of |alpha + beta y| over [p, q] (elementwise, exact)."""
    zp = alpha + beta * p
    zq = alpha + beta * q
    width = q - p
    same_sign = zp * zq >= 0
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        split = (zp * zp + zq * zq) / (2.0 * np.abs(beta))
    return np.where(same_sign, np.abs(0.5 * (zp + zq)) * width, split)


def l1_distance(f, g, window=None):
    """Exact integral of |f - g| (summed over components) over ``window``."""
    _check_same_grid(f, g)
    grid = f.grid
    c, d = (grid.a, grid.b) if window is None else window
    lo = np.maximum(grid.interfaces[:-1], c) - grid.centers
    hi = np.minimum(grid.interfaces[1:], d) - grid.centers
    keep = hi > lo
    if not np.any(keep):
        return 0.0
    alpha = (f.avg - g.avg)[keep]
    beta = (f.slope - g.slope)[keep]
    vals = _abs_linear_integral(alpha, beta, lo[keep, None], hi[keep, None])
    return float(vals.sum())


def l1_norm(f, window=None):
    return l1_distance(f, GridFunction(f.grid, np.zeros_like(f.avg)), window)


def l1_error(f, func, window=None, subcells=4):
    """Integral of |f - func| by composite Gauss-Legendre quadrature (func callable)."""
    grid = f.grid
    c, d = (grid.a, grid.b) if window is None else window
    lo = np.maximum(grid.interfaces[:-1], c)
    hi = np.minimum(grid.interfaces[1:], d)
    keep = np.nonzero(hi > lo)[0]
    total = 0.0
    for s in range(subcells):
        a = lo[keep] + (hi[keep] - lo[keep]) * s / subcells
        b = lo[keep] + (hi[keep] - lo[keep]) * (s + 1) / subcells
        x = 0.5 * (a + b)[:, None] + 0.5 * (b - a)[:, None] * GAUSS_NODES[None, :]
        num = f.avg[keep][:, None, :] + f.slope[keep][:, None, :] * (x - grid.centers[keep][:, None])[..., None]
        ref = as_state(func(x), f.dim)
        err = np.abs(num - ref).sum(axis=-1)
        total += float(np.sum(0.5 * (b - a) * (err @ GAUSS_WEIGHTS)))
    return total


def l1loc_metric(f, g, n_max=20):
    """Truncated Frechet metric sum_N 2^-N r_N / (1 + r_N), r_N = int_{-N}^{N} |f - g|.

    ``g`` may be a grid function on the same grid or a callable."""
    if n_max < 1:
        raise UsageError("n_max must be >= 1")
    total = 0.0
    for n in range(1, n_max + 1):
        if isinstance(g, GridFunction):
            r = l1_distance(f, g, (-n, n))
        else:
            r = l1_error(f, g, (-n, n))
        total += 2.0 ** (-n) * r / (1.0 + r)
    return total
