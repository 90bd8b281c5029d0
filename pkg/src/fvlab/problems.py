"""Initial-data profiles and closed-form solutions used as test oracles.

Profiles are callables ``x -> state`` (scalar profiles return ``x.shape``,
system profiles ``x.shape + (dim,)``).  Every discontinuity is placed at a
fixed abscissa so that it coincides with a cell interface on dyadic grids.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from .errors import DomainError, NumericalError, UsageError
from .models import IsentropicEuler


@dataclass(frozen=True)
class Constant:
    value: float = 0.0

    def __call__(self, x):
        return np.full(np.shape(x), float(self.value))

    def derivative(self, x):
        return np.zeros(np.shape(x))


@dataclass(frozen=True)
class Sine:
    """mean + amp * sin(2 pi freq x + phase)."""

    mean: float = 0.0
    amp: float = 1.0
    freq: float = 1.0
    phase: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.mean + self.amp * np.sin(2 * np.pi * self.freq * x + self.phase)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        w = 2 * np.pi * self.freq
        return self.amp * w * np.cos(w * x + self.phase)


@dataclass(frozen=True)
class Step:
    """``left`` for x < x0, ``right`` for x >= x0."""

    left: float = 1.0
    right: float = 0.0
    x0: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.where(x < self.x0, float(self.left), float(self.right))

    def derivative(self, x):
        return np.zeros(np.shape(x))


@dataclass(frozen=True)
class Sum:
    parts: Tuple = ()

    def __call__(self, x):
        return sum(p(x) for p in self.parts)

    def derivative(self, x):
        return sum(p.derivative(x) for p in self.parts)


@dataclass(frozen=True)
class Gaussian:
    base: float = 1.0
    amp: float = 0.2
    x0: float = 0.5
    width: float = 0.1

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return self.base + self.amp * np.exp(-(((x - self.x0) / self.width) ** 2))

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        z = (x - self.x0) / self.width
        return -2 * z / self.width * self.amp * np.exp(-z * z)


@dataclass(frozen=True)
class PiecewiseConstant:
    """Values on consecutive intervals between ``breaks`` (len(values) = len(breaks) + 1)."""

    breaks: Tuple[float, ...] = ()
    values: Tuple[float, ...] = (0.0,)

    def __post_init__(self):
        if len(self.values) != len(self.breaks) + 1:
            raise UsageError("need one more value than breakpoints")

    def __call__(self, x):
        idx = np.searchsorted(np.asarray(self.breaks), np.asarray(x, dtype=float), side="right")
        return np.asarray(self.values, dtype=float)[idx]

    def derivative(self, x):
        return np.zeros(np.shape(x))


def random_bv(rng, a, b, pieces=8, low=-1.0, high=1.0):
    """Random piecewise-constant data with breakpoints on the lattice a + i (b-a)/pieces."""
    breaks = tuple(a + (b - a) * np.arange(1, pieces) / pieces)
    values = tuple(rng.uniform(low, high, size=pieces))
    return PiecewiseConstant(breaks=breaks, values=values)


@dataclass(frozen=True)
class EulerProfile:
    """Conserved Euler state assembled from density and velocity profiles."""

    density: object
    velocity: object = Constant(0.0)
    model: IsentropicEuler = field(default_factory=IsentropicEuler)

    def __call__(self, x):
        return self.model.conserved(self.density(x), self.velocity(x))


# -- closed-form solutions ---------------------------------------------------

@dataclass(frozen=True)
class AdvectionTranslate:
    u0: object
    a: float = 1.0
    period: Tuple[float, float] = None

    def __call__(self, x, t=0.0):
        xi = np.asarray(x, dtype=float) - self.a * t
        if self.period is not None:
            lo, hi = self.period
            xi = lo + np.mod(xi - lo, hi - lo)
        return self.u0(xi)


@dataclass(frozen=True)
class BurgersSmooth:
    """Smooth Burgers solution u = u0(x - u t) before the gradient catastrophe.

    ``span`` is an interval containing one full period (or the support of the
    variation) of ``u0``; it is sampled to bound u0 and u0'."""

    u0: object
    span: Tuple[float, float] = (0.0, 1.0)
    samples: int = 20001
    tol: float = 1e-13

    def _sample(self):
        s = np.linspace(self.span[0], self.span[1], self.samples)
        return self.u0(s), self.u0.derivative(s)

    @property
    def breaking_time(self):
        _, du = self._sample()
        steepest = np.max(-du)
        return np.inf if steepest <= 0 else 1.0 / steepest

    def __call__(self, x, t=0.0):
        x = np.asarray(x, dtype=float)
        if t < 0 or t > 0.9 * self.breaking_time:
            raise DomainError(
                f"t={t} outside [0, 0.9 * breaking time = {0.9 * self.breaking_time:.6g}]")
        if t == 0:
            return self.u0(x)
        vals, _ = self._sample()
        pad = 1e-6 * (1 + np.max(np.abs(vals)))
        lo = x - t * (np.max(vals) + pad)
        hi = x - t * (np.min(vals) - pad)
        foot = 0.5 * (lo + hi)
        for _ in range(200):
            g = foot + t * self.u0(foot) - x
            lo = np.where(g < 0, foot, lo)
            hi = np.where(g > 0, foot, hi)
            dg = 1.0 + t * self.u0.derivative(foot)
            newton = foot - g / dg
            inside = (newton > lo) & (newton < hi)
            foot_new = np.where(inside, newton, 0.5 * (lo + hi))
            done = (np.abs(foot_new - foot) <= self.tol * max(1.0, t)) & (np.abs(g) <= self.tol)
            foot = foot_new
            if np.all(done) or np.all(hi - lo <= 1e-15 * (1 + np.abs(foot))):
                break
        else:
            raise NumericalError("characteristic root finding did not converge")
        return self.u0(foot)


@dataclass(frozen=True)
class BurgersRiemann:
    ul: float = 1.0
    ur: float = 0.0
    x0: float = 0.0

    @property
    def shock_speed(self):
        return 0.5 * (self.ul + self.ur)

    def __call__(self, x, t=0.0):
        z = np.asarray(x, dtype=float) - self.x0
        if t == 0:
            return np.where(z < 0, self.ul, self.ur).astype(float)
        if self.ul > self.ur:
            return np.where(z < self.shock_speed * t, self.ul, self.ur).astype(float)
        return np.clip(z / t, self.ul, self.ur)


PROBLEM_IDS = ("advection-translate", "burgers-smooth-prebreak", "burgers-shock-riemann")


def exact_oracle(problem_id, x, t, **params):
    """Evaluate a closed-form solution by id (see PROBLEM_IDS)."""
    if problem_id == "advection-translate":
        sol = AdvectionTranslate(u0=params.get("u0", np.sin), a=params.get("a", 1.0),
                                 period=params.get("period"))
    elif problem_id == "burgers-smooth-prebreak":
        sol = BurgersSmooth(u0=params["u0"], span=params.get("span", (0.0, 1.0)))
    elif problem_id == "burgers-shock-riemann":
        ul, ur = params.get("ul", 1.0), params.get("ur", 0.0)
        if not ul > ur:
            raise DomainError("shock data needs ul > ur")
        sol = BurgersRiemann(ul=ul, ur=ur, x0=params.get("x0", 0.0))
    else:
        raise UsageError(f"unknown problem {problem_id!r}; expected one of {PROBLEM_IDS}")
    return sol(x, t)


@dataclass(frozen=True)
class StationaryShock:
    """Perturbed stationary Lax shock of isentropic Euler at ``x0``.

    The momentum m solves m^2 (1/rho_l - 1/rho_r) = p(rho_r) - p(rho_l).  Both
    density and momentum are multiplied by sinusoidal perturbations that
    vanish at ``x0``, so the jump data satisfy Rankine-Hugoniot with zero speed."""

    rho_left: float = 1.0
    rho_right: float = 2.0
    x0: float = 0.5
    amp_rho: float = 0.1
    amp_m: float = 0.05
    model: IsentropicEuler = field(default_factory=IsentropicEuler)

    def __post_init__(self):
        if not 0 < self.rho_left < self.rho_right:
            raise DomainError("a stationary Lax shock needs 0 < rho_left < rho_right")

    @property
    def momentum(self):
        m = self.model
        dp = m.pressure(self.rho_right) - m.pressure(self.rho_left)
        return float(np.sqrt(dp / (1.0 / self.rho_left - 1.0 / self.rho_right)))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        wave = np.sin(2 * np.pi * (x - self.x0))
        rho = np.where(x < self.x0, self.rho_left, self.rho_right) * (1 + self.amp_rho * wave)
        mom = self.momentum * (1 + self.amp_m * wave)
        return np.stack([rho, mom], axis=-1)
