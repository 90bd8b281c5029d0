"""Conservation laws u_t + f(u)_x = 0 used throughout the package.

States are numpy arrays whose last axis has length ``model.dim``; every method
broadcasts over the leading axes.  Euler states are stored in conserved
variables (density, momentum).
"""
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, UsageError


def as_state(u, dim):
    """Coerce scalars / sequences to an array with a trailing state axis."""
    u = np.asarray(u, dtype=float)
    if dim == 1 and (u.ndim == 0 or u.shape[-1] != 1):
        u = u[..., None]
    if u.shape[-1] != dim:
        raise UsageError(f"expected trailing state axis of length {dim}, got shape {u.shape}")
    return u


class FluxModel:
    """Common interface.  Subclasses are frozen dataclasses."""

    name = "abstract"
    dim = 1

    def flux(self, u):
        raise NotImplementedError

    def jacobian(self, u):
        raise NotImplementedError

    def eigensystem(self, u):
        """Return (speeds, right, left) with right eigenvectors as columns and
        left eigenvectors as rows, normalised so that left @ right = I."""
        raise NotImplementedError

    def characteristic_speeds(self, u):
        return self.eigensystem(u)[0]

    def validate(self, u):
        u = as_state(u, self.dim)
        if not np.all(np.isfinite(u)):
            raise DomainError("non-finite state")
        return u

    def wave_speed_bound(self, states):
        """sup |eigenvalue| over a finite set of states."""
        states = as_state(states, self.dim)
        if states.size == 0:
            return 0.0
        return float(np.max(np.abs(self.characteristic_speeds(states))))

    @property
    def is_scalar(self):
        return self.dim == 1


class ScalarLaw(FluxModel):
    dim = 1
    convex = True

    def dflux(self, u):
        raise NotImplementedError

    def sonic_point(self):
        """Minimiser of the (convex) flux; +-inf when f is monotone."""
        raise NotImplementedError

    def jacobian(self, u):
        u = as_state(u, 1)
        return self.dflux(u)[..., None]

    def eigensystem(self, u):
        u = as_state(u, 1)
        lam = self.dflux(u)
        one = np.ones(u.shape[:-1] + (1, 1))
        return lam, one, one.copy()


@dataclass(frozen=True)
class LinearAdvection(ScalarLaw):
    a: float = 1.0
    name: str = field(default="advection", init=False)

    def flux(self, u):
        return self.a * as_state(u, 1)

    def dflux(self, u):
        return np.full(np.shape(u), float(self.a))

    def sonic_point(self):
        if self.a > 0:
            return -np.inf
        if self.a < 0:
            return np.inf
        return 0.0


@dataclass(frozen=True)
class Burgers(ScalarLaw):
    name: str = field(default="burgers", init=False)

    def flux(self, u):
        u = as_state(u, 1)
        return 0.5 * u * u

    def dflux(self, u):
        return np.array(u, dtype=float, copy=True)

    def sonic_point(self):
        return 0.0


@dataclass(frozen=True)
class ConvexScalarLaw(ScalarLaw):
    """User supplied convex flux.  ``sonic`` is located by root finding on f'
    when not given."""

    f: Callable = None
    df: Callable = None
    sonic: Optional[float] = None
    name: str = "convex"

    def flux(self, u):
        return np.asarray(self.f(as_state(u, 1)), dtype=float)

    def dflux(self, u):
        return np.asarray(self.df(np.asarray(u, dtype=float)), dtype=float)

    def sonic_point(self):
        if self.sonic is not None:
            return self.sonic
        lo, hi = -1.0, 1.0
        for _ in range(200):
            if self.df(lo) < 0 < self.df(hi):
                return brentq(self.df, lo, hi, xtol=1e-15, rtol=1e-15)
            if self.df(lo) >= 0:
                lo *= 2.0
            if self.df(hi) <= 0:
                hi *= 2.0
            if abs(lo) > 1e30:
                return -np.inf
            if hi > 1e30:
                return np.inf
        raise DomainError("could not bracket the sonic point")


@dataclass(frozen=True)
class IsentropicEuler(FluxModel):
    """rho_t + m_x = 0, m_t + (m^2/rho + kappa rho^gamma)_x = 0.

    ``strict=False`` admits any gamma > 1 (gamma = 2 is the shallow-water
    analogue); the polytropic range 1 < gamma <= 5/3 is enforced otherwise."""

    gamma: float = 1.4
    kappa: float = 1.0
    strict: bool = True
    name: str = field(default="euler-isentropic", init=False)
    dim = 2

    def __post_init__(self):
        upper = 5.0 / 3.0 if self.strict else np.inf
        if not (1.0 < self.gamma <= upper):
            raise DomainError(f"gamma must lie in (1, {'5/3' if self.strict else 'inf'}), got {self.gamma}")
        if not self.kappa > 0:
            raise DomainError(f"kappa must be positive, got {self.kappa}")

    def validate(self, u):
        u = super().validate(u)
        if np.any(u[..., 0] <= 0):
            raise DomainError("nonpositive density")
        return u

    def pressure(self, rho):
        return self.kappa * np.asarray(rho, dtype=float) ** self.gamma

    def sound_speed(self, rho):
        rho = np.asarray(rho, dtype=float)
        return np.sqrt(self.gamma * self.kappa * rho ** (self.gamma - 1.0))

    def density_from_pressure(self, p):
        return (np.asarray(p, dtype=float) / self.kappa) ** (1.0 / self.gamma)

    def primitive(self, u):
        u = as_state(u, 2)
        return u[..., 0], u[..., 1] / u[..., 0]

    def conserved(self, rho, vel):
        rho = np.asarray(rho, dtype=float)
        vel = np.asarray(vel, dtype=float)
        return np.stack(np.broadcast_arrays(rho, rho * vel), axis=-1)

    def flux(self, u):
        u = self.validate(u)
        rho, m = u[..., 0], u[..., 1]
        return np.stack([m, m * m / rho + self.pressure(rho)], axis=-1)

    def jacobian(self, u):
        u = self.validate(u)
        rho, vel = self.primitive(u)
        c2 = self.sound_speed(rho) ** 2
        jac = np.zeros(u.shape[:-1] + (2, 2))
        jac[..., 0, 1] = 1.0
        jac[..., 1, 0] = c2 - vel * vel
        jac[..., 1, 1] = 2.0 * vel
        return jac

    def eigensystem(self, u):
        u = self.validate(u)
        rho, vel = self.primitive(u)
        c = self.sound_speed(rho)
        lam = np.stack([vel - c, vel + c], axis=-1)
        right = np.empty(u.shape[:-1] + (2, 2))
        right[..., 0, 0] = 1.0
        right[..., 0, 1] = 1.0
        right[..., 1, 0] = vel - c
        right[..., 1, 1] = vel + c
        left = np.empty_like(right)
        left[..., 0, 0] = (vel + c) / (2 * c)
        left[..., 0, 1] = -1.0 / (2 * c)
        left[..., 1, 0] = -(vel - c) / (2 * c)
        left[..., 1, 1] = 1.0 / (2 * c)
        return lam, right, left


MODEL_IDS = ("advection", "burgers", "euler-isentropic")


def make_model(model_id, **params):
    """Build a model from its string id and a parameter map (a, gamma, kappa)."""
    if model_id == "advection":
        return LinearAdvection(a=float(params.get("a", 1.0)))
    if model_id == "burgers":
        return Burgers()
    if model_id == "euler-isentropic":
        return IsentropicEuler(gamma=float(params.get("gamma", 1.4)),
                               kappa=float(params.get("kappa", 1.0)),
                               strict=bool(params.get("strict", True)))
    raise UsageError(f"unknown model {model_id!r}; expected one of {MODEL_IDS}")


def eval_flux(model, state):
    out = model.flux(as_state(state, model.dim))
    return out[..., 0] if model.dim == 1 and np.ndim(state) == 0 else out


def characteristic_speeds(model, state):
    return model.characteristic_speeds(model.validate(state))
