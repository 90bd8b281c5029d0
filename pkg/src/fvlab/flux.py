"""Interface flux traces F(t) = f0 + f1 t on [0, k).

Every builder returns f0 = f(u*) with u* the Godunov state of the one-sided
limits; they differ only in the time slope f1 = f'(u*) v, where v is

* godunov  -- 0
* grp      -- the GRP derivative (exact upwind transport for scalar laws,
              acoustic linearisation for systems)
* muscl    -- Hancock predictor of the upwind cell
* acoustic -- acoustic linearisation, for scalar laws too
"""
from dataclasses import dataclass

import numpy as np

from .errors import UsageError
from .mesh import LIMITERS
from .models import IsentropicEuler
from .riemann import (InterfaceData, acoustic_system_derivative, muscl_derivative,
                      riemann_state, scalar_grp_derivative)

SCHEMES = ("godunov", "grp", "muscl", "acoustic")


@dataclass(frozen=True)
class SchemeId:
    name: str = "godunov"
    order: int = 1
    limiter: str = "minmod"

    def __post_init__(self):
        if self.name not in SCHEMES:
            raise UsageError(f"unknown scheme {self.name!r}; expected one of {SCHEMES}")
        if self.order not in (1, 2):
            raise UsageError("reconstruction order must be 1 or 2")
        if self.limiter not in LIMITERS:
            raise UsageError(f"unknown limiter {self.limiter!r}; expected one of {LIMITERS}")

    @classmethod
    def parse(cls, text, order=None, limiter="minmod"):
        """Accepts "grp", "grp/2" or "grp/2/van-leer"."""
        parts = text.strip().split("/")
        name = parts[0]
        if len(parts) > 1:
            order = int(parts[1])
        if len(parts) > 2:
            limiter = parts[2]
        if order is None:
            order = 1 if name == "godunov" else 2
        return cls(name, int(order), limiter)

    def __str__(self):
        return f"{self.name}/{self.order}/{self.limiter}"


GODUNOV = SchemeId("godunov", 1)


@dataclass(frozen=True)
class FluxTrace:
    f0: np.ndarray
    f1: np.ndarray
    stencil: int = 1

    def __call__(self, t):
        return self.f0 + self.f1 * t

    def integral(self, k):
        """Exact integral over [0, k)."""
        return self.f0 * k + self.f1 * (0.5 * k * k)


def godunov_trace(data, model, star=None):
    star = riemann_state(data.ul, data.ur, model) if star is None else star
    f0 = model.flux(star.state)
    return FluxTrace(f0, np.zeros_like(f0))


def _with_derivative(data, model, star, ut):
    f0 = model.flux(star.state)
    f1 = np.einsum("...de,...e->...d", model.jacobian(star.state), ut)
    return FluxTrace(f0, f1)


def grp_trace(data, model, star=None):
    star = riemann_state(data.ul, data.ur, model) if star is None else star
    if isinstance(model, IsentropicEuler):
        ut = acoustic_system_derivative(data, star, model)
    else:
        ut = scalar_grp_derivative(data, star, model)
    return _with_derivative(data, model, star, ut)


def muscl_trace(data, model, star=None):
    star = riemann_state(data.ul, data.ur, model) if star is None else star
    return _with_derivative(data, model, star, muscl_derivative(data, star, model))


def acoustic_trace(data, model, star=None):
    star = riemann_state(data.ul, data.ur, model) if star is None else star
    return _with_derivative(data, model, star, acoustic_system_derivative(data, star, model))


BUILDERS = {
    "godunov": godunov_trace,
    "grp": grp_trace,
    "muscl": muscl_trace,
    "acoustic": acoustic_trace,
}


def build_trace(scheme, data, model):
    name = scheme.name if isinstance(scheme, SchemeId) else scheme
    return BUILDERS[name](data, model)


def interface_data(gf, boundary):
    """InterfaceData at all M + 1 interfaces x_{-1/2} .. x_{M-1/2} of ``gf``."""
    h = gf.grid.h
    avg = boundary.pad(gf.avg, width=1)
    slope = boundary.pad(gf.slope, width=1, ghost_zero=True)
    left_cells = slice(0, -1)
    right_cells = slice(1, None)
    ul = avg[left_cells] + 0.5 * h * slope[left_cells]
    ur = avg[right_cells] - 0.5 * h * slope[right_cells]
    return InterfaceData(ul=ul, ur=ur, sl=slope[left_cells], sr=slope[right_cells],
                         avg_l=avg[left_cells], avg_r=avg[right_cells])
