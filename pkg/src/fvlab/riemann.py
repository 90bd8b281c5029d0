"""Interface solvers.

Scalar laws use the closed-form Godunov state of a convex flux.  The
isentropic Euler Riemann problem is solved for the star pressure with a
safeguarded Newton iteration (bisection steps whenever Newton leaves the
bracket) and then sampled along x/t = 0.

All functions are vectorised over leading axes.
"""
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError, NumericalError, UsageError, VacuumError
from .models import IsentropicEuler, ScalarLaw, as_state

SONIC_TOL = 1e-12


@dataclass(frozen=True)
class InterfaceData:
    """One-sided limits and slopes of a piecewise-linear function at interfaces.

    ``avg_l``/``avg_r`` are the averages of the two adjacent cells (needed by
    the MUSCL predictor only)."""

    ul: np.ndarray
    ur: np.ndarray
    sl: np.ndarray
    sr: np.ndarray
    avg_l: Optional[np.ndarray] = None
    avg_r: Optional[np.ndarray] = None

    @classmethod
    def make(cls, ul, ur, sl=0.0, sr=0.0, avg_l=None, avg_r=None, dim=1):
        ul, ur = as_state(ul, dim), as_state(ur, dim)
        sl = np.broadcast_to(sl if np.ndim(sl) == 0 else as_state(sl, dim), ul.shape).astype(float)
        sr = np.broadcast_to(sr if np.ndim(sr) == 0 else as_state(sr, dim), ur.shape).astype(float)
        avg_l = ul if avg_l is None else as_state(avg_l, dim)
        avg_r = ur if avg_r is None else as_state(avg_r, dim)
        return cls(ul, ur, sl, sr, avg_l, avg_r)


@dataclass(frozen=True)
class StarState:
    """Self-similar Riemann solution sampled at x/t = 0.

    ``state`` is in conserved variables.  The Euler-only fields are None for
    scalar laws."""

    state: np.ndarray
    sonic: np.ndarray
    pressure: Optional[np.ndarray] = None
    velocity: Optional[np.ndarray] = None
    rho_left: Optional[np.ndarray] = None
    rho_right: Optional[np.ndarray] = None
    left_shock: Optional[np.ndarray] = None
    right_shock: Optional[np.ndarray] = None
    residual: Optional[np.ndarray] = None


def scalar_interface_state(ul, ur, model):
    """Entropy Godunov state: argmin f on [ul, ur] if ul <= ur, else argmax on [ur, ul]."""
    if not isinstance(model, ScalarLaw):
        raise UsageError("scalar_interface_state needs a scalar model")
    if not model.convex:
        raise UsageError("only convex scalar fluxes are supported")
    ul = as_state(ul, 1)
    ur = as_state(ur, 1)
    rare = np.clip(model.sonic_point(), np.minimum(ul, ur), np.maximum(ul, ur))
    fl, fr = model.flux(ul), model.flux(ur)
    shock = np.where(fl >= fr, ul, ur)
    ustar = np.where(ul <= ur, rare, shock)
    sonic = np.abs(model.dflux(ustar)[..., 0]) <= SONIC_TOL
    return StarState(state=ustar, sonic=sonic)


# -- isentropic Euler -------------------------------------------------------

def _wave_function(model, p, rho_k, p_k, c_k):
    """Velocity jump across a wave connecting (rho_k, p_k) to pressure p, and d/dp."""
    g = model.gamma
    rho = model.density_from_pressure(p)
    c = model.sound_speed(rho)
    shock = p > p_k
    with np.errstate(invalid="ignore", divide="ignore"):
        jump = (p - p_k) * (1.0 / rho_k - 1.0 / rho)
        phi_s = np.sqrt(np.maximum(jump, 0.0))
        dphi_s = ((1.0 / rho_k - 1.0 / rho) + (p - p_k) / (rho * rho * c * c)) / (2.0 * phi_s)
        phi_r = 2.0 / (g - 1.0) * (c - c_k)
        dphi_r = 1.0 / (rho * c)
    return np.where(shock, phi_s, phi_r), np.where(shock, dphi_s, dphi_r)


def _density_from_sound_speed(model, c):
    return (c * c / (model.gamma * model.kappa)) ** (1.0 / (model.gamma - 1.0))


def euler_star_state(left, right, model, tol=1e-12, maxiter=100):
    """Exact isentropic Riemann solution at x/t = 0.

    ``left``/``right`` are primitive pairs (rho, u) with shape (..., 2)."""
    if not isinstance(model, IsentropicEuler):
        raise UsageError("euler_star_state needs the isentropic Euler model")
    left = np.asarray(left, dtype=float)
    right = np.asarray(right, dtype=float)
    rl, vl = left[..., 0], left[..., 1]
    rr, vr = right[..., 0], right[..., 1]
    if np.any(rl <= 0) or np.any(rr <= 0) or not np.all(np.isfinite(left)) or not np.all(np.isfinite(right)):
        raise DomainError("Riemann data needs positive finite densities")
    g = model.gamma
    pl, pr = model.pressure(rl), model.pressure(rr)
    cl, cr = model.sound_speed(rl), model.sound_speed(rr)
    du = vr - vl
    if np.any(2.0 / (g - 1.0) * (cl + cr) <= du):
        raise VacuumError("Riemann data generates a vacuum")

    def matching(p):
        fl, dfl = _wave_function(model, p, rl, pl, cl)
        fr, dfr = _wave_function(model, p, rr, pr, cr)
        return fl + fr + du, dfl + dfr

    # two-rarefaction guess
    cguess = np.maximum(0.5 * (cl + cr) - 0.25 * (g - 1.0) * du, 1e-8 * (cl + cr))
    p = model.pressure(_density_from_sound_speed(model, cguess))
    lo = np.zeros_like(p)
    hi = np.maximum(np.maximum(pl, pr), p) * 2.0
    for _ in range(400):
        bad = matching(hi)[0] <= 0
        if not np.any(bad):
            break
        hi = np.where(bad, 2.0 * hi, hi)
    scale = 1.0 + np.abs(vl) + np.abs(vr) + cl + cr
    converged = np.zeros(p.shape, dtype=bool)
    for _ in range(maxiter):
        res, dres = matching(p)
        lo = np.where(res < 0, p, lo)
        hi = np.where(res > 0, p, hi)
        converged = np.abs(res) <= tol * scale
        if np.all(converged):
            break
        with np.errstate(invalid="ignore", divide="ignore"):
            newton = p - res / dres
        ok = np.isfinite(newton) & (newton > lo) & (newton < hi)
        p = np.where(converged, p, np.where(ok, newton, 0.5 * (lo + hi)))
    else:
        res = matching(p)[0]
        converged = np.abs(res) <= tol * scale
        if not np.all(converged):
            raise NumericalError(
                f"star-pressure iteration did not converge in {maxiter} iterations "
                f"(max residual {np.max(np.abs(res)):.3e})")
    res, _ = matching(p)
    fl, _ = _wave_function(model, p, rl, pl, cl)
    fr, _ = _wave_function(model, p, rr, pr, cr)
    ustar = 0.5 * (vl + vr) + 0.5 * (fr - fl)
    rstar = model.density_from_pressure(p)
    cstar = model.sound_speed(rstar)
    lshock = p > pl
    rshock = p > pr

    with np.errstate(invalid="ignore", divide="ignore"):
        sl = (rstar * ustar - rl * vl) / (rstar - rl)
        sr = (rstar * ustar - rr * vr) / (rstar - rr)
    sl = np.where(np.isfinite(sl), sl, vl - cl)
    sr = np.where(np.isfinite(sr), sr, vr + cr)
    # left wave
    l_whole_right = np.where(lshock, sl >= 0, vl - cl >= 0)
    l_fan = ~lshock & (vl - cl < 0) & (ustar - cstar > 0)
    # right wave
    r_whole_left = np.where(rshock, sr <= 0, vr + cr <= 0)
    r_fan = ~rshock & (vr + cr > 0) & (ustar + cstar < 0)

    cfl_ = ((g - 1.0) * vl + 2.0 * cl) / (g + 1.0)
    cfr_ = (2.0 * cr - (g - 1.0) * vr) / (g + 1.0)
    rho = np.select([l_whole_right, l_fan, r_whole_left, r_fan],
                    [rl, _density_from_sound_speed(model, np.maximum(cfl_, 0.0)), rr,
                     _density_from_sound_speed(model, np.maximum(cfr_, 0.0))], rstar)
    vel = np.select([l_whole_right, l_fan, r_whole_left, r_fan], [vl, cfl_, vr, -cfr_], ustar)
    fan = (l_fan & ~l_whole_right) | (r_fan & ~r_whole_left & ~l_whole_right & ~l_fan)
    state = model.conserved(rho, vel)
    speeds = model.characteristic_speeds(state)
    sonic = fan | np.any(np.abs(speeds) <= SONIC_TOL, axis=-1)
    return StarState(state=state, sonic=sonic, pressure=p, velocity=ustar,
                     rho_left=rstar, rho_right=rstar.copy(), left_shock=lshock,
                     right_shock=rshock, residual=np.abs(res))


def riemann_state(ul, ur, model):
    """Dispatch on the model; inputs and ``state`` in conserved variables."""
    if isinstance(model, IsentropicEuler):
        ul, ur = model.validate(ul), model.validate(ur)
        left = np.stack(model.primitive(ul), axis=-1)
        right = np.stack(model.primitive(ur), axis=-1)
        return euler_star_state(left, right, model)
    return scalar_interface_state(ul, ur, model)


# -- instantaneous time derivatives -------------------------------------------

def scalar_grp_derivative(data, star, model):
    """u_t(x_{j+1/2}, 0+) by upwind transport; zero at sonic interfaces."""
    if not isinstance(model, ScalarLaw):
        raise UsageError("scalar_grp_derivative needs a scalar model")
    lam = model.dflux(star.state)
    ut = np.where(lam > 0, -lam * data.sl, np.where(lam < 0, -lam * data.sr, 0.0))
    return np.where(np.asarray(star.sonic)[..., None], 0.0, ut)


def _upwind_amplitudes(lam, left, amp_l, amp_r):
    return np.where(lam > SONIC_TOL, amp_l, np.where(lam < -SONIC_TOL, amp_r, 0.0))


def acoustic_system_derivative(data, star, model):
    """Linearised (acoustic) GRP: u_t = -sum_p lam_p (l_p . sigma_up(p)) r_p at u*."""
    if isinstance(model, IsentropicEuler) and np.any(star.state[..., 0] <= 0):
        raise DomainError("nonpositive star density")
    lam, right, left = model.eigensystem(star.state)
    amp_l = np.einsum("...pd,...d->...p", left, data.sl)
    amp_r = np.einsum("...pd,...d->...p", left, data.sr)
    amp = _upwind_amplitudes(lam, left, amp_l, amp_r)
    return -np.einsum("...dp,...p->...d", right, lam * amp)


def muscl_derivative(data, star, model):
    """Hancock surrogate for u_t: -f'(avg_up) sigma_up per characteristic field of u*."""
    lam, right, left = model.eigensystem(star.state)
    pred_l = -np.einsum("...de,...e->...d", model.jacobian(data.avg_l), data.sl)
    pred_r = -np.einsum("...de,...e->...d", model.jacobian(data.avg_r), data.sr)
    amp_l = np.einsum("...pd,...d->...p", left, pred_l)
    amp_r = np.einsum("...pd,...d->...p", left, pred_r)
    amp = _upwind_amplitudes(lam, left, amp_l, amp_r)
    return np.einsum("...dp,...p->...d", right, amp)
