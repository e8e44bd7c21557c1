"""Square-wave steady cycle from the four-leg affine map.

States are ``(D, R, I)`` in the instantaneous eigenbasis, ``D = 1/2 - rho_ee``.
The cycle is p -(low gap, thermal)-> q -(sudden up)-> r -(high gap,
thermal)-> s -(sudden down)-> p.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .dissipation import total_rates

VALIDITY_LIMIT = 0.1


class ValidityWarning(UserWarning):
    """Gamma_sigma * dt is not small, the linearised legs lose accuracy."""


class SingularMap(ArithmeticError):
    """The composite map has no unique fixed point (no dissipation)."""


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class BranchRates:
    gamma_down: float = 0.0
    gamma_up: float = 0.0
    gamma_phi: float = 0.0

    @property
    def gamma_sigma(self):
        return self.gamma_down + self.gamma_up


@dataclass(frozen=True)
class MapParams:
    """Branch 1 is the high gap ``omega1`` (duration ``dt1``), branch 2 the low gap."""

    omega1: float
    omega2: float
    dt1: float
    dt2: float
    rates1: BranchRates
    rates2: BranchRates

    @property
    def eta(self):
        return math.sqrt(max(0.0, 1.0 - self.omega2**2 / self.omega1**2))

    @property
    def period(self):
        return self.dt1 + self.dt2

    @property
    def omega_L(self):
        return 2 * math.pi / self.period


def map_params(model, baths, dt1=None, dt2=None):
    """Map parameters for a model whose drive is treated as a square wave."""
    if dt1 is None:
        dt1 = model.drive.high_duration()
    if dt2 is None:
        dt2 = model.drive.low_duration()

    def branch(value):
        rs = total_rates(model, baths, value)
        return BranchRates(float(rs.gamma_down), float(rs.gamma_up), float(rs.gamma_phi))

    return MapParams(model.omega1, model.omega2, dt1, dt2, branch(2.0), branch(0.0))


@dataclass(frozen=True)
class LegPropagator:
    """Affine map ``x -> linear @ x + offset`` on ``(D, R, I)``."""

    linear: np.ndarray
    offset: np.ndarray
    tag: str

    def __call__(self, x):
        return self.linear @ np.asarray(x, dtype=float) + self.offset

    def then(self, other):
        """Composite: apply ``self`` first, then ``other``."""
        return LegPropagator(
            other.linear @ self.linear,
            other.linear @ self.offset + other.offset,
            f"{self.tag}>{other.tag}",
        )


def thermal_leg(omega, dt, rates, tag, exponential=False):
    gs = rates.gamma_sigma
    if exponential:
        decay_d = math.exp(-gs * dt)
        d_inf = (rates.gamma_down - rates.gamma_up) / (2 * gs) if gs > 0 else 0.0
        shift = d_inf * (1 - decay_d)
        coh = math.exp(-(0.5 * gs + 2 * rates.gamma_phi) * dt)
    else:
        decay_d = 1 - gs * dt
        shift = (rates.gamma_down - 0.5 * gs) * dt
        coh = 1 - (0.5 * gs + 2 * rates.gamma_phi) * dt
    c, s = math.cos(omega * dt), math.sin(omega * dt)
    linear = np.array(
        [
            [decay_d, 0.0, 0.0],
            [0.0, coh * c, -coh * s],
            [0.0, coh * s, coh * c],
        ]
    )
    return LegPropagator(linear, np.array([shift, 0.0, 0.0]), tag)


def sudden_leg(eta, up, tag):
    c = math.sqrt(1 - eta**2)
    sgn = -1.0 if up else 1.0
    # up:   D' = c D - eta R,  R' = c R + eta D
    # down: D' = c D + eta R,  R' = c R - eta D
    linear = np.array(
        [
            [c, sgn * eta, 0.0],
            [-sgn * eta, c, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )
    return LegPropagator(linear, np.zeros(3), tag)


def build_leg_propagators(params, exponential=False):
    """The four legs in cycle order: Thermal2, SuddenUp, Thermal1, SuddenDown."""
    for name, rates, dt in (("1", params.rates1, params.dt1), ("2", params.rates2, params.dt2)):
        if rates.gamma_sigma * dt > VALIDITY_LIMIT:
            warnings.warn(
                f"Gamma_sigma*dt = {rates.gamma_sigma * dt:.3g} on branch {name}",
                ValidityWarning,
                stacklevel=2,
            )
    eta = params.eta
    return (
        thermal_leg(params.omega2, params.dt2, params.rates2, "Thermal2", exponential),
        sudden_leg(eta, True, "SuddenUp"),
        thermal_leg(params.omega1, params.dt1, params.rates1, "Thermal1", exponential),
        sudden_leg(eta, False, "SuddenDown"),
    )


def composite_map(legs):
    out = legs[0]
    for leg in legs[1:]:
        out = out.then(leg)
    return out


@dataclass(frozen=True)
class CornerStates:
    p: np.ndarray
    q: np.ndarray
    r: np.ndarray
    s: np.ndarray

    def as_dict(self):
        return {"p": self.p, "q": self.q, "r": self.r, "s": self.s}

    @property
    def rho_ee_p(self):
        return 0.5 - self.p[0]


def corners_from(legs, xp):
    xq = legs[0](xp)
    xr = legs[1](xq)
    xs = legs[2](xr)
    return CornerStates(np.asarray(xp, dtype=float), xq, xr, xs)


def steady_state_fixed_point(params, exponential=False, legs=None):
    """Exact fixed point of the composite map by a 3x3 linear solve."""
    if legs is None:
        legs = build_leg_propagators(params, exponential)
    comp = composite_map(legs)
    radius = max(abs(np.linalg.eigvals(comp.linear)))
    if radius >= 1 - 1e-13:
        raise SingularMap(f"spectral radius {radius:.15f}; the cycle has no unique fixed point")
    xp = np.linalg.solve(np.eye(3) - comp.linear, comp.offset)
    return corners_from(legs, xp)


def iterate_fixed_point(params, x0=(0.0, 0.0, 0.0), tol=1e-14, max_iter=10**6, exponential=False):
    """Fixed point by plain iteration of the cycle map (slow; used as a check)."""
    comp = composite_map(build_leg_propagators(params, exponential))
    x = np.asarray(x0, dtype=float)
    for _ in range(max_iter):
        x_new = comp(x)
        if np.max(np.abs(x_new - x)) < tol:
            return x_new
        x = x_new
    raise ArithmeticError("iteration did not converge")


def _check_closed_form_domain(params):
    if not math.isclose(params.dt1, params.dt2, rel_tol=1e-9):
        raise DomainError("closed forms need dt1 == dt2")
    if params.rates1.gamma_down != 0 or params.rates1.gamma_sigma != 0:
        raise DomainError("closed forms need zero rates on the high-gap branch")
    if params.rates2.gamma_sigma * params.dt2 >= 1:
        raise DomainError("closed forms need Gamma_sigma2 * dt << 1")
    if params.rates2.gamma_sigma * params.dt2 > VALIDITY_LIMIT:
        warnings.warn("Gamma_sigma2 * dt above 0.1", ValidityWarning, stacklevel=3)


def _denominator(w1, w2, dt):
    kk = 2 * (w1**2 - w2**2) * math.cos(w2 * dt) + (w1 - w2) ** 2 * math.cos((w1 - w2) * dt)
    return 4 * w1**2 - (w1 + w2) ** 2 * math.cos((w1 + w2) * dt) - kk


def closed_form_power(params):
    """Leading-order power with the high-gap branch decoupled (internal units)."""
    _check_closed_form_domain(params)
    w1, w2, dt = params.omega1, params.omega2, params.dt1
    r = params.rates2
    num = w2 * (2 * r.gamma_down - r.gamma_sigma) * (1 - math.cos(w1 * dt)) * (w1**2 - w2**2)
    return num / (2 * _denominator(w1, w2, dt))


def closed_form_excitation(params):
    """Leading-order excited population at p with the high-gap branch decoupled."""
    _check_closed_form_domain(params)
    w1, w2, dt = params.omega1, params.omega2, params.dt1
    r = params.rates2
    bracket = w1 * math.cos(w1 * dt / 2) * math.sin(w2 * dt / 2) + w2 * math.cos(
        w2 * dt / 2
    ) * math.sin(w1 * dt / 2)
    ratio = (2 * r.gamma_down - r.gamma_sigma) / r.gamma_sigma
    return 0.5 - ratio * 4 * bracket**2 / _denominator(w1, w2, dt)


def _sq(x):
    return float(x[0] ** 2 + x[1] ** 2 + x[2] ** 2)


def purity_audit(corners):
    """``R^2 + I^2 + D^2`` at each corner and its change along each leg."""
    c = corners.as_dict() if isinstance(corners, CornerStates) else corners
    norms = {k: _sq(v) for k, v in c.items()}
    changes = {
        "p->q": norms["q"] - norms["p"],
        "q->r": norms["r"] - norms["q"],
        "r->s": norms["s"] - norms["r"],
        "s->p": norms["p"] - norms["s"],
    }
    return norms, changes


@dataclass(frozen=True)
class MapPower:
    total: float
    P1: float
    P2: float


def map_power(params, corners):
    """Heat released per unit time on each branch from the corner populations."""
    f = 1.0 / params.period
    P2 = params.omega2 * (corners.q[0] - corners.p[0]) * f
    P1 = params.omega1 * (corners.s[0] - corners.r[0]) * f
    return MapPower(P1 + P2, P1, P2)
