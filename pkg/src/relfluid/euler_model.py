"""Relativistic Euler flow (isothermal pressure p = k^2 rho) on Schwarzschild.

Conserved/primitive algebra, flux and geometric source, characteristic speeds,
smooth steady branches defined by two algebraic invariants (with the dual ODE
form used as an independent check in the tests), sonic points, the critical
branch, and standing-shock junction conditions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.optimize import brentq

from .errors import (
    ConfigurationError,
    DomainError,
    InadmissibleShockError,
    UnphysicalStateError,
)

_SMALL_W = 1e-6  # series switch for the velocity recovery near U1 = 0


def metric(r, mass):
    return 1.0 - 2.0 * mass / np.asarray(r, dtype=float)


@dataclass(frozen=True)
class EulerParams:
    k: float  # sound speed
    mass: float

    def __post_init__(self):
        if not (0.0 < self.k <= 1.0):
            raise ConfigurationError(f"sound speed must lie in (0, 1], got {self.k!r}")
        if not self.mass > 0:
            raise ConfigurationError(f"mass must be positive, got {self.mass!r}")

    @property
    def alpha(self) -> float:
        """Invariant exponent 2k^2/(1-k^2); the algebraic form degenerates at k=1."""
        if self.k == 1.0:
            raise ConfigurationError("steady-state algebra is degenerate at k = 1")
        return 2.0 * self.k**2 / (1.0 - self.k**2)


@dataclass(frozen=True)
class EulerState:
    rho: float
    v: float

    def __post_init__(self):
        if not (np.isfinite(self.rho) and self.rho > 0):
            raise UnphysicalStateError(f"density must be positive, got {self.rho!r}")
        if not (np.isfinite(self.v) and abs(self.v) < 1.0):
            raise UnphysicalStateError(f"|velocity| must be below 1, got {self.v!r}")


@dataclass(frozen=True)
class EulerConserved:
    u0: float
    u1: float

    def __post_init__(self):
        if not (np.isfinite(self.u0) and self.u0 > 0):
            raise UnphysicalStateError(f"U0 must be positive, got {self.u0!r}")


# -- conversions (array kernels plus typed wrappers) ----------------------------


def conserved_from_primitive(rho, v, k):
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    gamma2 = 1.0 / (1.0 - v * v)
    return (1.0 + k * k * v * v) * gamma2 * rho, (1.0 + k * k) * gamma2 * rho * v


def primitive_from_conserved(u0, u1, k):
    """Invert the conserved map; raises UnphysicalStateError naming the first bad cell."""
    u0 = np.asarray(u0, dtype=float)
    u1 = np.asarray(u1, dtype=float)
    if np.any(u0 <= 0):
        cell = int(np.argmax(u0 <= 0))
        raise UnphysicalStateError(f"nonpositive U0 in cell {cell}")
    s = 1.0 + k * k
    w = u1 / u0
    disc = s * s - 4.0 * k * k * w * w
    if np.any(disc < 0):
        cell = int(np.argmax(disc < 0))
        raise UnphysicalStateError(f"negative discriminant in cell {cell}")
    small = np.abs(w) < _SMALL_W
    w_safe = np.where(small, 1.0, w)
    v_closed = (s - np.sqrt(disc)) / (2.0 * k * k * w_safe)
    v_series = (w / s) * (1.0 + k * k * w * w / (s * s))
    v = np.where(small, v_series, v_closed)
    if np.any(np.abs(v) >= 1.0):
        cell = int(np.argmax(np.abs(v) >= 1.0))
        raise UnphysicalStateError(f"recovered |v| >= 1 in cell {cell}")
    rho = u0 * (1.0 - v * v) / (1.0 + k * k * v * v)
    return rho, v


def to_conserved(state: EulerState, params: EulerParams) -> EulerConserved:
    u0, u1 = conserved_from_primitive(state.rho, state.v, params.k)
    return EulerConserved(float(u0), float(u1))


def to_primitive(conserved: EulerConserved, params: EulerParams) -> EulerState:
    rho, v = primitive_from_conserved(conserved.u0, conserved.u1, params.k)
    return EulerState(float(rho), float(v))


# -- flux, source, wave speeds ---------------------------------------------------


def flat_flux(rho, v, k):
    """F(U) of the balance-law form, before the metric factor."""
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    gamma2 = 1.0 / (1.0 - v * v)
    return (1.0 + k * k) * gamma2 * rho * v, (v * v + k * k) * gamma2 * rho


def euler_flux(state: EulerState, params: EulerParams, r: float) -> tuple[float, float]:
    f0, f1 = flat_flux(state.rho, state.v, params.k)
    m = metric(r, params.mass)
    return float(m * f0), float(m * f1)


def source_terms(rho, v, r, k, mass):
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.asarray(r, dtype=float)
    gamma2 = 1.0 / (1.0 - v * v)
    s0 = -(2.0 / r) * metric(r, mass) * (1.0 + k * k) * gamma2 * rho * v
    s1 = (
        ((-2.0 * r + 5.0 * mass) / r**2) * (v * v + k * k) * gamma2 * rho
        - (mass / r**2) * (1.0 + k * k * v * v) * gamma2 * rho
        + 2.0 * k * k * rho * (r - 2.0 * mass) / r**2
    )
    return s0, s1


def euler_source(state: EulerState, params: EulerParams, r: float) -> tuple[float, float]:
    s0, s1 = source_terms(state.rho, state.v, r, params.k, params.mass)
    return float(s0), float(s1)


def eigenvalues(state: EulerState, params: EulerParams, r: float) -> tuple[float, float]:
    """Characteristic speeds (1-2M/r)(v -+ k)/(1 -+ kv), relativistic velocity addition."""
    m = metric(r, params.mass)
    k, v = params.k, state.v
    return float(m * (v - k) / (1.0 - k * v)), float(m * (v + k) / (1.0 + k * v))


def wavespeeds(v, r, k, mass):
    m = metric(r, mass)
    return m * (v - k) / (1.0 - k * v), m * (v + k) / (1.0 + k * v)


# -- steady branches ---------------------------------------------------------------


def _g_of_speed(x, alpha):
    """(1-x^2) x^alpha for x = |v|; increasing below the sonic value, decreasing above."""
    return (1.0 - x * x) * np.power(x, alpha)


def invariants(rho, v, r, k, mass):
    """The two steady invariants: signed velocity invariant and mass-flux invariant."""
    alpha = 2.0 * k * k / (1.0 - k * k)
    rho = np.asarray(rho, dtype=float)
    v = np.asarray(v, dtype=float)
    r = np.asarray(r, dtype=float)
    phi = (
        np.sign(v)
        * (1.0 - v * v)
        * np.power(np.abs(v), alpha)
        * np.power(r, 2.0 * alpha)
        / metric(r, mass)
    )
    psi = r * (r - 2.0 * mass) * rho * v / (1.0 - v * v)
    return phi, psi


def sonic_radius(params: EulerParams) -> float:
    """Only radius where a steady branch can cross |v| = k smoothly: M(1+3k^2)/(2k^2)."""
    return params.mass * (1.0 + 3.0 * params.k**2) / (2.0 * params.k**2)


def critical_invariant(state: EulerState, params: EulerParams, r: float) -> float:
    """Zero exactly on the branch passing through the sonic point; constant on any branch."""
    if state.v == 0.0:
        raise DomainError("the critical invariant needs v != 0")
    alpha = params.alpha
    k, mass = params.k, params.mass
    lhs = (
        (1.0 - state.v**2)
        / metric(r, mass)
        * (r * r * abs(state.v)) ** alpha
    )
    rhs = (1.0 + 3.0 * k * k) * k**alpha * ((1.0 + 3.0 * k * k) * mass / (2.0 * k * k)) ** (
        2.0 * alpha
    )
    return float(lhs - rhs)


def solve_branch_speed(c: float, k: float, supersonic: bool) -> float:
    """Solve (1-x^2) x^alpha = c for x on the requested side of the sonic value k."""
    alpha = 2.0 * k * k / (1.0 - k * k)
    g_peak = _g_of_speed(k, alpha)
    if c > g_peak * (1.0 + 1e-14) or c <= 0.0:
        raise DomainError("no steady state on this side: sonic point reached")
    c = min(c, g_peak)

    def h(ln_x):
        return _g_of_speed(math.exp(ln_x), alpha) - c

    if supersonic:
        lo, hi = math.log(k), math.log(1.0 - 1e-15)
    else:
        lo, hi = math.log(1e-300) if alpha > 0 else -690.0, math.log(k)
        # shrink the huge bracket first for the root finder's benefit
        while h(lo + 1.0) < 0.0 and lo + 1.0 < hi:
            lo += 1.0
    if h(lo) * h(hi) > 0:
        # peak equality within roundoff
        return k
    return math.exp(brentq(h, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200))


class SteadyEuler:
    """Smooth steady branch through an anchor (r0, rho0, v0); sign(v) and
    sign(|v|-k) are fixed along it, and it ends wherever |v| would cross k."""

    def __init__(self, params: EulerParams, r0: float, rho0: float, v0: float):
        if not r0 > 2.0 * params.mass:
            raise DomainError(f"anchor radius {r0!r} is not outside the horizon")
        state = EulerState(rho0, v0)  # validates
        if v0 == 0.0:
            raise ConfigurationError("steady anchors need v != 0")
        if abs(v0) == params.k:
            raise ConfigurationError("anchor exactly at the sonic speed is a boundary case")
        self.params = params
        self.r0 = r0
        self.anchor = state
        phi, psi = invariants(rho0, v0, r0, params.k, params.mass)
        self.phi = float(phi)
        self.psi = float(psi)
        self.sign = 1.0 if v0 > 0 else -1.0
        self.supersonic = abs(v0) > params.k

    def _c_of_r(self, r: float) -> float:
        alpha = self.params.alpha
        return abs(self.phi) * metric(r, self.params.mass) / r ** (2.0 * alpha)

    def extend(self, r: float) -> EulerState:
        """State on the branch at radius r; DomainError (with the sonic radius
        bracketed) once the branch cannot reach r."""
        p = self.params
        if not r > 2.0 * p.mass:
            raise DomainError(f"radius {r!r} is not outside the horizon")
        alpha = p.alpha
        g_peak = _g_of_speed(p.k, alpha)
        c = self._c_of_r(r)
        if c > g_peak * (1.0 + 1e-14):
            raise DomainError(
                f"steady branch from r0={self.r0} hits a sonic point before r={r} "
                f"(near r={self._sonic_boundary(r):.6g})"
            )
        x = solve_branch_speed(c, p.k, self.supersonic)
        v = self.sign * x
        rho = self.psi * (1.0 - v * v) / (r * (r - 2.0 * p.mass) * v)
        return EulerState(rho, v)

    def _sonic_boundary(self, r_fail: float) -> float:
        p = self.params
        g_peak = _g_of_speed(p.k, p.alpha)

        def gap(r):
            return self._c_of_r(r) - g_peak

        lo, hi = sorted((self.r0, r_fail))
        try:
            return brentq(gap, lo, hi, xtol=1e-10)
        except ValueError:
            return r_fail

    def __call__(self, r):
        if np.ndim(r) == 0:
            return self.extend(float(r))
        return [self.extend(float(ri)) for ri in np.asarray(r, dtype=float)]


def steady_extend(branch: SteadyEuler, r: float) -> EulerState:
    return branch.extend(r)


@dataclass(frozen=True)
class SteadyShockEuler:
    """Two steady branches joined by a standing shock at r0."""

    left: SteadyEuler
    right: SteadyEuler
    r0: float

    @classmethod
    def from_left_anchor(
        cls, params: EulerParams, r0: float, rho_left: float, v_left: float
    ) -> "SteadyShockEuler":
        left = SteadyEuler(params, r0, rho_left, v_left)
        right_state = shock_junction(EulerState(rho_left, v_left), params)
        right = SteadyEuler(params, r0, right_state.rho, right_state.v)
        return cls(left=left, right=right, r0=r0)

    def state(self, r: float) -> EulerState:
        return self.left.extend(r) if r < self.r0 else self.right.extend(r)


def shock_junction(left: EulerState, params: EulerParams) -> EulerState:
    """Right state of a zero-speed shock: v_R = k^2/v_L with the matching density."""
    k = params.k
    v_l = left.v
    admissible = (k < v_l < 1.0) or (-k < v_l < -k * k)
    if not admissible:
        raise InadmissibleShockError(
            f"v_L={v_l!r} outside the standing-shock window (-k,-k^2) U (k,1) for k={k}"
        )
    v_r = k * k / v_l
    rho_r = (v_l * v_l - k**4) / (k * k * (1.0 - v_l * v_l)) * left.rho
    return EulerState(rho_r, v_r)
