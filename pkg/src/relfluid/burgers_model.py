"""Relativistic Burgers flow outside a Schwarzschild black hole.

Steady-state families v(r) = ±sqrt(1 - K^2(1 - 2M/r)), standing shocks, the
z diagnostic variable, and the flat Riemann solver used at cell interfaces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ConfigurationError, DomainError

# roundoff indulgence on the light-speed bound |v| <= 1
LIGHTSPEED_TOL = 1e-12


def metric(r, mass):
    return 1.0 - 2.0 * mass / np.asarray(r, dtype=float)


@dataclass(frozen=True)
class SteadyBurgers:
    """One member of the two-parameter steady family, sign in {+1,-1}, K >= 0.

    For K <= 1 the branch covers all r > 2M; for K > 1 it dies at the vanishing
    radius where v reaches 0.
    """

    sign: int
    K: float
    mass: float

    def __post_init__(self):
        if self.sign not in (-1, 1):
            raise ConfigurationError(f"sign must be +1 or -1, got {self.sign!r}")
        if not (np.isfinite(self.K) and self.K >= 0):
            raise ConfigurationError(f"K must be a nonnegative number, got {self.K!r}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ConfigurationError(f"mass must be positive, got {self.mass!r}")

    @cached_property
    def r_vanish(self) -> float | None:
        return vanishing_radius(self)

    def __call__(self, r):
        return steady_eval(self, r)


def steady_eval(branch: SteadyBurgers, r):
    """Velocity of a steady branch at radius r (scalar or array)."""
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= 2.0 * branch.mass):
        raise DomainError(f"radius {r!r} is not outside the horizon r=2M")
    radicand = 1.0 - branch.K**2 * metric(r_arr, branch.mass)
    if np.any(radicand < 0.0):
        raise DomainError(
            f"radius {r!r} lies beyond the vanishing point of the K={branch.K} branch"
        )
    v = branch.sign * np.sqrt(radicand)
    return float(v) if np.isscalar(r) or r_arr.ndim == 0 else v


def vanishing_radius(branch: SteadyBurgers) -> float | None:
    """Radius where a K>1 branch reaches v=0; None for K <= 1."""
    if branch.K <= 1.0:
        return None
    return 2.0 * branch.mass * branch.K**2 / (branch.K**2 - 1.0)


def steady_from_point(r0: float, v0: float, mass: float) -> SteadyBurgers:
    """The unique steady branch through (r0, v0); the + branch when v0 = 0."""
    if not r0 > 2.0 * mass:
        raise DomainError(f"anchor radius {r0!r} is not outside the horizon")
    if abs(v0) > 1.0 + LIGHTSPEED_TOL:
        raise DomainError(f"anchor velocity {v0!r} exceeds the light speed")
    v0 = min(1.0, max(-1.0, v0))
    K = math.sqrt(max(0.0, (1.0 - v0 * v0) / metric(r0, mass)))
    sign = -1 if v0 < 0 else 1
    return SteadyBurgers(sign=sign, K=K, mass=mass)


@dataclass(frozen=True)
class SteadyShockBurgers:
    """Standing shock: the +K branch inside r0 joined to the -K branch outside.

    The jump at r0 has zero Rankine-Hugoniot speed because the branch values are
    exact negatives of each other there.
    """

    K: float
    r0: float
    mass: float

    def __post_init__(self):
        if not self.r0 > 2.0 * self.mass:
            raise ConfigurationError(f"shock radius {self.r0!r} is not outside the horizon")
        left = self.left  # validates K
        v_left = steady_eval(left, self.r0)
        if not v_left > 0.0:
            raise ConfigurationError("left state does not exceed the right state at r0")

    @cached_property
    def left(self) -> SteadyBurgers:
        return SteadyBurgers(sign=1, K=self.K, mass=self.mass)

    @cached_property
    def right(self) -> SteadyBurgers:
        return SteadyBurgers(sign=-1, K=self.K, mass=self.mass)

    def __call__(self, r):
        r_arr = np.asarray(r, dtype=float)
        v = np.where(r_arr < self.r0, 1.0, -1.0) * np.abs(steady_eval(self.left, r_arr))
        return float(v) if np.isscalar(r) or r_arr.ndim == 0 else v


def z_of_v(v, r, mass):
    """Auxiliary variable sgn(v)·sqrt((v^2-1)/(1-2M/r)+1); constant on K<=1 branches."""
    v_arr = np.asarray(v, dtype=float)
    radicand = (v_arr**2 - 1.0) / metric(r, mass) + 1.0
    if np.any(radicand < -1e-14):
        raise DomainError("z is undefined here (the state lies on a K>1 branch)")
    z = np.sign(v_arr) * np.sqrt(np.maximum(radicand, 0.0))
    return float(z) if np.isscalar(v) or v_arr.ndim == 0 else z


def v_of_z(z, r, mass):
    """Inverse of z_of_v: the K = sqrt(1-z^2) branch value with sign of z."""
    z_arr = np.asarray(z, dtype=float)
    if np.any(np.abs(z_arr) > 1.0):
        raise DomainError("|z| must not exceed 1")
    v = np.sign(z_arr) * np.sqrt(1.0 - (1.0 - z_arr**2) * metric(r, mass))
    return float(v) if np.isscalar(z) or z_arr.ndim == 0 else v


def flat_riemann(v_left: float, v_right: float, xi: float) -> float:
    """Self-similar solution of the flat Burgers Riemann problem at slope xi.

    Shock for v_left > v_right (speed (v_left+v_right)/2, ties sample the left
    state), rarefaction fan for v_left < v_right.
    """
    if v_left > v_right:
        s = 0.5 * (v_left + v_right)
        return v_left if xi <= s else v_right
    if v_left < v_right:
        if xi <= v_left:
            return v_left
        if xi >= v_right:
            return v_right
        return xi
    return v_left


def physical_flux(v, r, mass):
    """Exact flux (1-2M/r)(v^2-1)/2 of the nonconservative form."""
    return metric(r, mass) * (np.asarray(v, dtype=float) ** 2 - 1.0) / 2.0


def geometric_source(v, r, mass):
    """Curvature source (2M/r^2)(v^2-1)."""
    r_arr = np.asarray(r, dtype=float)
    return (2.0 * mass / r_arr**2) * (np.asarray(v, dtype=float) ** 2 - 1.0)
