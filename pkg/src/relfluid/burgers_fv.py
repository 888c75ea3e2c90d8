"""First- and second-order well-balanced finite volume schemes for relativistic Burgers.

Interface fluxes sample the flat Riemann solution at the interface; the curved
geometry enters through the metric factor at the interface radius and the
midpoint source. The horizon-side ghost state is the light-speed inflow value
+1, which is inert whenever r_min = 2M because the horizon interface carries a
vanishing metric factor. The outer boundary defaults to zero-gradient outflow;
the literal -1 ghost is available as right_ghost="lightspeed".
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .burgers_model import metric
from .errors import ConfigurationError, SchemeError
from .grid import FieldSnapshot

CLAMP_TOL = 1e-12


@dataclass(frozen=True)
class BurgersFvConfig:
    order: int = 1
    safety: float = 0.5
    left_ghost: str = "lightspeed"  # +1 inflow state
    # "steady" continues the boundary cell's branch (transparent for inflow too),
    # "outflow" copies the cell, "lightspeed" is the literal -1 state
    right_ghost: str = "steady"

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ConfigurationError(f"order must be 1 or 2, got {self.order!r}")
        if not (0.0 < self.safety <= 0.5):
            raise ConfigurationError(f"safety must lie in (0, 1/2], got {self.safety!r}")
        if self.left_ghost not in ("lightspeed", "outflow", "steady"):
            raise ConfigurationError(f"unknown left_ghost {self.left_ghost!r}")
        if self.right_ghost not in ("lightspeed", "outflow", "steady"):
            raise ConfigurationError(f"unknown right_ghost {self.right_ghost!r}")


def _riemann_at_zero(v_left: np.ndarray, v_right: np.ndarray) -> np.ndarray:
    """Vectorized flat Riemann solution sampled at xi = 0 (ties take the left state)."""
    shock = v_left > v_right
    s = 0.5 * (v_left + v_right)
    q_shock = np.where(s >= 0.0, v_left, v_right)
    q_fan = np.where(v_left >= 0.0, v_left, np.where(v_right <= 0.0, v_right, 0.0))
    return np.where(shock, q_shock, q_fan)


# shocks slower than this sample both sides; keeps a standing shock's neighbors
# coupled to their own state (one-sided sampling there is anti-restoring against
# the geometric source and lets the shock ratchet sideways cell by cell)
STANDING_TIE = 1e-7


def interface_flux(r, v_left, v_right, mass):
    """Godunov flux (1-2M/r)(q^2-1)/2 with q the flat Riemann value at the interface."""
    v_l = np.asarray(v_left, dtype=float)
    v_r = np.asarray(v_right, dtype=float)
    q = _riemann_at_zero(v_l, v_r)
    qsq = q * q
    standing = (v_l > v_r) & (np.abs(v_l + v_r) <= 2.0 * STANDING_TIE)
    qsq = np.where(standing, 0.5 * (v_l * v_l + v_r * v_r), qsq)
    out = metric(r, mass) * (qsq - 1.0) / 2.0
    return float(out) if np.ndim(v_left) == 0 and np.ndim(r) == 0 else out


def _steady_continuation(v_cell: float, r_cell: float, r_ghost: float, mass: float) -> float:
    sign = -1.0 if v_cell < 0.0 else 1.0
    if r_ghost <= 2.0 * mass:
        return sign  # every branch reaches the light speed at the horizon
    k2 = (1.0 - v_cell * v_cell) / metric(r_cell, mass)
    radicand = 1.0 - k2 * metric(r_ghost, mass)
    if radicand < 0.0:  # the cell's branch dies before the ghost center
        return v_cell
    return sign * np.sqrt(radicand)


def _ghost_values(v: np.ndarray, grid, config: BurgersFvConfig) -> tuple[float, float]:
    r = grid.centers
    if config.left_ghost == "lightspeed":
        left = 1.0
    elif config.left_ghost == "steady":
        left = _steady_continuation(v[0], r[0], r[0] - grid.dr, grid.mass)
    else:
        left = v[0]
    if config.right_ghost == "lightspeed":
        right = -1.0
    elif config.right_ghost == "steady":
        right = _steady_continuation(v[-1], r[-1], r[-1] + grid.dr, grid.mass)
    else:
        right = v[-1]
    return left, right


def _mc(a, b, c):
    """Monotonized-central combination: signed min(2|a|, 2|b|, |c|), 0 on sign clash."""
    same = (np.sign(a) == np.sign(b)) & (np.sign(a) == np.sign(c)) & (np.sign(a) != 0)
    mag = np.minimum(np.minimum(2.0 * np.abs(a), 2.0 * np.abs(b)), np.abs(c))
    return np.where(same, np.sign(c) * mag, 0.0)


def limited_slope(v_minus, v_center, v_plus):
    """Monotonized-central limited difference over one cell."""
    a = np.asarray(v_center, dtype=float) - np.asarray(v_minus, dtype=float)
    b = np.asarray(v_plus, dtype=float) - np.asarray(v_center, dtype=float)
    c = 0.5 * (np.asarray(v_plus, dtype=float) - np.asarray(v_minus, dtype=float))
    out = _mc(a, b, c)
    return float(out) if np.ndim(v_center) == 0 else out


def _clamp(v: np.ndarray) -> np.ndarray:
    over = np.max(np.abs(v)) - 1.0
    if over > CLAMP_TOL:
        cell = int(np.argmax(np.abs(v)))
        raise SchemeError(f"velocity left [-1,1] by {over:.3e} in cell {cell}", cell=cell)
    return np.clip(v, -1.0, 1.0)


def fv_step_order1(state: FieldSnapshot, dt: float, config: BurgersFvConfig | None = None) -> FieldSnapshot:
    """First-order step. Riemann arguments are the cell values carried to the
    interface radius along their own steady branches (the balance the scheme's
    well-balancedness rests on; with raw cell values the near-horizon cell of an
    outflow branch is anti-restoring and blows up by t ~ 15)."""
    grid = state.grid
    config = config or BurgersFvConfig(order=1)
    v = state.values
    r = grid.centers
    x = grid.interfaces
    gl, gr = _ghost_values(v, grid, config)
    va = np.concatenate(([gl], v, [gr]))
    ra = np.concatenate(([r[0] - grid.dr], r, [r[-1] + grid.dr]))
    left_states = _transport(va[:-1], ra[:-1], x, grid.mass)
    right_states = _transport(va[1:], ra[1:], x, grid.mass)
    flux = interface_flux(x, left_states, right_states, grid.mass)
    source = (2.0 * grid.mass / r**2) * (v * v - 1.0)
    v_new = v - (dt / grid.dr) * (flux[1:] - flux[:-1]) + dt * source
    return state.with_values(_clamp(v_new), t=state.t + dt)


def _transport(v_anchor, r_anchor, r_target, mass):
    """Value at r_target of the steady branch through (r_anchor, v_anchor).

    Falls back to the anchor value where the branch is undefined (vanished
    branch, or an anchor at/inside the horizon such as a light-speed ghost).
    """
    v_anchor = np.asarray(v_anchor, dtype=float)
    r_anchor = np.asarray(r_anchor, dtype=float)
    inside = r_anchor <= 2.0 * mass
    m_anchor = np.where(inside, 1.0, metric(r_anchor, mass))
    k2 = (1.0 - v_anchor**2) / m_anchor
    radicand = 1.0 - k2 * metric(r_target, mass)
    ok = ~inside & (radicand >= 0.0)
    sign = np.where(v_anchor < 0.0, -1.0, 1.0)
    return np.where(ok, sign * np.sqrt(np.maximum(radicand, 0.0)), v_anchor)


def fv_step_order2(state: FieldSnapshot, dt: float, config: BurgersFvConfig | None = None) -> FieldSnapshot:
    """Second-order step: steady-branch interface values plus a limited slope of
    the deviations from local equilibrium (so every steady branch, and every
    standing shock on an interface, reconstructs exactly)."""
    grid = state.grid
    config = config or BurgersFvConfig(order=2)
    v = state.values
    r = grid.centers
    x = grid.interfaces
    mass = grid.mass
    gl, gr = _ghost_values(v, grid, config)
    va = np.concatenate(([gl], v, [gr]))
    ra = np.concatenate(([r[0] - grid.dr], r, [r[-1] + grid.dr]))

    # neighbor values transported to this cell's center along their own branches;
    # differences then measure departure from local equilibrium only
    from_left = _transport(va[:-2], ra[:-2], r, mass)
    from_right = _transport(va[2:], ra[2:], r, mass)
    slope = _mc(v - from_left, from_right - v, 0.5 * (from_right - from_left))

    base_left = _transport(v, r, x[:-1], mass)
    base_right = _transport(v, r, x[1:], mass)
    # half-step predictor: only the non-equilibrium gradient advances the state
    shift = -0.5 * dt * metric(r, mass) * v * slope / grid.dr
    edge_left = np.clip(base_left - 0.5 * slope + shift, -1.0, 1.0)
    edge_right = np.clip(base_right + 0.5 * slope + shift, -1.0, 1.0)

    ghost_left_edge = float(_transport(va[0], ra[0], x[0], mass))
    ghost_right_edge = float(_transport(va[-1], ra[-1], x[-1], mass))
    left_states = np.concatenate(([ghost_left_edge], edge_right))
    right_states = np.concatenate((edge_left, [ghost_right_edge]))

    flux = interface_flux(x, left_states, right_states, mass)
    # two-point Gauss source on the cell's own branch: near the horizon the
    # midpoint rule's O(dr^2) defect is amplified to O(dr) downstream (outgoing
    # perturbations scale with the metric factor), which would cap the scheme
    # at first-order steady drift
    half = 0.5 * grid.dr / np.sqrt(3.0)
    source = np.zeros_like(v)
    for node in (r - half, r + half):
        v_node = _transport(v, r, node, mass)
        source += 0.5 * (2.0 * mass / node**2) * (v_node * v_node - 1.0)
    v_new = v - (dt / grid.dr) * (flux[1:] - flux[:-1]) + dt * source
    return state.with_values(_clamp(v_new), t=state.t + dt)


def fv_step(state: FieldSnapshot, dt: float, config: BurgersFvConfig) -> FieldSnapshot:
    if config.order == 1:
        return fv_step_order1(state, dt, config)
    return fv_step_order2(state, dt, config)


def max_wavespeed_burgers(state: FieldSnapshot) -> float:
    """Bound max_j (1-2M/r_j)|V_j| on the characteristic speed (always <= 1)."""
    grid = state.grid
    return float(np.max(metric(grid.centers, grid.mass) * np.abs(state.values)))
