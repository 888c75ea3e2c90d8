"""Exact generalized Riemann problems for the relativistic Burgers model.

Initial data are two steady branches separated by a jump at r0. The solution is
a single shock (Rankine-Hugoniot trajectory) or a single curved rarefaction
whose characteristics run along steady branches. Characteristic travel times
come from a closed-form potential R with dR/dr = 1/((1-2M/r) v(r)), derived per
K-regime and cross-checked against quadrature in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import quad, solve_ivp
from scipy.optimize import brentq

from .burgers_model import SteadyBurgers, metric, steady_eval, steady_from_point
from .errors import DomainError, SolverError, TruncatedTrajectoryError

# closed forms for K within this distance of 1 lose too many digits to cancellation
_NEAR_CRITICAL = 1e-4


def _potential_unsigned(r: float, K: float, mass: float) -> float:
    """Antiderivative of 1/((1-2M/r) W(r)) along the +|v| branch, W = sqrt(1-K^2(1-2M/r)).

    Log arguments are rewritten with W^2 identities so no catastrophic
    cancellation occurs near the horizon or at small K.
    """
    M = mass
    f = 1.0 - 2.0 * M / r
    W = math.sqrt(max(0.0, 1.0 - K * K * f))
    if K == 0.0:
        return r + 2.0 * M * math.log(r - 2.0 * M)
    if abs(K - 1.0) <= _NEAR_CRITICAL and K != 1.0:
        raise _UseQuadrature()
    if K == 1.0:
        u = math.sqrt(r / (2.0 * M))
        return 4.0 * M * (u**3 / 3.0 + u + 0.5 * math.log((u - 1.0) / (u + 1.0)))
    if K < 1.0:
        a2 = 1.0 - K * K
        a = math.sqrt(a2)
        log_a = math.log(2.0 * K * K * M / r) - 2.0 * math.log(W + a)
        log_1 = math.log(K * K * f) - 2.0 * math.log(1.0 + W)
        return r * W / a2 - (M * (2.0 - 3.0 * K * K) / a**3) * log_a + 2.0 * M * log_1
    b2 = K * K - 1.0
    b = math.sqrt(b2)
    log_1 = math.log(K * K * f) - 2.0 * math.log(1.0 + W)
    return -r * W / b2 - (2.0 * M * (3.0 * K * K - 2.0) / b**3) * math.atan2(W, b) + 2.0 * M * log_1


class _UseQuadrature(Exception):
    pass


def _check_in_domain(branch: SteadyBurgers, r: float) -> None:
    if r <= 2.0 * branch.mass:
        raise DomainError(f"radius {r!r} is not outside the horizon")
    rv = branch.r_vanish
    if rv is not None and r >= rv:
        raise DomainError(f"radius {r!r} is beyond the vanishing point {rv!r}")


def characteristic_time(branch: SteadyBurgers, r: float) -> float:
    """Time-like potential R^v(r): R(r(t)) - R(r(0)) = t along a characteristic."""
    _check_in_domain(branch, r)
    v = steady_eval(branch, r)
    if v == 0.0:
        raise DomainError("the characteristic stalls where v = 0")
    try:
        return branch.sign * _potential_unsigned(r, branch.K, branch.mass)
    except _UseQuadrature:
        # anchor the antiderivative at a fixed in-branch reference radius
        return travel_time(branch, 3.0 * branch.mass, r)


def _travel_quad(branch: SteadyBurgers, r_from: float, r_to: float) -> float:
    def integrand(r):
        f = metric(r, branch.mass)
        w = math.sqrt(max(1e-300, 1.0 - branch.K**2 * f))
        return 1.0 / (f * branch.sign * w)

    val, _ = quad(integrand, r_from, r_to, epsabs=1e-13, epsrel=1e-12, limit=200)
    return val


def travel_time(branch: SteadyBurgers, r_from: float, r_to: float) -> float:
    """Flow time along the branch from r_from to r_to (positive along the motion)."""
    _check_in_domain(branch, r_from)
    rv = branch.r_vanish
    if r_to <= 2.0 * branch.mass or (rv is not None and r_to > rv):
        raise DomainError(f"target radius {r_to!r} is outside the branch domain")
    try:
        unsigned = _potential_unsigned(r_to, branch.K, branch.mass) - _potential_unsigned(
            r_from, branch.K, branch.mass
        )
        return branch.sign * unsigned
    except _UseQuadrature:
        return _travel_quad(branch, r_from, r_to)


@dataclass(frozen=True)
class GrpData:
    """Two steady branches meeting at the initial discontinuity radius r0."""

    left: SteadyBurgers
    right: SteadyBurgers
    r0: float

    def __post_init__(self):
        _check_in_domain(self.left, self.r0)
        _check_in_domain(self.right, self.r0)

    @cached_property
    def v_left0(self) -> float:
        return steady_eval(self.left, self.r0)

    @cached_property
    def v_right0(self) -> float:
        return steady_eval(self.right, self.r0)

    @property
    def mass(self) -> float:
        return self.left.mass

    def initial(self, r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        out = np.empty_like(r_arr)
        left_mask = r_arr <= self.r0
        if left_mask.any():
            out[left_mask] = steady_eval(self.left, r_arr[left_mask])
        if (~left_mask).any():
            out[~left_mask] = steady_eval(self.right, r_arr[~left_mask])
        return float(out[0]) if np.ndim(r) == 0 else out


def _safe_eval(branch: SteadyBurgers, r):
    radicand = 1.0 - branch.K**2 * metric(r, branch.mass)
    return branch.sign * np.sqrt(np.maximum(radicand, 0.0))


def classify(data: GrpData) -> str:
    """'shock' if v_L(r0) > v_R(r0), 'rarefaction' if <, 'trivial' if equal."""
    if data.v_left0 > data.v_right0:
        return "shock"
    if data.v_left0 < data.v_right0:
        return "rarefaction"
    return "trivial"


def _rh_speed(data: GrpData, r: float) -> float:
    vl = _safe_eval(data.left, r)
    vr = _safe_eval(data.right, r)
    return metric(r, data.mass) * 0.5 * (vl + vr)


def shock_trajectory(data: GrpData, t) -> float | np.ndarray:
    """Shock radius r_s(t) from the Rankine-Hugoniot ODE; convenience wrapper."""
    sol = solve_grp(data, t_max=float(np.max(t)) if np.ndim(t) else float(t))
    if np.ndim(t):
        return np.array([sol.shock_position(ti) for ti in np.asarray(t, dtype=float)])
    return sol.shock_position(float(t))


class GrpSolution:
    """Complete spacetime solution of one generalized Riemann problem."""

    def __init__(self, data: GrpData, t_max: float = 1.0):
        self.data = data
        self.kind = classify(data)
        self._t_solved = 0.0
        self._dense = None
        self._exit_time = None
        self._edge_cache: dict[float, tuple[float, float]] = {}
        if self.kind == "shock":
            self._solve_shock(max(t_max, 1e-12))

    # -- shock machinery ---------------------------------------------------

    def _solve_shock(self, t_max: float) -> None:
        data = self.data
        horizon = 2.0 * data.mass

        def rhs(t, y):
            return [_rh_speed(data, y[0])]

        def hit_horizon(t, y):
            return y[0] - horizon * (1.0 + 1e-12)

        hit_horizon.terminal = True
        hit_horizon.direction = -1.0
        events = [hit_horizon]
        caps = [b.r_vanish for b in (data.left, data.right) if b.r_vanish is not None]
        if caps:
            r_cap = min(caps) * (1.0 - 1e-12)

            def hit_vanish(t, y, r_cap=r_cap):
                return y[0] - r_cap

            hit_vanish.terminal = True
            hit_vanish.direction = 1.0
            events.append(hit_vanish)

        res = solve_ivp(
            rhs,
            (0.0, t_max),
            [data.r0],
            method="RK45",
            rtol=1e-11,
            atol=1e-12,
            dense_output=True,
            events=events,
        )
        if not res.success:
            raise SolverError(f"shock trajectory integration failed: {res.message}")
        self._dense = res.sol
        self._t_solved = res.t[-1]
        if res.status == 1:  # an event fired
            self._exit_time = res.t[-1]

    def shock_position(self, t: float) -> float:
        if self.kind != "shock":
            raise SolverError("shock_position on a non-shock solution")
        if t < 0:
            raise DomainError("time must be nonnegative")
        if t == 0.0:
            return self.data.r0
        if self._exit_time is not None and t > self._exit_time * (1.0 + 1e-12):
            raise TruncatedTrajectoryError(
                "shock trajectory left its domain",
                exit_time=self._exit_time,
                exit_radius=float(self._dense(self._exit_time)[0]),
            )
        if t > self._t_solved:
            self._solve_shock(2.0 * t)
            return self.shock_position(t)
        return float(self._dense(t)[0])

    def shock_speed(self, t: float) -> float:
        return _rh_speed(self.data, self.shock_position(t))

    # -- rarefaction machinery ---------------------------------------------

    def _edge(self, branch: SteadyBurgers, t: float) -> float:
        """Solve travel_time(r0 -> r) = t for the edge characteristic radius."""
        data = self.data
        if t == 0.0:
            return data.r0
        moving_out = branch.sign > 0

        def residual(r):
            return travel_time(branch, data.r0, r) - t

        if moving_out:
            hi = data.r0 + max(data.mass, data.r0) * 1e-6
            cap = branch.r_vanish
            while residual(hi) < 0.0:
                nxt = data.r0 + 2.0 * (hi - data.r0)
                if cap is not None and nxt >= cap:
                    nxt = 0.5 * (hi + cap)
                    if cap - nxt < 1e-13 * cap:
                        raise TruncatedTrajectoryError(
                            "rarefaction edge reached the branch vanishing point",
                            exit_time=travel_time(branch, data.r0, cap * (1.0 - 1e-13)),
                            exit_radius=cap,
                        )
                hi = nxt
            lo = data.r0
        else:
            horizon = 2.0 * data.mass
            lo = data.r0 - (data.r0 - horizon) * 1e-6
            while residual(lo) < 0.0:
                lo = horizon + 0.5 * (lo - horizon)
            hi = data.r0
        return brentq(residual, lo, hi, xtol=1e-13, rtol=8.9e-16, maxiter=200)

    def rarefaction_edges(self, t: float) -> tuple[float, float]:
        if self.kind != "rarefaction":
            raise SolverError("rarefaction_edges on a non-rarefaction solution")
        if t < 0:
            raise DomainError("time must be nonnegative")
        if t in self._edge_cache:
            return self._edge_cache[t]
        r_l = self._edge(self.data.left, t)
        r_r = self._edge(self.data.right, t)
        if len(self._edge_cache) > 64:
            self._edge_cache.clear()
        self._edge_cache[t] = (r_l, r_r)
        return r_l, r_r

    def _fan_travel(self, K: float, r: float, sgn: float) -> float:
        branch = SteadyBurgers(sign=1 if sgn >= 0 else -1, K=K, mass=self.data.mass)
        return travel_time(branch, self.data.r0, r)

    def rarefaction_interior(self, t: float, r: float) -> float:
        """Fan value: the steady branch whose characteristic reaches (t, r) from r0."""
        if self.kind != "rarefaction":
            raise SolverError("rarefaction_interior on a non-rarefaction solution")
        if t <= 0:
            raise DomainError("the fan interior needs t > 0")
        data = self.data
        if r == data.r0:
            return 0.0
        sgn = 1.0 if r > data.r0 else -1.0
        m_r = metric(r, data.mass)
        k_sonic = 1.0 / math.sqrt(m_r)

        def residual(K):
            return self._fan_travel(K, r, sgn) - t

        k_cap = k_sonic * (1.0 - 1e-14)
        lo = min(data.left.K, data.right.K, k_cap)
        hi = min(max(data.left.K, data.right.K), k_cap)
        f_lo, f_hi = residual(lo), residual(hi)
        tries = 0
        # travel time is increasing in K: widen the bracket geometrically as needed
        while f_lo > 0.0 and tries < 200:  # even the slow end arrives too late
            tries += 1
            if lo == 0.0:
                break
            lo = lo * 0.5 if lo > 1e-14 else 0.0
            f_lo = residual(lo)
        while f_hi < 0.0 and tries < 200:  # even the fast end arrives too early
            tries += 1
            new_hi = 0.5 * (hi + k_cap)
            if k_cap - new_hi <= 1e-15 * k_cap:
                break
            hi = new_hi
            f_hi = residual(hi)
        if f_lo * f_hi > 0.0 or tries >= 200:
            raise SolverError(
                "no steady branch reaches this point of the fan",
                diagnostics={"t": t, "r": r, "bracket": (lo, hi), "residuals": (f_lo, f_hi)},
            )
        K = brentq(residual, lo, hi, xtol=1e-15, rtol=8.9e-16, maxiter=200)
        return sgn * math.sqrt(max(0.0, 1.0 - K * K * m_r))

    # -- assembly ------------------------------------------------------------

    def eval(self, t: float, r: float) -> float:
        if t < 0:
            raise DomainError("time must be nonnegative")
        data = self.data
        if t == 0.0 or self.kind == "trivial":
            return data.initial(r)
        if self.kind == "shock":
            r_s = self.shock_position(t)
            return steady_eval(data.left if r <= r_s else data.right, r)
        r_l, r_r = self.rarefaction_edges(t)
        if r <= r_l:
            return steady_eval(data.left, r)
        if r >= r_r:
            return steady_eval(data.right, r)
        return self.rarefaction_interior(t, r)


def solve_grp(data: GrpData, t_max: float = 1.0) -> GrpSolution:
    return GrpSolution(data, t_max=t_max)


def grp_eval(sol: GrpSolution, t: float, r: float) -> float:
    return sol.eval(t, r)


def rarefaction_edges(data: GrpData, t: float) -> tuple[float, float]:
    return GrpSolution(data, t_max=max(t, 1e-12)).rarefaction_edges(t)


def rarefaction_interior(data: GrpData, t: float, r: float) -> float:
    return GrpSolution(data, t_max=max(t, 1e-12)).rarefaction_interior(t, r)


def grp_from_states(r0: float, v_left: float, v_right: float, mass: float) -> GrpData:
    """GRP data whose branches pass through the given point values at r0."""
    return GrpData(
        left=steady_from_point(r0, v_left, mass),
        right=steady_from_point(r0, v_right, mass),
        r0=r0,
    )
