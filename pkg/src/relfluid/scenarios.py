"""Scenario catalog, initial-data recipes, asymptotic-state detection, and CSV output.

A Scenario fully specifies one experiment: model, scheme, grid, physical
parameters, an initial-data recipe with optional compact perturbation, a stop
rule, and the output cadence. The catalog covers steady preservation, moving
and standing shocks, perturbed equilibria, general-data late-time behavior,
and the Euler generalized Riemann problems.
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import burgers_fv, burgers_glimm, euler_fv
from .burgers_model import (
    SteadyBurgers,
    SteadyShockBurgers,
    metric,
    steady_eval,
)
from .errors import ConfigurationError, UsageError
from .euler_model import (
    EulerParams,
    EulerState,
    SteadyEuler,
    SteadyShockEuler,
    conserved_from_primitive,
    invariants,
    primitive_from_conserved,
)
from .grid import (
    CflPolicy,
    FieldSnapshot,
    StopAtTime,
    StopWhenSteady,
    l1_distance,
    make_grid,
    run,
)

BURGERS_SCHEMES = ("fv1", "fv2", "glimm")
EULER_SCHEMES = ("euler_fv",)


# -- scenario description --------------------------------------------------------


@dataclass(frozen=True)
class Perturbation:
    """Smooth compact bump a*exp(1 - 1/(1-((r-c)/w)^2)) on |r-c| < w.

    zero_mean swaps in the bump's radial derivative, whose integral vanishes.
    For Euler, amplitude applies to the density and amplitude_v to the velocity.
    """

    center: float
    width: float
    amplitude: float
    amplitude_v: float = 0.0
    zero_mean: bool = False

    def shape(self, r) -> np.ndarray:
        y = (np.asarray(r, dtype=float) - self.center) / self.width
        out = np.zeros_like(y)
        inside = np.abs(y) < 1.0
        yi = y[inside]
        bump = np.exp(1.0 - 1.0 / (1.0 - yi * yi))
        if self.zero_mean:
            bump = bump * (-2.0 * yi / self.width) / (1.0 - yi * yi) ** 2
        out[inside] = bump
        return out


@dataclass(frozen=True)
class Scenario:
    name: str
    model: str  # "burgers" | "euler"
    scheme: str  # "fv1" | "fv2" | "glimm" | "euler_fv"
    mass: float
    r_min: float
    r_max: float
    cells: int
    tmax: float
    output_dt: float
    initial: dict
    k: float | None = None
    perturbation: Perturbation | None = None
    stop_steady: bool = False
    seed: tuple[int, int, int] = (937, 997, 800)
    description: str = ""

    def __post_init__(self):
        if self.model not in ("burgers", "euler"):
            raise ConfigurationError(f"unknown model {self.model!r}")
        allowed = BURGERS_SCHEMES if self.model == "burgers" else EULER_SCHEMES
        if self.scheme not in allowed:
            raise ConfigurationError(
                f"scheme {self.scheme!r} is not compatible with model {self.model!r}"
            )
        if self.model == "euler" and self.k is None:
            raise ConfigurationError("euler scenarios need a sound speed k")
        if "kind" not in self.initial:
            raise ConfigurationError("initial recipe needs a 'kind'")
        kind = self.initial["kind"]
        allowed_kinds = {
            "burgers": ("steady", "steady_shock", "grp", "general"),
            "euler": ("steady", "steady_shock", "grp"),
        }[self.model]
        if kind not in allowed_kinds:
            raise ConfigurationError(f"initial kind {kind!r} invalid for {self.model}")
        if not (self.tmax >= 0 and self.output_dt > 0):
            raise ConfigurationError("tmax must be >= 0 and output_dt > 0")

    def grid(self, cells: int | None = None):
        return make_grid(self.mass, self.r_min, self.r_max, cells or self.cells)

    def params(self) -> EulerParams:
        return EulerParams(k=self.k, mass=self.mass)


# -- initial data ------------------------------------------------------------------


def _taper(x):
    """1 on x<=1, smooth cosine decay on (1,3), 0 beyond."""
    x = np.asarray(x, dtype=float)
    out = np.where(x <= 1.0, 1.0, 0.0)
    mid = (x > 1.0) & (x < 3.0)
    out = np.where(mid, 0.5 * (1.0 + np.cos(np.pi * (x - 1.0) / 2.0)), out)
    return out


def snap_to_interface(grid, radius: float) -> float:
    """Nearest interior cell interface; keeps standing shocks discretely exact."""
    i = int(round((radius - grid.r_min) / grid.dr))
    i = min(max(i, 1), grid.cells - 1)
    return grid.interfaces[i]


def build_initial(scenario: Scenario, grid=None, perturbed: bool = True) -> FieldSnapshot:
    """Sample the scenario's recipe at cell centers (plus optional perturbation)."""
    grid = grid or scenario.grid()
    recipe = scenario.initial
    r = grid.centers
    if scenario.model == "burgers":
        v = _burgers_profile(scenario, recipe, grid, r)
        if perturbed and scenario.perturbation is not None:
            v = v + scenario.perturbation.amplitude * scenario.perturbation.shape(r)
        if np.any(np.abs(v) > 1.0):
            raise ConfigurationError("initial data leave [-1, 1]; shrink the perturbation")
        return FieldSnapshot(grid, 0.0, v)

    rho, v = _euler_profile(scenario, recipe, grid, r)
    if perturbed and scenario.perturbation is not None:
        shape = scenario.perturbation.shape(r)
        rho = rho + scenario.perturbation.amplitude * shape
        v = v + scenario.perturbation.amplitude_v * shape
    if np.any(rho <= 0) or np.any(np.abs(v) >= 1.0):
        raise ConfigurationError("perturbed Euler data are inadmissible")
    u0, u1 = conserved_from_primitive(rho, v, scenario.k)
    return FieldSnapshot(grid, 0.0, np.stack((u0, u1)))


def _burgers_profile(scenario, recipe, grid, r):
    kind = recipe["kind"]
    mass = scenario.mass
    if kind == "steady":
        branch = SteadyBurgers(sign=int(recipe["sign"]), K=float(recipe["K"]), mass=mass)
        return steady_eval(branch, r)
    if kind == "steady_shock":
        shock = SteadyShockBurgers(
            K=float(recipe["K"]), r0=snap_to_interface(grid, float(recipe["r_jump"])), mass=mass
        )
        return shock(r)
    if kind == "grp":
        r_jump = snap_to_interface(grid, float(recipe["r_jump"]))
        left = SteadyBurgers(sign=int(recipe["sign_left"]), K=float(recipe["K_left"]), mass=mass)
        right = SteadyBurgers(
            sign=int(recipe["sign_right"]), K=float(recipe["K_right"]), mass=mass
        )
        v = np.where(r < r_jump, _clipped_eval(left, r, mass), _clipped_eval(right, r, mass))
        return v
    # general closures: prescribed horizon and far-field limits; the far part is
    # either a constant or the steady branch whose value AT INFINITY is v_infinity
    # (a finite r_max stands in for infinity only through that branch)
    v_h = float(recipe["v_horizon"])
    v_inf = float(recipe["v_infinity"])
    width = float(recipe.get("width", 0.25 * (grid.r_max - grid.r_min)))
    if recipe.get("far", "constant") == "branch":
        sgn = float(recipe.get("far_sign", -1 if v_inf < 0 else 1))
        far = sgn * np.sqrt(1.0 - (1.0 - v_inf**2) * metric(r, mass))
    else:
        far = np.full_like(r, v_inf)
    x = (r - grid.r_min) / width
    return far + (v_h - far) * _taper(x)


def _clipped_eval(branch, r, mass):
    radicand = 1.0 - branch.K**2 * metric(r, mass)
    return branch.sign * np.sqrt(np.maximum(radicand, 0.0))


def _euler_profile(scenario, recipe, grid, r):
    params = scenario.params()
    kind = recipe["kind"]
    if kind == "steady":
        branch = SteadyEuler(
            params, float(recipe["anchor_r"]), float(recipe["rho"]), float(recipe["v"])
        )
        states = [branch.extend(float(ri)) for ri in r]
    elif kind == "steady_shock":
        r_jump = snap_to_interface(grid, float(recipe["r_jump"]))
        shock = SteadyShockEuler.from_left_anchor(
            params, r_jump, float(recipe["rho_left"]), float(recipe["v_left"])
        )
        states = [shock.state(float(ri)) for ri in r]
    elif kind == "grp":
        r_jump = snap_to_interface(grid, float(recipe["r_jump"]))
        left = SteadyEuler(params, r_jump, float(recipe["rho_left"]), float(recipe["v_left"]))
        right = SteadyEuler(params, r_jump, float(recipe["rho_right"]), float(recipe["v_right"]))
        states = [
            (left if float(ri) < r_jump else right).extend(float(ri)) for ri in r
        ]
    else:  # pragma: no cover - guarded by Scenario validation
        raise ConfigurationError(f"unknown euler recipe {kind!r}")
    rho = np.array([s.rho for s in states])
    v = np.array([s.v for s in states])
    return rho, v


# -- running ------------------------------------------------------------------------


@dataclass
class RunResult:
    scenario: Scenario
    grid: object
    snapshots: list
    diagnostics: list  # rows: {"t", "dt", "tv_z"|"e_n", "l1_vs_reference"}
    final: FieldSnapshot
    reference: FieldSnapshot | None
    steady_at: float | None = None

    @property
    def times(self) -> list[float]:
        return [s.t for s in self.snapshots]


def run_scenario(
    scenario: Scenario,
    cells: int | None = None,
    tmax: float | None = None,
    scheme: str | None = None,
) -> RunResult:
    if scheme is not None and scheme != scenario.scheme:
        scenario = replace(scenario, scheme=scheme)
    if tmax is not None:
        scenario = replace(scenario, tmax=tmax)
    grid = scenario.grid(cells)
    initial = build_initial(scenario, grid)
    reference = (
        build_initial(scenario, grid, perturbed=False)
        if scenario.perturbation is not None
        else build_initial(scenario, grid)
        if scenario.initial["kind"] in ("steady", "steady_shock")
        else None
    )
    checkpoints = np.arange(0.0, scenario.tmax + 0.5 * scenario.output_dt, scenario.output_dt)
    checkpoints = [t for t in checkpoints if 0.0 < t <= scenario.tmax]
    if scenario.tmax not in checkpoints and scenario.tmax > 0:
        checkpoints.append(scenario.tmax)

    snapshots = [initial]
    pending = list(checkpoints)
    diagnostics: list[dict] = []
    last_e = {"value": math.inf}

    def recorder(n, state, dt):
        while pending and state.t >= pending[0] - 1e-11:
            pending.pop(0)
            snapshots.append(state)

    if scenario.model == "burgers":
        def diag(n, state, dt):
            diagnostics.append(
                {
                    "t": state.t,
                    "dt": dt,
                    "tv_z": burgers_glimm.tv_of_z(state),
                    "l1_vs_reference": l1_distance(state, reference)
                    if reference is not None
                    else math.nan,
                }
            )
    else:
        params = scenario.params()

        def diag(n, state, dt):
            # the step closure stashes the steadiness functional it computed
            # from the same reconstruction it stepped with (one step stale for
            # the row at state.t, which is immaterial at output cadence)
            row = {
                "t": state.t,
                "dt": dt,
                "e_n": last_e["value"],
                "l1_vs_reference": l1_distance(state, reference) if reference is not None else math.nan,
            }
            diagnostics.append(row)

    observers = [diag, recorder]

    if scenario.model == "burgers":
        if scenario.scheme == "glimm":
            seq = burgers_glimm.ChorinSequence(*scenario.seed)
            stop = StopAtTime(scenario.tmax)

            def step(state, dt):
                return burgers_glimm.glimm_step(state, dt, burgers_glimm.chorin_next(seq))

            policy = CflPolicy(safety=0.5, max_wavespeed=burgers_glimm.max_wavespeed_glimm)
        else:
            config = burgers_fv.BurgersFvConfig(order=1 if scenario.scheme == "fv1" else 2)
            stop = StopAtTime(scenario.tmax)

            def step(state, dt, config=config):
                return burgers_fv.fv_step(state, dt, config)

            policy = CflPolicy(safety=0.5, max_wavespeed=burgers_fv.max_wavespeed_burgers)
    else:
        params = scenario.params()
        last_e["value"] = euler_fv.steadiness_functional(initial, params)

        def step(state, dt):
            new, e_n = euler_fv.euler_fv_step(state, dt, params, return_steadiness=True)
            last_e["value"] = e_n
            return new

        policy = CflPolicy(
            safety=0.5, max_wavespeed=lambda s: euler_fv.max_wavespeed_euler(s, params)
        )
        if scenario.stop_steady:
            e0 = last_e["value"]
            threshold = 1e-8 * (e0 + 1e-14)
            stop = StopWhenSteady(
                tmax=scenario.tmax,
                metric=lambda s: last_e["value"],
                threshold=threshold,
                hold_steps=100,
            )
        else:
            stop = StopAtTime(scenario.tmax)

    final, log = run(
        initial, step, policy, stop, observers=observers, checkpoint_times=checkpoints
    )
    if snapshots[-1] is not final:
        snapshots.append(final)
    steady_at = getattr(stop, "triggered_at", None)
    return RunResult(
        scenario=scenario,
        grid=grid,
        snapshots=snapshots,
        diagnostics=diagnostics,
        final=final,
        reference=reference,
        steady_at=steady_at,
    )


# -- asymptotic-state detection -------------------------------------------------------


@dataclass
class AsymptoticReport:
    regime: str  # steady | steady_shock | critical | shock_lightspeed_left | none
    sign: int = 0
    K: float | None = None
    shock_radius: float | None = None
    detected_time: float | None = None
    terminal_residual: float = math.inf
    decay_exponent: float | None = None
    fitted_phi: float | None = None
    fitted_psi: float | None = None
    same_anchor: bool | None = None
    details: dict = field(default_factory=dict)


def _fit_steady_region(v, r, mass):
    """Least-squares K (and sign) for one sign-constant region of cells."""
    sign = 1 if np.mean(v) >= 0 else -1
    m = metric(r, mass)
    k2 = np.clip((1.0 - v * v) / m, 0.0, None)
    K = math.sqrt(max(float(np.mean(k2)), 0.0))
    fit = sign * np.sqrt(np.clip(1.0 - K * K * m, 0.0, None))
    return sign, K, float(np.max(np.abs(v - fit)))


def detect_asymptote_burgers(
    history, mass, fit_tol=1e-3, residual_series=None
) -> AsymptoticReport:
    last = history[-1]
    grid = last.grid
    v = last.values
    r = grid.centers
    report = AsymptoticReport(regime="none")

    # single steady branch (includes the critical K=1 member)
    sign, K, resid = _fit_steady_region(v, r, mass)
    if resid <= fit_tol and (np.sign(v) == sign).all():
        regime = "critical" if abs(K - 1.0) <= 1e-3 else "steady"
        report = AsymptoticReport(regime=regime, sign=sign, K=K, terminal_residual=resid)
    else:
        report = _detect_shock_like(v, r, grid, mass, fit_tol)

    if residual_series:
        report.decay_exponent = fit_decay_exponent(residual_series)
    if report.regime != "none":
        report.detected_time = _first_settled_time(history, report, mass)
    return report


def _detect_shock_like(v, r, grid, mass, fit_tol) -> AsymptoticReport:
    skip = max(2, grid.cells // 64)
    flips = np.nonzero(np.diff(np.sign(v)) != 0)[0]
    if len(flips) == 1:
        i = flips[0] + 1
        if i > skip + 2 and grid.cells - i > skip + 2:
            lv, lr = v[: i - skip], r[: i - skip]
            rv, rr = v[i + skip :], r[i + skip :]
            s_l, K_l, res_l = _fit_steady_region(lv, lr, mass)
            s_r, K_r, res_r = _fit_steady_region(rv, rr, mass)
            resid = max(res_l, res_r)
            if resid <= fit_tol and s_l > 0 > s_r:
                r_shock = grid.interfaces[i]
                if abs(K_l - K_r) <= 1e-6 * max(1.0, K_l):
                    return AsymptoticReport(
                        regime="steady_shock",
                        sign=1,
                        K=0.5 * (K_l + K_r),
                        shock_radius=r_shock,
                        terminal_residual=resid,
                        details={"K_left": K_l, "K_right": K_r},
                    )
                if K_l <= 1e-3 and abs(K_r - 1.0) <= 1e-3:
                    return AsymptoticReport(
                        regime="shock_lightspeed_left",
                        sign=1,
                        K=K_r,
                        shock_radius=r_shock,
                        terminal_residual=resid,
                        details={"K_left": K_l, "K_right": K_r},
                    )
    return AsymptoticReport(regime="none")


def _first_settled_time(history, report: AsymptoticReport, mass) -> float | None:
    tol = max(1.5 * report.terminal_residual, 1e-12)
    for snap in history:
        resid = _residual_vs_report(snap, report, mass)
        if resid <= tol:
            return snap.t
    return history[-1].t


def _residual_vs_report(snap, report: AsymptoticReport, mass) -> float:
    grid = snap.grid
    r = grid.centers
    m = metric(r, mass)
    skip = max(2, grid.cells // 64)
    if report.regime in ("steady", "critical"):
        fit = report.sign * np.sqrt(np.clip(1.0 - report.K**2 * m, 0.0, None))
        return float(np.max(np.abs(snap.values - fit)))
    if report.regime in ("steady_shock", "shock_lightspeed_left"):
        if report.regime == "steady_shock":
            left = np.sqrt(np.clip(1.0 - report.K**2 * m, 0.0, None))
        else:
            left = np.ones_like(r)
        right = -np.sqrt(np.clip(1.0 - report.K**2 * m, 0.0, None))
        # allow the jump to sit at its best interface
        best = math.inf
        flips = np.nonzero(np.diff(np.sign(snap.values)) != 0)[0]
        candidates = [int(f) + 1 for f in flips] or [grid.cells // 2]
        for i in candidates:
            fit = np.where(np.arange(grid.cells) < i, left, right)
            mask = np.ones(grid.cells, dtype=bool)
            mask[max(0, i - skip) : min(grid.cells, i + skip)] = False
            best = min(best, float(np.max(np.abs((snap.values - fit)[mask]))))
        return best
    return math.inf


def fit_decay_exponent(series) -> float | None:
    """Log-log slope of an L1-residual series over its decaying window."""
    ts = np.array([t for t, d in series], dtype=float)
    ds = np.array([d for t, d in series], dtype=float)
    good = (ts > 0) & (ds > 0) & np.isfinite(ds)
    ts, ds = ts[good], ds[good]
    if ts.size < 5:
        return None
    i_peak = int(np.argmax(ds))
    i_min = i_peak + int(np.argmin(ds[i_peak:]))
    w = np.arange(i_peak, i_min + 1)
    w = w[ds[w] > 0]
    if w.size < 5 or ds[i_min] >= 0.95 * ds[i_peak]:
        return None
    slope, _ = np.polyfit(np.log(ts[w]), np.log(ds[w]), 1)
    return float(slope)


def detect_asymptote_euler(
    history, params: EulerParams, reference: FieldSnapshot | None = None,
    rel_tol=1e-4, same_anchor_tol=1e-4,
) -> AsymptoticReport:
    last = history[-1]
    grid = last.grid
    rho, v = primitive_from_conserved(last.values[0], last.values[1], params.k)
    phi, psi = invariants(rho, v, grid.centers, params.k, params.mass)
    skip = max(2, grid.cells // 100)
    phi_i, psi_i = phi[skip:-skip], psi[skip:-skip]
    phi_scale = max(float(np.median(np.abs(phi_i))), 1e-300)
    psi_scale = max(float(np.median(np.abs(psi_i))), 1e-300)
    phi_flat = float(np.max(np.abs(phi_i - np.median(phi_i)))) / phi_scale
    psi_flat = float(np.max(np.abs(psi_i - np.median(psi_i)))) / psi_scale

    report = AsymptoticReport(regime="none")
    if psi_flat <= rel_tol and phi_flat <= rel_tol:
        report = AsymptoticReport(
            regime="steady",
            fitted_phi=float(np.median(phi_i)),
            fitted_psi=float(np.median(psi_i)),
            terminal_residual=max(phi_flat, psi_flat),
        )
    elif psi_flat <= rel_tol:
        # single jump in phi over a constant psi: a standing shock
        jumps = np.nonzero(np.abs(np.diff(phi_i)) > rel_tol * phi_scale * 10)[0]
        if jumps.size >= 1 and jumps.max() - jumps.min() <= max(4, grid.cells // 50):
            i = int(np.median(jumps)) + 1 + skip
            report = AsymptoticReport(
                regime="steady_shock",
                shock_radius=float(grid.interfaces[i]),
                fitted_phi=float(np.median(phi_i[: i - skip])),
                fitted_psi=float(np.median(psi_i)),
                terminal_residual=psi_flat,
                details={
                    "phi_left": float(np.median(phi[skip : i - 2])),
                    "phi_right": float(np.median(phi[i + 2 : -skip])),
                },
            )
    if report.regime != "none" and reference is not None:
        rho0, v0 = primitive_from_conserved(reference.values[0], reference.values[1], params.k)
        phi0, psi0 = invariants(rho0, v0, grid.centers, params.k, params.mass)
        dphi = abs(report.fitted_phi - float(np.median(phi0))) / max(abs(float(np.median(phi0))), 1e-300)
        dpsi = abs(report.fitted_psi - float(np.median(psi0))) / max(abs(float(np.median(psi0))), 1e-300)
        report.same_anchor = bool(max(dphi, dpsi) <= same_anchor_tol)
    return report


def detect_asymptote(history, model, mass=None, params=None, **kw) -> AsymptoticReport:
    if len(history) < 1:
        raise UsageError("need at least one snapshot")
    if model == "burgers":
        return detect_asymptote_burgers(history, mass, **kw)
    return detect_asymptote_euler(history, params, **kw)


def detect_plateaus(values, rel_tol=1e-4, min_run=4):
    """Maximal runs where the series stays within rel_tol of its running mean."""
    x = np.asarray(values, dtype=float)
    scale = max(float(np.max(np.abs(x))), 1e-300)
    plateaus = []
    start = 0
    while start < x.size:
        end = start + 1
        lo = hi = x[start]
        while end < x.size:
            lo2, hi2 = min(lo, x[end]), max(hi, x[end])
            if hi2 - lo2 > rel_tol * scale:
                break
            lo, hi = lo2, hi2
            end += 1
        if end - start >= min_run:
            plateaus.append((start, end, float(np.mean(x[start:end]))))
            start = end
        else:
            start += 1
    return plateaus


# -- CSV persistence --------------------------------------------------------------


def _fields_for(model: str) -> list[str]:
    return ["v"] if model == "burgers" else ["rho", "v"]


def write_csv(result: RunResult, path) -> Path:
    """One row per (snapshot, cell): t,r,<fields>, %.17g formatting."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    model = result.scenario.model
    names = _fields_for(model)
    buf = io.StringIO()
    buf.write("t,r," + ",".join(names) + "\n")
    for snap in result.snapshots:
        rows = _snapshot_columns(snap, result.scenario)
        for j, r in enumerate(snap.grid.centers):
            vals = ",".join(f"{c[j]:.17g}" for c in rows)
            buf.write(f"{snap.t:.17g},{r:.17g},{vals}\n")
    path.write_text(buf.getvalue())
    _write_diagnostics(result, path.with_name(path.stem + "_diagnostics.csv"))
    return path


def _snapshot_columns(snap: FieldSnapshot, scenario: Scenario):
    if scenario.model == "burgers":
        return [snap.values]
    rho, v = primitive_from_conserved(snap.values[0], snap.values[1], scenario.k)
    return [rho, v]


def _write_diagnostics(result: RunResult, path: Path) -> None:
    key = "tv_z" if result.scenario.model == "burgers" else "e_n"
    buf = io.StringIO()
    buf.write(f"t,dt,{key},l1_vs_reference\n")
    for row in result.diagnostics:
        buf.write(
            f"{row['t']:.17g},{row['dt']:.17g},{row[key]:.17g},{row['l1_vs_reference']:.17g}\n"
        )
    path.write_text(buf.getvalue())


def read_csv(path):
    """Parse a run CSV back into (column names, dict of float arrays)."""
    text = Path(path).read_text().strip().splitlines()
    if not text:
        raise UsageError(f"empty CSV {path}")
    names = text[0].split(",")
    cols = {n: [] for n in names}
    for line in text[1:]:
        parts = line.split(",")
        for n, p in zip(names, parts):
            cols[n].append(float(p))
    return names, {n: np.array(c) for n, c in cols.items()}


# -- config files -------------------------------------------------------------------


_SCALAR_KEYS = {
    "name": str,
    "model": str,
    "scheme": str,
    "mass": float,
    "grid.r_min": float,
    "grid.r_max": float,
    "grid.cells": int,
    "time.tmax": float,
    "output.dt": float,
    "params.k": float,
    "stop.steady": bool,
    "glimm.p1": int,
    "glimm.p2": int,
    "glimm.q0": int,
    "description": str,
}
_INITIAL_KEYS = {
    "initial.kind": str,
    "initial.sign": int,
    "initial.K": float,
    "initial.r_jump": float,
    "initial.sign_left": int,
    "initial.K_left": float,
    "initial.sign_right": int,
    "initial.K_right": float,
    "initial.v_horizon": float,
    "initial.v_infinity": float,
    "initial.width": float,
    "initial.far": str,
    "initial.far_sign": int,
    "initial.anchor_r": float,
    "initial.rho": float,
    "initial.v": float,
    "initial.rho_left": float,
    "initial.v_left": float,
    "initial.rho_right": float,
    "initial.v_right": float,
}
_PERTURB_KEYS = {
    "perturbation.center": float,
    "perturbation.width": float,
    "perturbation.amplitude": float,
    "perturbation.amplitude_v": float,
    "perturbation.zero_mean": bool,
}


def scenario_to_mapping(s: Scenario) -> dict:
    out = {
        "name": s.name,
        "model": s.model,
        "scheme": s.scheme,
        "mass": s.mass,
        "grid.r_min": s.r_min,
        "grid.r_max": s.r_max,
        "grid.cells": s.cells,
        "time.tmax": s.tmax,
        "output.dt": s.output_dt,
        "stop.steady": s.stop_steady,
        "glimm.p1": s.seed[0],
        "glimm.p2": s.seed[1],
        "glimm.q0": s.seed[2],
        "description": s.description,
    }
    if s.k is not None:
        out["params.k"] = s.k
    for key, val in s.initial.items():
        out[f"initial.{key}"] = val
    if s.perturbation is not None:
        p = s.perturbation
        out.update(
            {
                "perturbation.center": p.center,
                "perturbation.width": p.width,
                "perturbation.amplitude": p.amplitude,
                "perturbation.amplitude_v": p.amplitude_v,
                "perturbation.zero_mean": p.zero_mean,
            }
        )
    return out


def scenario_from_mapping(mapping: dict) -> Scenario:
    known = {**_SCALAR_KEYS, **_INITIAL_KEYS, **_PERTURB_KEYS}
    parsed = {}
    for key, raw in mapping.items():
        if key not in known:
            raise ConfigurationError(f"unknown configuration key {key!r}")
        typ = known[key]
        if typ is bool and isinstance(raw, str):
            if raw.lower() not in ("true", "false", "0", "1"):
                raise ConfigurationError(f"key {key!r}: expected a boolean, got {raw!r}")
            parsed[key] = raw.lower() in ("true", "1")
        else:
            try:
                parsed[key] = typ(raw)
            except (TypeError, ValueError) as exc:
                raise ConfigurationError(f"key {key!r}: {exc}") from exc
    for required in ("name", "model", "scheme", "mass", "grid.r_min", "grid.r_max",
                     "grid.cells", "time.tmax", "output.dt", "initial.kind"):
        if required not in parsed:
            raise ConfigurationError(f"missing configuration key {required!r}")
    initial = {k.split(".", 1)[1]: v for k, v in parsed.items() if k.startswith("initial.")}
    perturbation = None
    if any(k.startswith("perturbation.") for k in parsed):
        perturbation = Perturbation(
            center=parsed["perturbation.center"],
            width=parsed["perturbation.width"],
            amplitude=parsed["perturbation.amplitude"],
            amplitude_v=parsed.get("perturbation.amplitude_v", 0.0),
            zero_mean=parsed.get("perturbation.zero_mean", False),
        )
    return Scenario(
        name=parsed["name"],
        model=parsed["model"],
        scheme=parsed["scheme"],
        mass=parsed["mass"],
        r_min=parsed["grid.r_min"],
        r_max=parsed["grid.r_max"],
        cells=parsed["grid.cells"],
        tmax=parsed["time.tmax"],
        output_dt=parsed["output.dt"],
        initial=initial,
        k=parsed.get("params.k"),
        perturbation=perturbation,
        stop_steady=parsed.get("stop.steady", False),
        seed=(
            parsed.get("glimm.p1", 937),
            parsed.get("glimm.p2", 997),
            parsed.get("glimm.q0", 800),
        ),
        description=parsed.get("description", ""),
    )


def save_scenario(scenario: Scenario, path) -> Path:
    path = Path(path)
    lines = ["# relfluid scenario"]
    for key, val in scenario_to_mapping(scenario).items():
        lines.append(f"{key} = {val}")
    path.write_text("\n".join(lines) + "\n")
    return path


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.exists():
        raise ConfigurationError(f"no such scenario file: {path}")
    text = path.read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            mapping = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"invalid JSON in {path}: {exc}") from exc
        if not isinstance(mapping, dict):
            raise ConfigurationError(f"{path}: JSON config must be an object")
        return scenario_from_mapping(mapping)
    mapping = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        if "=" not in body:
            raise ConfigurationError(f"{path}:{lineno}: expected 'key = value'")
        key, val = (part.strip() for part in body.split("=", 1))
        mapping[key] = val
    return scenario_from_mapping(mapping)


# -- catalog ---------------------------------------------------------------------


def _burgers_base(name, scheme, desc, **kw):
    args = dict(
        name=name,
        model="burgers",
        scheme=scheme,
        mass=1.0,
        r_min=2.0,
        r_max=4.0,
        cells=256,
        tmax=20.0,
        output_dt=1.0,
        description=desc,
    )
    args.update(kw)
    return Scenario(**args)


def _euler_base(name, desc, **kw):
    args = dict(
        name=name,
        model="euler",
        scheme="euler_fv",
        mass=1.0,
        r_min=2.0,
        r_max=10.0,
        cells=500,
        tmax=50.0,
        output_dt=2.5,
        k=0.2,
        description=desc,
    )
    args.update(kw)
    return Scenario(**args)


_K_HALF = 0.5  # the family of v = ±sqrt(3/4 + 1/(2r)) branches
_SHOCK_RIGHT = dict(
    kind="grp", sign_left=1, K_left=math.sqrt(0.5), sign_right=1, K_right=1.0, r_jump=2.5
)
_SHOCK_LEFT = dict(
    kind="grp",
    sign_left=-1,
    K_left=1.0,
    sign_right=-1,
    K_right=math.sqrt(0.75),
    r_jump=2.5,
)


def catalog() -> dict[str, Scenario]:
    bump = Perturbation(center=2.5, width=0.35, amplitude=-0.08)
    shock_bump = Perturbation(center=2.6, width=0.3, amplitude=-0.08)
    scenarios = [
        # steady preservation
        _burgers_base("burgers/steady_pos", "fv2", "positive steady branch preserved",
                      initial=dict(kind="steady", sign=1, K=_K_HALF)),
        _burgers_base("burgers/steady_neg", "fv2", "negative steady branch preserved",
                      initial=dict(kind="steady", sign=-1, K=_K_HALF)),
        _burgers_base("burgers/steady_shock", "fv2", "standing shock preserved",
                      initial=dict(kind="steady_shock", K=_K_HALF, r_jump=3.0)),
        _burgers_base("burgers/steady_pos_glimm", "glimm", "positive steady branch, random choice",
                      initial=dict(kind="steady", sign=1, K=_K_HALF)),
        _burgers_base("burgers/steady_neg_glimm", "glimm", "negative steady branch, random choice",
                      initial=dict(kind="steady", sign=-1, K=_K_HALF)),
        _burgers_base("burgers/steady_shock_glimm", "glimm", "standing shock, random choice",
                      initial=dict(kind="steady_shock", K=_K_HALF, r_jump=3.0)),
        # moving shocks between steady branches
        _burgers_base("burgers/shock_right", "fv2", "outward-moving shock between branches",
                      initial=dict(_SHOCK_RIGHT), tmax=5.0, output_dt=0.25),
        _burgers_base("burgers/shock_right_glimm", "glimm", "outward-moving shock, random choice",
                      initial=dict(_SHOCK_RIGHT), tmax=5.0, output_dt=0.25),
        _burgers_base("burgers/shock_left", "fv2", "inward-moving shock between branches",
                      initial=dict(_SHOCK_LEFT), tmax=5.0, output_dt=0.25),
        _burgers_base("burgers/shock_left_glimm", "glimm", "inward-moving shock, random choice",
                      initial=dict(_SHOCK_LEFT), tmax=5.0, output_dt=0.25),
        # perturbed equilibria
        _burgers_base("burgers/perturbed_steady", "fv2", "zero-mean bump on a steady branch decays",
                      initial=dict(kind="steady", sign=1, K=_K_HALF),
                      r_max=260.0, cells=4000, tmax=280.0, output_dt=2.0,
                      perturbation=Perturbation(center=12.0, width=1.2, amplitude=0.035,
                                                zero_mean=True)),
        _burgers_base("burgers/perturbed_steady_glimm", "glimm", "bump on a steady branch, random choice",
                      initial=dict(kind="steady", sign=1, K=_K_HALF),
                      perturbation=bump, tmax=15.0, output_dt=0.1),
        _burgers_base("burgers/perturbed_steady_shock", "glimm", "bump on a standing shock",
                      initial=dict(kind="steady_shock", K=_K_HALF, r_jump=3.0),
                      perturbation=shock_bump, tmax=100.0, output_dt=1.0),
        _burgers_base("burgers/perturbed_steady_shock_fv", "fv2", "bump on a standing shock, FV",
                      initial=dict(kind="steady_shock", K=_K_HALF, r_jump=3.0),
                      perturbation=shock_bump, tmax=100.0, output_dt=1.0),
        # general data: late-time trichotomy
        _burgers_base("burgers/general_lightspeed", "fv2",
                      "light-speed horizon state over marginal infall",
                      initial=dict(kind="general", v_horizon=1.0, v_infinity=0.0, width=0.25,
                                   far="branch", far_sign=-1),
                      tmax=40.0, output_dt=2.0),
        _burgers_base("burgers/general_lightspeed_glimm", "glimm",
                      "light-speed horizon state, random choice",
                      initial=dict(kind="general", v_horizon=1.0, v_infinity=0.0, width=0.25,
                                   far="branch", far_sign=-1),
                      tmax=40.0, output_dt=2.0),
        _burgers_base("burgers/general_positive", "fv2",
                      "positive near-horizon flow over a vanishing far field",
                      initial=dict(kind="general", v_horizon=0.3, v_infinity=0.0, width=0.3,
                                   far="branch", far_sign=-1),
                      tmax=80.0, output_dt=2.0),
        _burgers_base("burgers/general_positive_glimm", "glimm",
                      "positive near-horizon flow, random choice",
                      initial=dict(kind="general", v_horizon=0.3, v_infinity=0.0, width=0.3,
                                   far="branch", far_sign=-1),
                      tmax=80.0, output_dt=2.0),
        _burgers_base("burgers/general_negative", "fv2", "negative far field selects its branch",
                      initial=dict(kind="general", v_horizon=-0.5, v_infinity=-0.4, width=0.4,
                                   far="branch"),
                      tmax=60.0, output_dt=2.0),
        _burgers_base("burgers/general_negative_glimm", "glimm", "negative far field, random choice",
                      initial=dict(kind="general", v_horizon=-0.5, v_infinity=-0.4, width=0.4,
                                   far="branch"),
                      tmax=60.0, output_dt=2.0),
        # Euler
        _euler_base("euler/steady_sub", "smooth steady outflow branch preserved",
                    initial=dict(kind="steady", anchor_r=10.0, rho=1.0, v=0.6)),
        _euler_base("euler/steady_super", "smooth steady infall branch preserved",
                    initial=dict(kind="steady", anchor_r=10.0, rho=1.0, v=-0.8)),
        _euler_base("euler/steady_shock", "standing Euler shock preserved", k=0.5,
                    initial=dict(kind="steady_shock", r_jump=5.2, rho_left=0.5, v_left=0.72)),
        _euler_base("euler/grp_rs", "generalized Riemann data, rarefaction + shock", k=0.5,
                    tmax=4.0, output_dt=0.5,
                    initial=dict(kind="grp", r_jump=5.2, rho_left=1.0, v_left=0.72,
                                 rho_right=2.0, v_right=0.3)),
        _euler_base("euler/grp_rr", "generalized Riemann data, two rarefactions", k=0.5,
                    tmax=4.0, output_dt=0.5,
                    initial=dict(kind="grp", r_jump=5.2, rho_left=1.0, v_left=0.05,
                                 rho_right=0.5, v_right=0.35)),
        _euler_base("euler/perturbed_steady_zero_mean",
                    "zero-mean bump on a steady branch returns to it",
                    tmax=200.0, stop_steady=True, output_dt=5.0,
                    initial=dict(kind="steady", anchor_r=10.0, rho=1.0, v=0.6),
                    perturbation=Perturbation(center=6.0, width=1.0, amplitude=0.2,
                                              amplitude_v=0.0, zero_mean=True)),
        _euler_base("euler/perturbed_steady_mass",
                    "mass-carrying bump relaxes to a different branch",
                    tmax=200.0, stop_steady=True, output_dt=5.0,
                    initial=dict(kind="steady", anchor_r=10.0, rho=1.0, v=0.6),
                    perturbation=Perturbation(center=6.0, width=1.0, amplitude=0.2,
                                              amplitude_v=0.05)),
        _euler_base("euler/perturbed_steady_shock",
                    "perturbed standing shock relaxes to a shifted one", k=0.5,
                    tmax=200.0, stop_steady=True, output_dt=5.0,
                    initial=dict(kind="steady_shock", r_jump=5.2, rho_left=0.5, v_left=0.72),
                    perturbation=Perturbation(center=4.0, width=0.6, amplitude=0.08,
                                              amplitude_v=0.02)),
    ]
    return {s.name: s for s in scenarios}
