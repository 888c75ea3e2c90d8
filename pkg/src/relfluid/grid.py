"""Uniform radial grids, adaptive CFL stepping, the shared time loop, and discrete norms."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigurationError, NumericalError, UsageError


@dataclass(frozen=True)
class Grid:
    """Cell-centered uniform grid on (r_min, r_max) outside the horizon r = 2M.

    Centers sit at r_min + (j + 1/2)dr, so the horizon itself is never a sample
    point even when r_min = 2M; the leftmost interface may coincide with it.
    """

    mass: float
    r_min: float
    r_max: float
    cells: int

    def __post_init__(self):
        if not (isinstance(self.cells, (int, np.integer)) and self.cells >= 2):
            raise ConfigurationError(f"cells must be an integer >= 2, got {self.cells!r}")
        if not (np.isfinite(self.mass) and self.mass > 0):
            raise ConfigurationError(f"mass must be positive, got {self.mass!r}")
        if not (2.0 * self.mass <= self.r_min):
            raise ConfigurationError(
                f"r_min={self.r_min!r} lies inside the horizon r=2M={2.0 * self.mass!r}"
            )
        if not (self.r_min < self.r_max):
            raise ConfigurationError(f"r_min={self.r_min!r} must be below r_max={self.r_max!r}")

    @property
    def dr(self) -> float:
        return (self.r_max - self.r_min) / self.cells

    @cached_property
    def centers(self) -> np.ndarray:
        j = np.arange(self.cells)
        return self.r_min + (j + 0.5) * self.dr

    @cached_property
    def interfaces(self) -> np.ndarray:
        return self.r_min + np.arange(self.cells + 1) * self.dr

    def metric(self, r):
        """Schwarzschild lapse-like factor 1 - 2M/r."""
        return 1.0 - 2.0 * self.mass / np.asarray(r, dtype=float)


def make_grid(mass: float, r_min: float, r_max: float, cells: int) -> Grid:
    return Grid(mass=mass, r_min=r_min, r_max=r_max, cells=cells)


@dataclass
class FieldSnapshot:
    """Cell-averaged values on a grid at one time.

    values has shape (cells,) for scalar models or (components, cells) for systems.
    """

    grid: Grid
    t: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim not in (1, 2):
            raise UsageError("snapshot values must be a 1D or 2D array")
        if self.values.shape[-1] != self.grid.cells:
            raise UsageError(
                f"values last axis {self.values.shape[-1]} != grid cells {self.grid.cells}"
            )
        if not np.isfinite(self.values).all():
            raise NumericalError("snapshot contains non-finite values")

    @property
    def components(self) -> int:
        return 1 if self.values.ndim == 1 else self.values.shape[0]

    def with_values(self, values: np.ndarray, t: float | None = None) -> "FieldSnapshot":
        return FieldSnapshot(self.grid, self.t if t is None else t, values)


@dataclass
class CflPolicy:
    """Adaptive time-step rule dt = safety * dr / max_speed.

    max_wavespeed maps a snapshot to a bound on |characteristic speed| over it.
    fallback_dt is used when the field is exactly quiescent (max speed 0).
    """

    safety: float
    max_wavespeed: Callable[[FieldSnapshot], float]
    fallback_dt: float = 1e-3

    def __post_init__(self):
        if not (0.0 < self.safety <= 1.0):
            raise ConfigurationError(f"safety must lie in (0, 1], got {self.safety!r}")
        if not (self.fallback_dt > 0):
            raise ConfigurationError("fallback_dt must be positive")


def next_dt(policy: CflPolicy, snapshot: FieldSnapshot) -> float:
    speed = float(policy.max_wavespeed(snapshot))
    if not np.isfinite(speed) or speed < 0:
        raise NumericalError(f"max wavespeed is not finite and nonnegative: {speed!r}")
    if speed == 0.0:
        return policy.fallback_dt
    return policy.safety * snapshot.grid.dr / speed


@dataclass
class StopAtTime:
    tmax: float

    def limit_dt(self, t: float, dt: float) -> float:
        return min(dt, self.tmax - t)

    def done(self, snapshot: FieldSnapshot, steps: int) -> bool:
        return snapshot.t >= self.tmax - 1e-14 * max(1.0, abs(self.tmax))


@dataclass
class StopAfterSteps:
    steps: int

    def limit_dt(self, t: float, dt: float) -> float:
        return dt

    def done(self, snapshot: FieldSnapshot, steps: int) -> bool:
        return steps >= self.steps


@dataclass
class StopWhenSteady:
    """Halt once a steadiness metric stays under threshold for hold_steps, or at tmax."""

    tmax: float
    metric: Callable[[FieldSnapshot], float]
    threshold: float
    hold_steps: int = 100
    _run: int = field(default=0, repr=False)
    triggered_at: float | None = field(default=None, repr=False)

    def limit_dt(self, t: float, dt: float) -> float:
        return min(dt, self.tmax - t)

    def done(self, snapshot: FieldSnapshot, steps: int) -> bool:
        if snapshot.t >= self.tmax - 1e-14 * max(1.0, abs(self.tmax)):
            return True
        if self.metric(snapshot) < self.threshold:
            self._run += 1
        else:
            self._run = 0
        if self._run >= self.hold_steps:
            if self.triggered_at is None:
                self.triggered_at = snapshot.t
            return True
        return False


@dataclass
class RunLog:
    """Per-step record of the time loop plus whatever observers appended."""

    times: list = field(default_factory=list)
    dts: list = field(default_factory=list)

    @property
    def steps(self) -> int:
        return len(self.dts)


def run(
    initial: FieldSnapshot,
    step: Callable[[FieldSnapshot, float], FieldSnapshot],
    policy: CflPolicy,
    stop,
    observers: Sequence[Callable[[int, FieldSnapshot, float], None]] = (),
    checkpoint_times: Sequence[float] = (),
    max_steps: int = 10_000_000,
) -> tuple[FieldSnapshot, RunLog]:
    """Advance `initial` with `step` under the CFL policy until the stop rule fires.

    checkpoint_times are landed on exactly (dt is clamped), so recorded snapshots
    are reproducible across runs.
    """
    state = initial
    log = RunLog()
    pending = sorted(t for t in checkpoint_times if t > state.t)
    for observer in observers:
        observer(0, state, 0.0)
    n = 0
    while not stop.done(state, n):
        if n >= max_steps:
            raise NumericalError(f"time loop exceeded {max_steps} steps", step=n)
        dt = next_dt(policy, state)
        dt = stop.limit_dt(state.t, dt)
        target = None
        while pending and pending[0] <= state.t + 1e-14 * max(1.0, abs(state.t)):
            pending.pop(0)
        if pending and state.t + dt >= pending[0] - 1e-14:
            target = pending[0]
            dt = target - state.t
        if dt <= 0:
            break
        # stability contract: the clamped step still satisfies the CFL bound
        speed = float(policy.max_wavespeed(state))
        assert dt * speed <= policy.safety * state.grid.dr * (1.0 + 1e-12)
        new = step(state, dt)
        bad = ~np.isfinite(np.atleast_2d(new.values))
        if bad.any():
            cell = int(np.argwhere(bad)[0][-1])
            raise NumericalError(
                f"non-finite value at step {n + 1}, cell {cell}", step=n + 1, cell=cell
            )
        t_new = target if target is not None else state.t + dt
        if target is not None:
            pending.pop(0)
        state = new.with_values(new.values, t=t_new)
        n += 1
        log.times.append(t_new)
        log.dts.append(dt)
        for observer in observers:
            observer(n, state, dt)
    return state, log


def l1_distance(a: FieldSnapshot, b: FieldSnapshot) -> float:
    """Discrete L1 distance sum_j |a_j - b_j| dr, summed over components."""
    if a.grid != b.grid:
        raise UsageError("snapshots live on different grids")
    if a.values.shape != b.values.shape:
        raise UsageError("snapshots have different component counts")
    return float(np.sum(np.abs(a.values - b.values)) * a.grid.dr)


def total_variation(values) -> float:
    """Total variation sum_j |x_{j+1} - x_j| of a scalar sequence."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size < 2:
        raise UsageError("total variation needs a 1D sequence of length >= 2")
    return float(np.sum(np.abs(np.diff(x))))
