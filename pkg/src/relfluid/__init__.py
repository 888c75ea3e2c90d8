"""Solvers and scenario harness for relativistic fluids outside a Schwarzschild black hole."""

from .grid import (
    CflPolicy,
    FieldSnapshot,
    Grid,
    StopAfterSteps,
    StopAtTime,
    StopWhenSteady,
    l1_distance,
    make_grid,
    next_dt,
    run,
    total_variation,
)

__all__ = [
    "CflPolicy",
    "FieldSnapshot",
    "Grid",
    "StopAfterSteps",
    "StopAtTime",
    "StopWhenSteady",
    "l1_distance",
    "make_grid",
    "next_dt",
    "run",
    "total_variation",
]

__version__ = "0.1.0"
