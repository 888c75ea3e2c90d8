"""Command-line entry point: run scenarios, list the catalog, quick verification."""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np

from .errors import RelfluidError
from .scenarios import (
    catalog,
    detect_asymptote,
    load_scenario,
    run_scenario,
    write_csv,
)


def _resolve_scenario(token: str):
    if Path(token).is_file():
        return load_scenario(token)
    names = catalog()
    if token in names:
        return names[token]
    raise RelfluidError(
        f"unknown scenario {token!r}; try 'relfluid list' or pass a config file path"
    )


def _cmd_list(args) -> int:
    for name, sc in sorted(catalog().items()):
        print(f"{name:40s} {sc.scheme:8s} t<={sc.tmax:<6g} {sc.description}")
    return 0


def _cmd_run(args) -> int:
    scenario = _resolve_scenario(args.scenario)
    out_dir = Path(args.out or os.environ.get("OUT_DIR", "out"))
    result = run_scenario(
        scenario, cells=args.cells, tmax=args.tmax, scheme=args.scheme
    )
    stem = scenario.name.replace("/", "__")
    path = write_csv(result, out_dir / f"{stem}.csv")
    print(f"wrote {path} ({len(result.snapshots)} snapshots, {len(result.diagnostics)} steps)")
    if scenario.model == "burgers":
        series = [(d["t"], d["l1_vs_reference"]) for d in result.diagnostics]
        report = detect_asymptote(
            result.snapshots, "burgers", mass=scenario.mass, residual_series=series
        )
    else:
        report = detect_asymptote(
            result.snapshots, "euler", params=scenario.params(), reference=result.reference
        )
    print(f"asymptotic regime: {report.regime}", end="")
    if report.K is not None:
        print(f"  K={report.K:.6g}", end="")
    if report.shock_radius is not None:
        print(f"  r_shock={report.shock_radius:.6g}", end="")
    if result.steady_at is not None:
        print(f"  steady at t={result.steady_at:.6g}", end="")
    print()
    return 0


def _cmd_verify(args) -> int:
    """Fast subset of the acceptance checks; the full suite lives in tests/."""
    from .burgers_grp import GrpData, classify, solve_grp
    from .burgers_model import SteadyBurgers, steady_eval
    from .euler_fv import steadiness_functional
    from .grid import l1_distance

    checks = []

    def check(name, fn):
        t0 = time.time()
        try:
            fn()
            checks.append((name, True, time.time() - t0, ""))
        except AssertionError as exc:
            checks.append((name, False, time.time() - t0, str(exc)))

    def steady_glimm():
        sc = catalog()["burgers/steady_pos_glimm"]
        res = run_scenario(sc, tmax=5.0)
        drift = float(np.max(np.abs(res.final.values - res.snapshots[0].values)))
        assert drift <= 1e-10, f"glimm steady drift {drift:.2e}"

    def steady_euler():
        sc = catalog()["euler/steady_sub"]
        res = run_scenario(sc, tmax=5.0)
        rel = np.max(
            np.abs(res.final.values - res.snapshots[0].values)
            / np.maximum(np.abs(res.snapshots[0].values), 1e-300)
        )
        e_n = steadiness_functional(res.final, sc.params())
        assert rel <= 1e-10, f"euler steady drift {rel:.2e}"
        assert e_n <= 1e-12, f"euler steadiness functional {e_n:.2e}"

    def shock_directions():
        for name, sgn in (("burgers/shock_right", 1.0), ("burgers/shock_left", -1.0)):
            sc = catalog()[name]
            left = SteadyBurgers(int(sc.initial["sign_left"]), sc.initial["K_left"], 1.0)
            right = SteadyBurgers(int(sc.initial["sign_right"]), sc.initial["K_right"], 1.0)
            data = GrpData(left=left, right=right, r0=2.5)
            assert classify(data) == "shock"
            sol = solve_grp(data, t_max=1.0)
            speed = sol.shock_speed(0.0)
            assert speed * sgn > 0, f"{name}: wrong direction {speed:+.4f}"

    check("steady preservation (Glimm, t=5)", steady_glimm)
    check("exact well-balancing (Euler, t=5)", steady_euler)
    check("shock direction dichotomy", shock_directions)

    width = max(len(c[0]) for c in checks)
    failures = 0
    for name, ok, dt, msg in checks:
        status = "PASS" if ok else "FAIL"
        print(f"{name:{width}s}  {status}  ({dt:5.1f}s){'  ' + msg if msg else ''}")
        failures += 0 if ok else 1
    return 1 if failures else 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="relfluid",
        description="Relativistic fluid solvers outside a Schwarzschild black hole",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a catalog scenario or a config file")
    p_run.add_argument("scenario", help="catalog name (see 'list') or config file path")
    p_run.add_argument("--out", default=None, help="output directory (default $OUT_DIR or ./out)")
    p_run.add_argument("--cells", type=int, default=None, help="override the cell count")
    p_run.add_argument("--tmax", type=float, default=None, help="override the final time")
    p_run.add_argument("--scheme", default=None, help="override the scheme")

    sub.add_parser("list", help="list built-in scenarios")
    sub.add_parser("verify", help="run a fast verification subset, print a pass/fail table")

    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "run":
            return _cmd_run(args)
        if args.command == "list":
            return _cmd_list(args)
        return _cmd_verify(args)
    except RelfluidError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
