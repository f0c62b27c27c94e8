"""Command-line entry point.

Two subcommands:

  run         one simulation over a scenario JSON file; writes trace.csv,
              metrics.json, and equilibrium.json (predicted vs simulated
              fixed point, when the iteration matrix is contractive).
  experiment  seeded Monte Carlo presets sweeping tau/Z, UE count, backhaul
              scale, or small-cell count; writes trials.csv + summary.csv.

Exit codes: 0 success, 2 usage error, 3 scenario validation error,
4 runtime numerical failure. The default output directory can be set with
the DUPLINK_OUT environment variable.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .engine import SweepPoint, aggregate, monte_carlo, run, trace_to_csv
from .equilibrium import build_system, closed_form_equilibrium, mixed_population_system
from .metrics import build_matrices
from .network import load_scenario, validate_scenario
from .policies import POLICY_NAMES
from .scenarios import GenParams

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_VALIDATION = 3
EXIT_NUMERICAL = 4

TRIAL_COLUMNS = ["preset", "sweep_var", "sweep_value", "policy", "trial",
                 "eta_n_normalized", "avg_total_power", "converged"]
SUMMARY_COLUMNS = ["preset", "sweep_var", "sweep_value", "policy", "n_trials",
                   "eta_n_normalized_mean", "eta_n_normalized_se",
                   "avg_total_power_mean", "avg_total_power_se", "converged_pct"]


def _default_out() -> str:
    return os.environ.get("DUPLINK_OUT", ".")


def _write_rows(path: Path, columns: list[str], rows: list[dict]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)


def _equilibrium_payload(scenario, mat) -> dict | None:
    """Predicted fixed point of the waterfilling regime, when contractive."""
    p_max = np.array([u.p_max for u in scenario.ues])
    sys_ = build_system(mat, p_max)
    q = np.array([0.0 if u.dual else 1.0 for u in scenario.ues])
    beta = np.array([u.fixed_sinr_target or 0.0 for u in scenario.ues])
    if q.any():
        a, c = mixed_population_system(mat, sys_, q, beta)
        rho = float(np.max(np.abs(np.linalg.eigvals(a)))) if a.size else 0.0
        if rho >= 1.0:
            return None
        p1 = np.linalg.solve(np.eye(len(q)) - a, c)
        p2 = np.where(q == 1.0, 0.0, p_max - p1)
        interior = bool(np.all(p1 > 0) and np.all(p1 < p_max))
        payload = {"spectral_radius": rho, "mixed_population": True}
    else:
        if sys_.spectral_radius >= 1.0:
            return None
        p1, p2 = closed_form_equilibrium(sys_, p_max)
        interior = sys_.interior
        payload = {
            "spectral_radius": sys_.spectral_radius,
            "spectral_radius_abs": sys_.spectral_radius_abs,
            "mixed_population": False,
        }
    payload.update({
        "predicted_p1": [float(x) for x in p1],
        "predicted_p2": [float(x) for x in p2],
        "interior": interior,
    })
    return payload


def cmd_run(args: argparse.Namespace) -> int:
    path = Path(args.scenario)
    if not path.is_file():
        print(f"error: scenario file not found: {path}", file=sys.stderr)
        return EXIT_USAGE
    try:
        scenario = load_scenario(path)
    except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        print(f"error: cannot parse scenario: {exc}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.tau is not None:
        scenario = replace(scenario, tau=args.tau)
    if args.z is not None:
        scenario = replace(scenario, z_factor=args.z)

    violations = validate_scenario(scenario)
    if violations:
        print("scenario validation failed:", file=sys.stderr)
        for v in violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_VALIDATION

    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output dir: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        mat = build_matrices(scenario)
        trace = run(scenario, args.policy, max_iter=args.iters, eps=args.eps,
                    window=args.window, m=mat)
        equilibrium = _equilibrium_payload(scenario, mat)
        if equilibrium is not None:
            final = trace.states[-1]
            pred = np.array(equilibrium["predicted_p1"])
            equilibrium["simulated_p1"] = [float(x) for x in final.p1]
            equilibrium["simulated_p2"] = [float(x) for x in final.p2]
            equilibrium["max_abs_error_p1"] = float(
                np.max(np.abs(final.p1 - pred), initial=0.0))
            (out / "equilibrium.json").write_text(json.dumps(equilibrium, indent=2))
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    trace_to_csv(trace, scenario, out / "trace.csv")
    payload = dict(trace.metrics)
    payload["verdict"] = trace.verdict.kind
    payload["converged_at"] = trace.verdict.iteration
    payload["oscillation_period"] = trace.verdict.period
    (out / "metrics.json").write_text(json.dumps(payload, indent=2))
    print(f"{trace.verdict.kind} after {trace.metrics['iterations_run']} iterations; "
          f"eta_n = {trace.metrics['eta_n_final']:.4g} bit/s")
    return EXIT_OK


# --- experiment presets ---------------------------------------------------------
#
# Shared defaults: 3 relays at 100 Mbps, 4 picocells at 200 Mbps, macrocell at
# 1 Gbps, 200 m drop radius, path-loss exponent 3.7, 1/5 MHz channels,
# tau = 5 Mbps, Z = 0.9, 50 iterations (fig2b uses 100). Deviations per preset
# are listed below.


def _preset_fig2b() -> tuple[list[SweepPoint], dict]:
    """Convergence percentage over a (tau, Z) grid, 21 UEs, contractive
    scenarios only, 100 iterations, policies bdt and greedy."""
    points = []
    for tau_mbps in (1, 2, 5, 10, 20):
        for z in (0.5, 0.7, 0.9, 0.95):
            params = GenParams(n_ues=21, tau=tau_mbps * 1e6, z_factor=z)
            points.append(SweepPoint("tau_z", f"{tau_mbps}Mbps|Z{z}", params))
    return points, {"policies": ("bdt", "greedy"), "max_iter": 100,
                    "require_contractive": True}


def _preset_fig3() -> tuple[list[SweepPoint], dict]:
    """Network-size sweep at default backhaul."""
    points = [SweepPoint("n_ues", n, GenParams(n_ues=n))
              for n in (2, 4, 6, 8, 12, 16, 21)]
    return points, {"policies": ("bdt", "wf", "greedy"), "max_iter": 50}


def _preset_fig4() -> tuple[list[SweepPoint], dict]:
    """Backhaul-scale sweep at 21 UEs."""
    points = [SweepPoint("backhaul_scale", scale,
                         GenParams(n_ues=21, backhaul_scale=scale))
              for scale in (0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0)]
    return points, {"policies": ("bdt", "wf", "greedy"), "max_iter": 50}


def _preset_fig5() -> tuple[list[SweepPoint], dict]:
    """Small-cell count sweep: 3 UEs per cell, 50 Mbps small-cell backhaul,
    cells kept at least two drop radii apart."""
    points = []
    for kind in ("n_picos", "n_relays"):
        for cells in (2, 4, 6, 8):
            params = GenParams(
                n_ues=3 * cells,
                n_relays=cells if kind == "n_relays" else 0,
                n_picos=cells if kind == "n_picos" else 0,
                eta_relay=50e6,
                eta_pico=50e6,
                min_poa_separation=400.0,
            )
            points.append(SweepPoint(kind, cells, params))
    return points, {"policies": ("bdt", "wf", "greedy"), "max_iter": 50}


PRESETS = {
    "fig2b": _preset_fig2b,
    "fig3": _preset_fig3,
    "fig4": _preset_fig4,
    "fig5": _preset_fig5,
}


def cmd_experiment(args: argparse.Namespace) -> int:
    points, kwargs = PRESETS[args.preset]()
    out = Path(args.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output dir: {exc}", file=sys.stderr)
        return EXIT_USAGE

    policies = kwargs.pop("policies")
    try:
        rows = monte_carlo(points, policies, trials=args.trials, seeds=args.seed,
                           **kwargs)
    except (np.linalg.LinAlgError, FloatingPointError, RuntimeError) as exc:
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL

    for row in rows:
        row["preset"] = args.preset
        row["converged"] = int(row["converged"])
    summary = aggregate(rows)
    for row in summary:
        row["preset"] = args.preset

    _write_rows(out / "trials.csv", TRIAL_COLUMNS, rows)
    _write_rows(out / "summary.csv", SUMMARY_COLUMNS, summary)
    print(f"wrote {len(rows)} trial rows and {len(summary)} summary rows to {out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="duplink",
        description="Uplink power allocation simulator for dual-connectivity "
                    "networks with capacity-limited backhaul",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--policy", required=True, choices=POLICY_NAMES)
    p_run.add_argument("--iters", type=int, default=100)
    p_run.add_argument("--eps", type=float, default=1e-6,
                       help="convergence threshold on the power step (watts)")
    p_run.add_argument("--window", type=int, default=5,
                       help="consecutive stable iterations required")
    p_run.add_argument("--tau", type=float, default=None,
                       help="override the scenario's rate-differential threshold")
    p_run.add_argument("--z", type=float, default=None,
                       help="override the scenario's power scaling factor")
    p_run.add_argument("--out", default=_default_out())
    p_run.set_defaults(func=cmd_run)

    p_exp = sub.add_parser("experiment", help="run a Monte Carlo preset")
    p_exp.add_argument("--preset", required=True, choices=sorted(PRESETS))
    p_exp.add_argument("--trials", type=int, required=True)
    p_exp.add_argument("--seed", type=int, default=0)
    p_exp.add_argument("--out", default=_default_out())
    p_exp.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if getattr(args, "trials", 1) < 1:
        print("error: --trials must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    return args.func(args)


def console_main() -> None:
    sys.exit(main())
