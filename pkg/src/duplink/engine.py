"""Synchronous simulation of per-UE power adaptation.

Every iteration all UEs observe the same iteration-k quantities (powers,
effective interference, rate differentials, backhaul states), decide their
next powers simultaneously, and the engine then re-derives interference,
SINR and rates for the new power vector. A run stops early once the power
vector has been stable for a window of iterations, or is flagged as
oscillating when it revisits an earlier, non-adjacent iterate without
settling.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .backhaul import BackhaulReport, rate_differentials
from .metrics import CrossGainMatrices, PowerState, build_matrices, compute_state
from .network import Scenario
from .policies import Observation, Policy, make_policy
from .scenarios import GenParams, generate

CONVERGED = "converged"
OSCILLATING = "oscillating"
MAX_ITERATIONS = "max_iterations"

_FEAS_SLACK = 1e-9


@dataclass
class Verdict:
    kind: str
    iteration: Optional[int] = None   # iteration at which the run settled
    period: Optional[int] = None      # estimated cycle length when oscillating

    @property
    def converged(self) -> bool:
        return self.kind == CONVERGED


@dataclass
class Trace:
    states: list[PowerState]
    reports: list[BackhaulReport]
    verdict: Verdict
    metrics: dict


def resolve_policies(s: Scenario, policy: str | Sequence[Policy]) -> list[Policy]:
    """Per-UE policy list: single-link UEs always run fixed-SINR control."""
    from .policies import FixedSinrPolicy

    if isinstance(policy, str):
        dual_policy = make_policy(policy)
        return [FixedSinrPolicy() if not u.dual else dual_policy for u in s.ues]
    policies = list(policy)
    if len(policies) != s.n_ues:
        raise ValueError(f"need one policy per UE ({s.n_ues}), got {len(policies)}")
    return policies


def initial_state(s: Scenario, m: CrossGainMatrices,
                  p0: Optional[tuple[np.ndarray, np.ndarray]] = None) -> PowerState:
    """Default start: each UE splits its budget equally over its links."""
    if p0 is not None:
        return compute_state(m, p0[0], p0[1])
    p1 = np.array([u.p_max / 2 for u in s.ues])
    p2 = np.array([u.p_max / 2 if u.dual else 0.0 for u in s.ues])
    return compute_state(m, p1, p2)


def step(
    s: Scenario,
    m: CrossGainMatrices,
    now: PowerState,
    policies: Sequence[Policy],
    report: Optional[BackhaulReport] = None,
) -> PowerState:
    """Apply every UE's policy once, using iteration-k observations only."""
    if report is None:
        report = rate_differentials(s, now.rate1, now.rate2)
    p1_next = np.empty(s.n_ues)
    p2_next = np.empty(s.n_ues)
    for i, ue in enumerate(s.ues):
        obs = Observation(
            p1=float(now.p1[i]),
            p2=float(now.p2[i]),
            e1=float(now.e1[i]),
            e2=float(now.e2[i]),
            w1=float(m.w1[i]),
            w2=float(m.w2[i]),
            p_max=ue.p_max,
            v1=report.v_per_link[(ue.id, 1)],
            v2=report.v_per_link.get((ue.id, 2), 0.0),
            state=report.ue_states.get(ue.id),
            tau=s.tau,
            z=s.z_factor,
        )
        p1_i, p2_i = policies[i].update(ue, obs)
        if (p1_i < -_FEAS_SLACK or p2_i < -_FEAS_SLACK
                or p1_i + p2_i > ue.p_max * (1 + _FEAS_SLACK)):
            raise RuntimeError(
                f"policy returned infeasible powers for UE {ue.id}: "
                f"({p1_i}, {p2_i}) with p_max {ue.p_max}"
            )
        p1_next[i] = min(max(p1_i, 0.0), ue.p_max)
        p2_next[i] = min(max(p2_i, 0.0), ue.p_max - p1_next[i])
    return compute_state(m, p1_next, p2_next)


def run(
    s: Scenario,
    policy: str | Sequence[Policy],
    max_iter: int = 100,
    eps: float = 1e-6,
    window: int = 5,
    p0: Optional[tuple[np.ndarray, np.ndarray]] = None,
    m: Optional[CrossGainMatrices] = None,
) -> Trace:
    """Iterate the chosen policy and classify the outcome.

    Convergence requires the infinity-norm power step to stay below ``eps``
    for ``window`` consecutive iterations. Oscillation is declared when the
    trajectory returns to within ``eps`` of an earlier, non-adjacent iterate
    while still moving.
    """
    if max_iter < 1:
        raise ValueError("max_iter must be >= 1")
    if m is None:
        m = build_matrices(s)
    policies = resolve_policies(s, policy)

    states = [initial_state(s, m, p0)]
    reports = [rate_differentials(s, states[0].rate1, states[0].rate2)]

    if s.n_ues == 0:
        verdict = Verdict(CONVERGED, iteration=0)
        trace = Trace(states, reports, verdict, {})
        trace.metrics = trace_metrics(trace, s)
        return trace

    stable = 0
    verdict = Verdict(MAX_ITERATIONS)
    for k in range(max_iter):
        nxt = step(s, m, states[-1], policies, reports[-1])
        delta = _power_gap(states[-1], nxt)
        states.append(nxt)
        reports.append(rate_differentials(s, nxt.rate1, nxt.rate2))

        stable = stable + 1 if delta < eps else 0
        if stable >= window:
            verdict = Verdict(CONVERGED, iteration=k + 1 - window + 1)
            break
        if delta >= eps:
            revisit = _find_revisit(states, eps)
            if revisit is not None:
                verdict = Verdict(OSCILLATING, period=revisit)
                break

    trace = Trace(states, reports, verdict, {})
    trace.metrics = trace_metrics(trace, s)
    return trace


def _power_gap(a: PowerState, b: PowerState) -> float:
    return float(
        max(
            np.max(np.abs(a.p1 - b.p1), initial=0.0),
            np.max(np.abs(a.p2 - b.p2), initial=0.0),
        )
    )


def _find_revisit(states: list[PowerState], eps: float) -> Optional[int]:
    """Cycle length if the newest iterate matches an earlier non-adjacent one."""
    last = states[-1]
    k = len(states) - 1
    for j in range(k - 2, -1, -1):
        if _power_gap(states[j], last) < eps:
            return k - j
    return None


def trace_metrics(trace: Trace, s: Scenario) -> dict:
    """Headline numbers of a finished run."""
    final = trace.states[-1]
    in_use = {u.chan_1 for u in s.ues} | {u.chan_2 for u in s.ues if u.dual}
    total_bw = sum(c.bandwidth for c in s.channels if c.id in in_use)
    eta_n = trace.reports[-1].eta_n
    totals = final.p1 + final.p2
    return {
        "eta_n_final": eta_n,
        "eta_n_normalized": eta_n / total_bw if total_bw > 0 else 0.0,
        "avg_total_power": float(np.mean(totals)) if s.n_ues else 0.0,
        "iterations_run": len(trace.states) - 1,
    }


# --- trace serialization ------------------------------------------------------


def trace_to_csv(trace: Trace, s: Scenario, path: str | Path) -> None:
    """One row per iteration: k, per-UE powers/rates/state, network rate."""
    header = ["k"]
    for u in s.ues:
        header += [f"p1_{u.id}", f"p2_{u.id}", f"rate1_{u.id}", f"rate2_{u.id}",
                   f"state_{u.id}"]
    header.append("eta_n")
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for k, (st, rep) in enumerate(zip(trace.states, trace.reports)):
            row: list = [k]
            for i, u in enumerate(s.ues):
                state = rep.ue_states.get(u.id)
                row += [
                    repr(float(st.p1[i])), repr(float(st.p2[i])),
                    repr(float(st.rate1[i])), repr(float(st.rate2[i])),
                    state.name if state is not None else "",
                ]
            row.append(repr(rep.eta_n))
            writer.writerow(row)


def trace_to_dict(trace: Trace, s: Scenario) -> dict:
    return {
        "verdict": {
            "kind": trace.verdict.kind,
            "iteration": trace.verdict.iteration,
            "period": trace.verdict.period,
        },
        "metrics": trace.metrics,
        "iterations": [
            {
                "k": k,
                "p1": [float(x) for x in st.p1],
                "p2": [float(x) for x in st.p2],
                "rate1": [float(x) for x in st.rate1],
                "rate2": [float(x) for x in st.rate2],
                "states": {str(uid): state.name for uid, state in rep.ue_states.items()},
                "eta_n": rep.eta_n,
            }
            for k, (st, rep) in enumerate(zip(trace.states, trace.reports))
        ],
    }


def trace_to_json(trace: Trace, s: Scenario, path: str | Path) -> None:
    Path(path).write_text(json.dumps(trace_to_dict(trace, s), indent=2))


# --- Monte Carlo sweeps ---------------------------------------------------------


@dataclass
class SweepPoint:
    sweep_var: str
    sweep_value: object
    params: GenParams


def _trial_seed(base_seed: int, point_idx: int, trial: int, attempt: int = 0) -> int:
    seq = np.random.SeedSequence([int(base_seed), point_idx, trial, attempt])
    return int(seq.generate_state(1)[0])


def monte_carlo(
    points: Sequence[SweepPoint],
    policies: Sequence[str],
    trials: int,
    seeds: int | Sequence[int],
    max_iter: int = 50,
    eps: float = 1e-6,
    window: int = 5,
    require_contractive: bool = False,
    max_attempts: int = 200,
) -> list[dict]:
    """Seeded sweep: every policy sees the same scenario in a given trial.

    ``seeds`` is either a base seed (per-trial seeds are derived from it) or
    an explicit per-trial seed list. With ``require_contractive`` the
    generator rejects scenarios whose waterfilling iteration matrix has a
    spectral radius of 1 or more, re-drawing deterministically.
    """
    from .equilibrium import build_system

    if trials < 1:
        raise ValueError("trials must be >= 1")
    seed_list = list(seeds) if not isinstance(seeds, int) else None
    if seed_list is not None and len(seed_list) < trials:
        raise ValueError(f"need {trials} seeds, got {len(seed_list)}")

    rows = []
    for point_idx, point in enumerate(points):
        for trial in range(trials):
            scenario = None
            for attempt in range(max_attempts):
                if seed_list is not None:
                    seed = _trial_seed(seed_list[trial], point_idx, 0, attempt)
                else:
                    seed = _trial_seed(seeds, point_idx, trial, attempt)
                candidate = generate(replace(point.params, seed=seed))
                if not require_contractive:
                    scenario = candidate
                    break
                mat = build_matrices(candidate)
                if build_system(mat, np.array([u.p_max for u in candidate.ues])
                                ).spectral_radius < 1.0:
                    scenario = candidate
                    break
            if scenario is None:
                raise RuntimeError(
                    f"no contractive scenario found for point {point.sweep_value!r}, "
                    f"trial {trial} after {max_attempts} attempts"
                )
            mat = build_matrices(scenario)
            for policy in policies:
                trace = run(scenario, policy, max_iter=max_iter, eps=eps,
                            window=window, m=mat)
                rows.append({
                    "sweep_var": point.sweep_var,
                    "sweep_value": point.sweep_value,
                    "policy": policy,
                    "trial": trial,
                    "eta_n_normalized": trace.metrics["eta_n_normalized"],
                    "avg_total_power": trace.metrics["avg_total_power"],
                    "converged": trace.verdict.converged,
                })
    return rows


def aggregate(rows: Sequence[dict]) -> list[dict]:
    """Mean, standard error and convergence percentage per (point, policy)."""
    groups: dict[tuple, list[dict]] = {}
    order: list[tuple] = []
    for row in rows:
        key = (row["sweep_var"], row["sweep_value"], row["policy"])
        if key not in groups:
            groups[key] = []
            order.append(key)
        groups[key].append(row)

    def mean_se(values: list[float]) -> tuple[float, float]:
        arr = np.asarray(values, dtype=float)
        se = float(arr.std(ddof=1) / np.sqrt(len(arr))) if len(arr) > 1 else 0.0
        return float(arr.mean()), se

    out = []
    for key in order:
        grp = groups[key]
        eta_mean, eta_se = mean_se([g["eta_n_normalized"] for g in grp])
        pow_mean, pow_se = mean_se([g["avg_total_power"] for g in grp])
        out.append({
            "sweep_var": key[0],
            "sweep_value": key[1],
            "policy": key[2],
            "n_trials": len(grp),
            "eta_n_normalized_mean": eta_mean,
            "eta_n_normalized_se": eta_se,
            "avg_total_power_mean": pow_mean,
            "avg_total_power_se": pow_se,
            "converged_pct": 100.0 * sum(g["converged"] for g in grp) / len(grp),
        })
    return out
