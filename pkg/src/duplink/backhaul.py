"""Backhaul load accounting: network capacity, rate differentials, UE states.

The end-to-end network capacity is the max-flow of the two-tier topology:
picocells forward directly to the backbone, relays forward through the
macrocell, so relay traffic competes with macrocell access traffic for the
macrocell backhaul. Because the graph is series-parallel the max flow
collapses to nested min() terms and needs no general-purpose solver.

A PoA's rate differential V is its backhaul capacity minus the access-rate
demand placed on it; V < 0 marks the backhaul as a bottleneck. Each UE's pair
(V on link 1, V on link 2) falls into one of nine states that drive the
backhaul-state transmission policy:

    S1  both >= 0              S2  link1 tolerable, link2 >= 0
    S3  link1 >= 0, link2 tolerable       S4  both tolerable
    S5  link1 >= 0, link2 overloaded      S6  link1 overloaded, link2 >= 0
    S7  link1 tolerable, link2 overloaded
    S8  link1 overloaded, link2 tolerable
    S9  both overloaded

where "tolerable" means -tau <= V < 0 and "overloaded" means V < -tau.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .network import PoAKind, Scenario


class BackhaulState(Enum):
    S1 = 1
    S2 = 2
    S3 = 3
    S4 = 4
    S5 = 5
    S6 = 6
    S7 = 7
    S8 = 8
    S9 = 9


# (category of V1, category of V2) -> state, with categories
# 0: V >= 0, 1: -tau <= V < 0, 2: V < -tau.
_STATE_TABLE = {
    (0, 0): BackhaulState.S1,
    (1, 0): BackhaulState.S2,
    (0, 1): BackhaulState.S3,
    (1, 1): BackhaulState.S4,
    (0, 2): BackhaulState.S5,
    (2, 0): BackhaulState.S6,
    (1, 2): BackhaulState.S7,
    (2, 1): BackhaulState.S8,
    (2, 2): BackhaulState.S9,
}


def classify_state(v1: float, v2: float, tau: float) -> BackhaulState:
    """Unique backhaul state for a pair of rate differentials."""
    if tau <= 0:
        raise ValueError("tau must be > 0")

    def category(v):
        if v >= 0:
            return 0
        if v >= -tau:
            return 1
        return 2

    return _STATE_TABLE[(category(v1), category(v2))]


@dataclass
class BackhaulReport:
    """Per-iteration snapshot of backhaul load and UE backhaul states."""

    eta_n: float
    v: dict[int, float]                       # PoA id -> rate differential
    gamma_relay_sum: float                    # relay traffic carried into the MBS
    ue_states: dict[int, BackhaulState]       # dual-connectivity UEs only
    v_per_link: dict[tuple[int, int], float]  # (UE id, link) -> V of its PoA


def poa_access_rates(s: Scenario, rate1: np.ndarray, rate2: np.ndarray) -> dict[int, float]:
    """Aggregate access-rate demand arriving at each PoA."""
    load = {p.id: 0.0 for p in s.poas}
    for i, ue in enumerate(s.ues):
        load[ue.poa_1] += float(rate1[i])
        if ue.dual:
            load[ue.poa_2] += float(rate2[i])
    return load


def network_capacity(s: Scenario, rate1: np.ndarray, rate2: np.ndarray) -> float:
    """Aggregate end-to-end data rate through the two-tier backhaul."""
    load = poa_access_rates(s, rate1, rate2)
    macro = s.macro()
    relay_flow = sum(
        min(r.backhaul_capacity, load[r.id]) for r in s.relays()
    )
    total = min(macro.backhaul_capacity, load[macro.id] + relay_flow)
    total += sum(min(p.backhaul_capacity, load[p.id]) for p in s.picos())
    return total


def rate_differentials(s: Scenario, rate1: np.ndarray, rate2: np.ndarray) -> BackhaulReport:
    """Full backhaul report for one set of per-link access rates.

    Relay differentials use min(relay capacity, max(V_macro, 0)) as the
    effective ceiling: a relay cannot usefully carry more than the macrocell
    backhaul has head-room for. Overload is not clamped; the magnitude of a
    negative differential is what the adaptation policy reacts to.
    """
    load = poa_access_rates(s, rate1, rate2)
    macro = s.macro()
    gamma = sum(min(r.backhaul_capacity, load[r.id]) for r in s.relays())

    v: dict[int, float] = {}
    v_b = macro.backhaul_capacity - load[macro.id] - gamma
    v[macro.id] = v_b
    for p in s.picos():
        v[p.id] = p.backhaul_capacity - load[p.id]
    for r in s.relays():
        v[r.id] = min(r.backhaul_capacity, max(v_b, 0.0)) - load[r.id]

    v_per_link: dict[tuple[int, int], float] = {}
    ue_states: dict[int, BackhaulState] = {}
    for ue in s.ues:
        v_per_link[(ue.id, 1)] = v[ue.poa_1]
        if ue.dual:
            v_per_link[(ue.id, 2)] = v[ue.poa_2]
            ue_states[ue.id] = classify_state(v[ue.poa_1], v[ue.poa_2], s.tau)

    return BackhaulReport(
        eta_n=network_capacity(s, rate1, rate2),
        v=v,
        gamma_relay_sum=gamma,
        ue_states=ue_states,
        v_per_link=v_per_link,
    )
