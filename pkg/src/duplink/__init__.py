"""duplink: uplink power allocation in dual-connectivity cellular networks.

A discrete-time simulator and analysis toolkit for networks where every user
equipment transmits simultaneously to two points of access over orthogonal
channels, and the access points forward traffic over capacity-limited
backhaul links. Ships four adaptation policies (waterfilling, greedy
rate-cap allocation, backhaul-state-driven transmission, fixed-target-SINR),
the linear-system machinery that predicts and certifies their convergence,
a random topology generator, and a CLI for single runs and seeded Monte
Carlo sweeps.
"""

__version__ = "0.1.0"

from .backhaul import (
    BackhaulReport,
    BackhaulState,
    classify_state,
    network_capacity,
    poa_access_rates,
    rate_differentials,
)
from .engine import (
    SweepPoint,
    Trace,
    Verdict,
    aggregate,
    initial_state,
    monte_carlo,
    run,
    step,
    trace_metrics,
    trace_to_csv,
    trace_to_json,
)
from .equilibrium import (
    InapplicableCheck,
    IterationSystem,
    build_system,
    closed_form_equilibrium,
    rescaling_sinr_bound_check,
    mixed_population_system,
    spectral_radius,
)
from .metrics import (
    CrossGainMatrices,
    PowerState,
    build_matrices,
    compute_state,
    effective_interference,
    link_rates,
)
from .network import (
    UE,
    Channel,
    PoA,
    PoAKind,
    Scenario,
    load_scenario,
    noise_power,
    save_scenario,
    scenario_from_dict,
    scenario_to_dict,
    validate_scenario,
)
from .policies import (
    BdtPolicy,
    FixedSinrPolicy,
    GreedyPolicy,
    Observation,
    WaterfillingPolicy,
    bdt_update,
    fm_update,
    greedy_update,
    make_policy,
    rate_cap_power,
    waterfill,
)
from .scenarios import (
    HIGH_BACKHAUL,
    LIMITED_BACKHAUL,
    GenParams,
    generate,
    generate_mixed,
    worked_example,
)

__all__ = [name for name in dir() if not name.startswith("_")]
