#!/usr/bin/env python3
"""Backhaul-capacity sweep (desk-scale fig4): rate and power vs. scale L.

With generous backhaul every policy spends the full budget and the rates
coincide; once backhaul becomes the bottleneck, the backhaul-state policy
delivers the same network rate at a fraction of the transmit power.
"""

import duplink as dl
from duplink.engine import SweepPoint, aggregate, monte_carlo

SCALES = (0.1, 0.2, 0.3, 0.5, 1.0, 2.0)
TRIALS = 30

points = [SweepPoint("backhaul_scale", L, dl.GenParams(n_ues=21, backhaul_scale=L))
          for L in SCALES]
rows = monte_carlo(points, ("bdt", "wf", "greedy"), trials=TRIALS, seeds=0,
                   max_iter=50)
summary = {(r["sweep_value"], r["policy"]): r for r in aggregate(rows)}

print(f"{TRIALS} trials per point, 21 UEs, 50 iterations\n")
print("  L    | rate bdt | rate wf | rate greedy | power bdt | power wf | power greedy")
print("-" * 82)
for L in SCALES:
    rate = [summary[(L, p)]["eta_n_normalized_mean"] for p in ("bdt", "wf", "greedy")]
    power = [summary[(L, p)]["avg_total_power_mean"] for p in ("bdt", "wf", "greedy")]
    print(f" {L:4.2f}  |  {rate[0]:6.2f}  | {rate[1]:6.2f}  |   {rate[2]:6.2f}    |"
          f"   {power[0]:5.3f}   |  {power[1]:5.3f}   |   {power[2]:5.3f}")

print("\n(rate = network rate normalized by total bandwidth in use, bit/s/Hz;")
print(" power = average per-UE transmit power, watts)")
