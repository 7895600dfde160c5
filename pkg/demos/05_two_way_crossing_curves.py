#!/usr/bin/env python3
"""The two-way-crossing surrogate curve, and how grid refinement separates models.

Two-way crossing says: once the price leaves its current level it crosses
back immediately.  That is a statement about infima, so the lab measures a
surrogate: the probability that the down-crossing happens within h of the
up-crossing, given the up-crossing happened.  Crossing models (exponential
Brownian, mixed fractional Black-Scholes) push the curve toward 1 as the grid
refines; the drift-dominated exp(W_t + t^0.25) stays near 0.
"""

from arblab import Constant, Deterministic, PathEnsemble, make_grid, twc_statistic
from arblab.models import DriftedExpParams, MixedFbsParams

MODELS = {
    "exponential Brownian": MixedFbsParams(x0=1.0, sigma=0.2, eta=0.0, nu=-0.02),
    "mixed fractional BS ": MixedFbsParams(x0=1.0, sigma=0.2, eta=0.1, hurst=0.75),
    "drifted exponential ": DriftedExpParams(alpha=0.25),
}
WINDOWS = [0.04, 0.02, 0.01]
N_PATHS = 1500

print(f"{'model':24s} {'N':>6s}  " + "  ".join(f"h={h:<5g}" for h in WINDOWS))
for name, model in MODELS.items():
    for steps in (2**12, 2**14):
        ens = PathEnsemble(model, make_grid(1.0, steps), N_PATHS, 23)
        curve = twc_statistic(ens, Deterministic(0.0), Constant((1.0,)), WINDOWS)
        cells = "  ".join(f"{p:7.4f}" for p in curve.estimates)
        print(f"{name:24s} {steps:6d}  {cells}")
    print()

print("refinement pushes the first two rows toward 1 at fixed h;")
print("the drift-dominated model stays pinned near 0: its first up-move never reverts.")
