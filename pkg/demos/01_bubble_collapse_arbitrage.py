#!/usr/bin/env python3
"""The long-run obvious arbitrage in a collapsing local martingale.

The price X_t = exp(-W_t^2 / (2(T-t))) / sqrt(2 pi (T-t)) starts at
1/sqrt(2 pi T) > 0 and is pinned to 0 at T, so shorting one unit over (0, T]
banks the initial price on every single path.  The certified-violation
construction does the same thing mechanically: given the certificate
"prices always fall by epsilon after time 0 in direction -1", it shorts at 0
and covers at the first epsilon/2 drop, which guarantees at least epsilon/2
whenever it trades, and here it always trades.
"""

import numpy as np

from arblab import (
    Constant,
    Deterministic,
    NoaViolationCertificate,
    PathEnsemble,
    classify_outcomes,
    estimate_noa,
    example_strategies,
    make_grid,
    obvious_arb_from_noa_violation,
)
from arblab.models import BubbleParams

T, N, N_PATHS, SEED = 1.0, 2**10, 2000, 7
EPS = 1.0 / np.sqrt(2.0 * np.pi * T)

grid = make_grid(T, N)
ensemble = PathEnsemble(BubbleParams(), grid, N_PATHS, SEED)

print("== the textbook short ==")
short = example_strategies("bubble", horizon=T)
verdict = classify_outcomes(short, ensemble)
print(f"terminal wealth on every path: [{verdict.min_terminal:.12f}, {verdict.max_terminal:.12f}]")
print(f"initial price 1/sqrt(2 pi T) : {EPS:.12f}")
print(f"worst running wealth         : {verdict.min_running:.3f}  (deep!  the short is not 0-admissible)")

print()
print("== the property the model violates ==")
est = estimate_noa(ensemble, Deterministic(0.0), Constant((-1.0,)), EPS)
print(f"P(prices never fall by epsilon) estimate: {est.p_hat}  (Wilson CI {est.wilson_ci})")

print()
print("== the mechanized construction from that violation ==")
cert = NoaViolationCertificate(Deterministic(0.0), Constant((-1.0,)), EPS, T, est)
constructed = obvious_arb_from_noa_violation(cert)
v2 = classify_outcomes(constructed, ensemble)
print(f"guaranteed gain floor epsilon/2 = {EPS / 2:.6f}")
print(f"observed minimum terminal gain  = {v2.min_terminal:.6f}")
print(f"fraction of winning paths       = {v2.p_hat_positive:.3f}")
