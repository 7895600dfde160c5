#!/usr/bin/env python3
"""Why checking countably many directions is not enough with several assets.

Two stocks: X1 = W_{t^1} and X2 = U W_{t^1} + (t^1) with U uniform on [0, 1]
drawn once per path.  Along every fixed rational direction the Brownian part
survives and prices can stay quiet, but along the path-dependent direction
(-U, 1)/|(-U, 1)| the combination is exactly t^1: it rises deterministically,
so the quiet event has probability zero and an obvious arbitrage appears.
"""

import numpy as np

from arblab import (
    Constant,
    Deterministic,
    FromMetadata,
    NoaViolationCertificate,
    PathEnsemble,
    classify_outcomes,
    estimate_noa,
    make_grid,
    obvious_arb_from_noa_violation,
)
from arblab.models import Counterexample2dParams

grid = make_grid(1.0, 2**10)
ensemble = PathEnsemble(Counterexample2dParams(), grid, 2000, 13)
EPS = 0.5

print("== quiet-event probability along fixed directions (epsilon = 0.5) ==")
for label, direction in [
    ("e1 = (1, 0)        ", Constant((1.0, 0.0))),
    ("e2 = (0, 1)        ", Constant((0.0, 1.0))),
    ("diag = (1, 1)/sqrt2", Constant((1.0, 1.0))),
]:
    est = estimate_noa(ensemble, Deterministic(0.0), direction, EPS)
    print(f"  {label}: p_hat = {est.p_hat:.3f}  CI {np.round(est.wilson_ci, 3)}")

meta = FromMetadata("U", "counterexample_2d")
est = estimate_noa(ensemble, Deterministic(0.0), meta, EPS)
print(f"  (-U, 1)/|(-U, 1)|  : p_hat = {est.p_hat}  (deterministic rise to >= 1/sqrt(2))")

print()
print("== the arbitrage the hidden direction produces ==")
cert = NoaViolationCertificate(Deterministic(0.0), meta, EPS, 1.0, est)
verdict = classify_outcomes(obvious_arb_from_noa_violation(cert), ensemble)
print(f"gain floor 0.25/sqrt(2) = {0.25 / np.sqrt(2):.4f}")
print(f"observed minimum gain   = {verdict.min_terminal:.4f} on {verdict.n_paths} paths")
