#!/usr/bin/env python3
"""A 0-admissible arbitrage from a one-way level crossing.

X_t = exp(W_t + t^0.25): near zero the deterministic t^0.25 term overwhelms
the sqrt(t)-scale noise, so the price leaves its starting level upward
immediately and does not come back.  Buying at the first up-crossing and
selling at a 1/n gain (or on the return to the start, which essentially never
happens) earns a riskless gain on almost every path while never going
negative beyond grid overshoot.
"""

from arblab import (
    Constant,
    Deterministic,
    PathEnsemble,
    TwcViolationCertificate,
    best_effort_twc_certificate,
    classify_outcomes,
    grid_tolerance,
    make_grid,
    twc_arb,
)
from arblab.models import DriftedExpParams

T, N, N_PATHS, SEED = 0.01, 2**12, 2000, 11

grid = make_grid(T, N)
ensemble = PathEnsemble(DriftedExpParams(alpha=0.25), grid, N_PATHS, SEED)

print("== evidence that two-way crossing fails at sigma = 0 ==")
cert = best_effort_twc_certificate(ensemble, Deterministic(0.0),
                                   [Constant((1.0,)), Constant((-1.0,))], n=10)
print(f"chosen direction: {cert.direction.to_dict()['components']}")
print(f"P(up-crossing strictly before down-crossing) = "
      f"{cert.evidence['p_up_strictly_first']:.4f}")

print()
print("== the crossing strategy built from the certificate ==")
strategy = twc_arb(cert)
verdict = classify_outcomes(strategy, ensemble)
eps_grid = grid_tolerance(grid)
print(f"fraction of positive terminal wealth: {verdict.p_hat_positive:.4f}")
print(f"fraction of negative terminal wealth: {verdict.p_hat_negative:.4f}")
print(f"worst running wealth: {-verdict.admissibility_level_hat:.2e} "
      f"(grid tolerance {eps_grid:.2e})")
print(f"typical gain (min terminal on winning ensemble): {verdict.min_terminal:.4f}")

print()
print("== the same strategy on a crossing model is not an arbitrage ==")
from arblab.models import MixedFbsParams

martingale = MixedFbsParams(x0=1.0, sigma=0.2, eta=0.0, nu=-0.02)
bm_grid = make_grid(1.0, 2**12)
bm_ens = PathEnsemble(martingale, bm_grid, N_PATHS, SEED)
cert_bm = TwcViolationCertificate(Deterministic(0.0), Constant((1.0,)), 10)
v_bm = classify_outcomes(twc_arb(cert_bm), bm_ens)
print(f"negative-terminal fraction on the exponential martingale: {v_bm.p_hat_negative:.3f}")
print(f"empirical-arbitrage flag: {v_bm.empirical_arbitrage}")
