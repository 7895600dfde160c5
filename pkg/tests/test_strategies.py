import io

import numpy as np
import pytest

from arblab import (
    Constant,
    Deterministic,
    FirstCrossing,
    Leg,
    LegOrderingError,
    PathEnsemble,
    SamplePath,
    SimpleStrategy,
    WealthCrossing,
    admissibility_level,
    classify_outcomes,
    eval_wealth,
    example_strategies,
    gen_bubble,
    gen_drifted_exp,
    make_grid,
    strategy_from_dict,
)
from arblab.models import BubbleParams, MixedFbsParams
from arblab.paths import readonly
from arblab.strategies import terminal_wealth_direct

SQRT_2PI_INV = 0.3989422804014327


def _path(grid, series):
    return SamplePath(grid, readonly(np.asarray(series, dtype=float)[None, :].copy()),
                      "log-price")


def test_empty_strategy_is_constant_capital(grid64):
    p = _path(grid64, np.linspace(0, 1, 65))
    w = eval_wealth(SimpleStrategy((), 2.5), p)
    assert np.all(w.values == 2.5)
    assert w.terminal == 2.5


def test_bubble_short_gains_initial_price_exactly(grid1k):
    strat = example_strategies("bubble", horizon=1.0)
    for seed in range(25):
        w = eval_wealth(strat, gen_bubble(grid1k, seed=seed))
        assert abs(w.terminal - SQRT_2PI_INV) <= 1e-12


def test_same_index_leg_contributes_zero(grid64):
    p = _path(grid64, np.linspace(1, 2, 65))
    leg = Leg(Deterministic(0.5), Deterministic(0.5), Constant((1.0,)), 3.0)
    w = eval_wealth(SimpleStrategy((leg,), 0.0), p)
    assert np.all(w.values == 0.0)


def test_leg_ordering_violation_names_path_and_leg(grid64):
    p = _path(grid64, np.linspace(1, 2, 65))
    bad = Leg(Deterministic(0.5), Deterministic(0.25), Constant((1.0,)))
    with pytest.raises(LegOrderingError, match="leg 0"):
        eval_wealth(SimpleStrategy((bad,), 0.0), p)
    overlapping = SimpleStrategy((
        Leg(Deterministic(0.0), Deterministic(0.5), Constant((1.0,))),
        Leg(Deterministic(0.25), Deterministic(0.75), Constant((1.0,))),
    ))
    with pytest.raises(LegOrderingError, match="leg 1"):
        eval_wealth(overlapping, p)


def test_wealth_constant_between_legs(grid64):
    p = _path(grid64, np.sin(np.linspace(0, 6, 65)) + 2.0)
    strat = SimpleStrategy((
        Leg(Deterministic(0.1), Deterministic(0.3), Constant((1.0,))),
        Leg(Deterministic(0.6), Deterministic(0.8), Constant((-1.0,)), 2.0),
    ))
    w = eval_wealth(strat, p)
    i1, i2 = grid64.index_at(0.3), grid64.index_at(0.6)
    assert np.all(w.values[i1:i2 + 1] == w.values[i1])
    i3 = grid64.index_at(0.8)
    assert np.all(w.values[i3:] == w.values[i3])


def test_admissibility_level():
    grid = make_grid(1.0, 4)
    w_up = eval_wealth(SimpleStrategy((Leg(Deterministic(0.0), Deterministic(1.0),
                                           Constant((1.0,))),)),
                       _path(grid, [0, 1, 2, 3, 4]))
    assert admissibility_level(w_up) == 0.0
    w_dip = eval_wealth(SimpleStrategy((Leg(Deterministic(0.0), Deterministic(1.0),
                                            Constant((1.0,))),)),
                        _path(grid, [0.0, -0.3, 0.1, 0.4, 0.5]))
    assert admissibility_level(w_dip) == pytest.approx(0.3)


def test_small_time_strategy_is_zero_admissible_at_grid_scale():
    # long from 0 until the first drop below the start or t = 0.01
    grid = make_grid(0.01, 2**12)
    strat = example_strategies("drifted_exp", cap_count=100)
    eps_grid = grid.dt**0.4
    for seed in range(50):
        w = eval_wealth(strat, gen_drifted_exp(grid, 0.25, seed=seed))
        assert admissibility_level(w) <= eps_grid


def test_telescoping_identity_random_cases(grid64):
    rng = np.random.default_rng(99)
    up = Constant((1.0,))
    for case in range(300):
        vals = np.cumsum(rng.standard_normal(65)) * 0.1 + 5.0
        p = _path(grid64, vals)
        times = np.sort(rng.uniform(0, 1, size=4))
        legs = (
            Leg(Deterministic(times[0]), Deterministic(times[1]), up, rng.uniform(-2, 2)),
            Leg(Deterministic(times[2]), Deterministic(times[3]), up, rng.uniform(-2, 2)),
        )
        strat = SimpleStrategy(legs, 0.0)
        w = eval_wealth(strat, p)
        direct = terminal_wealth_direct(strat, p)
        assert abs(w.terminal - direct) <= 1e-12 * max(1.0, abs(direct))


def test_classify_bubble_examples(grid1k):
    # the flag needs the negative-fraction Wilson upper bound below the
    # threshold, so small ensembles pair with a proportionate threshold
    ens = PathEnsemble(BubbleParams(), grid1k, 400, 3)
    v = classify_outcomes(example_strategies("bubble"), ens, neg_threshold=0.01)
    assert v.p_hat_positive == 1.0 and v.p_hat_negative == 0.0
    assert v.min_terminal == pytest.approx(SQRT_2PI_INV, abs=1e-12)
    assert v.max_terminal == pytest.approx(SQRT_2PI_INV, abs=1e-12)
    assert v.empirical_arbitrage


def test_classify_zero_strategy(grid1k):
    ens = PathEnsemble(BubbleParams(), grid1k, 50, 3)
    v = classify_outcomes(SimpleStrategy((), 0.0), ens)
    assert v.p_hat_positive == 0.0 and v.p_hat_negative == 0.0
    assert v.min_terminal == 0.0 and v.min_running == 0.0
    assert not v.empirical_arbitrage


def test_classify_martingale_long_is_not_arbitrage():
    grid = make_grid(1.0, 256)
    model = MixedFbsParams(x0=1.0, sigma=0.2, eta=0.0, nu=-0.02)  # exponential martingale
    strat = SimpleStrategy((Leg(Deterministic(0.0), Deterministic(1.0), Constant((1.0,))),))
    v = classify_outcomes(strat, PathEnsemble(model, grid, 2000, 5))
    assert v.p_hat_negative > 0.05 and v.p_hat_positive > 0.05
    assert not v.empirical_arbitrage


def test_classify_rejects_mixed_grids():
    a = list(PathEnsemble(BubbleParams(), make_grid(1.0, 64), 2, 1))
    b = list(PathEnsemble(BubbleParams(), make_grid(1.0, 128), 2, 1))
    with pytest.raises(ValueError, match="one grid"):
        classify_outcomes(example_strategies("bubble"), a + b)


def test_scale_equivariance_of_wealth_and_fractions(grid64):
    rng = np.random.default_rng(11)
    strat = SimpleStrategy((
        Leg(Deterministic(0.0), Deterministic(0.5), Constant((1.0,)), 1.3),
        Leg(Deterministic(0.5), Deterministic(1.0), Constant((-1.0,)), 0.7),
    ))
    paths = [_path(grid64, np.cumsum(rng.standard_normal(65)) * 0.2 + 4.0)
             for _ in range(64)]
    base = classify_outcomes(strat, paths)
    for lam in (0.1, 2.0, 17.5):
        scaled = strat.scaled(lam)
        for p in paths[:8]:
            w0 = eval_wealth(strat, p).values
            w1 = eval_wealth(scaled, p).values
            assert np.allclose(w1, lam * w0, rtol=1e-12, atol=1e-14)
        v = classify_outcomes(scaled, paths)
        assert v.p_hat_positive == base.p_hat_positive
        assert v.p_hat_negative == base.p_hat_negative


def test_wealth_crossing_rule(grid64):
    vals = np.concatenate([np.linspace(5.0, 4.0, 33), np.linspace(4.0, 6.0, 32)])
    p = _path(grid64, vals)
    long_all = SimpleStrategy((Leg(Deterministic(0.0), Deterministic(1.0), Constant((1.0,))),))
    rule = WealthCrossing(long_all, -0.5, Deterministic(0.0), side="below", strict=False)
    r = rule.evaluate(p)
    w = eval_wealth(long_all, p)
    assert r.triggered and w.values[r.index] <= -0.5
    assert np.all(w.values[1:r.index] > -0.5)


def test_strategy_round_trip_and_wealth_csv(grid64):
    strat = SimpleStrategy((
        Leg(Deterministic(0.0),
            FirstCrossing(Constant((1.0,)), 0.3, Deterministic(0.0), relative=True),
            Constant((1.0,)), 2.0),
    ), initial_capital=0.5)
    clone = strategy_from_dict(strat.to_dict())
    assert clone == strat
    p = _path(grid64, np.linspace(0, 1, 65))
    buf = io.StringIO()
    eval_wealth(strat, p).to_csv(buf)
    lines = buf.getvalue().strip().splitlines()
    assert lines[0] == "t,V"
    assert len(lines) == 66
    t0, v0 = (float(x) for x in lines[1].split(","))
    assert (t0, v0) == (0.0, 0.5)
