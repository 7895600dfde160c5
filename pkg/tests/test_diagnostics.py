import numpy as np
import pytest

from arblab import (
    Constant,
    Deterministic,
    FromMetadata,
    PathEnsemble,
    SamplePath,
    crossing_times,
    estimate_noa,
    gen_brownian,
    gen_fbm,
    holder_estimate,
    lil_scaling,
    make_grid,
    realized_qv,
    twc_statistic,
)
from arblab.models import BubbleParams, Counterexample2dParams, DriftedExpParams, MixedFbsParams
from arblab.paths import readonly, scaled
from arblab.seeds import SeedInfo

SQRT_2PI_INV = 0.3989422804014327
EXP_BM = MixedFbsParams(x0=1.0, sigma=0.2, eta=0.0, nu=-0.02)


def _path(grid, rows, **kw):
    return SamplePath(grid, readonly(np.asarray(rows, dtype=float).copy()), "log-price", **kw)


class TestEstimateNoa:
    def test_bubble_short_direction_never_quiet(self, grid1k):
        ens = PathEnsemble(BubbleParams(), grid1k, 500, 3)
        est = estimate_noa(ens, Deterministic(0.0), Constant((-1.0,)), SQRT_2PI_INV)
        # the collapse drives -(X_t - X_0) up to X_0 = epsilon on every path
        assert est.p_hat == 0.0
        assert not est.degenerate
        assert est.n_sigma_before_horizon == 500

    def test_counterexample_metadata_direction_exact_zero(self):
        grid = make_grid(1.0, 512)
        ens = PathEnsemble(Counterexample2dParams(), grid, 300, 5)
        est = estimate_noa(ens, Deterministic(0.0),
                           FromMetadata("U", "counterexample_2d"), 0.5)
        assert est.p_hat == 0.0

    def test_counterexample_rational_directions_have_mass(self):
        grid = make_grid(1.0, 512)
        dirs = [Constant((1.0, 0.0)), Constant((0.0, 1.0)),
                Constant((1.0, 1.0))]
        for d in dirs:
            ens = PathEnsemble(Counterexample2dParams(), grid, 500, 5)
            est = estimate_noa(ens, Deterministic(0.0), d, 0.5)
            assert est.wilson_ci[0] > 0.0

    def test_martingale_has_quiet_mass(self):
        grid = make_grid(1.0, 512)
        ens = PathEnsemble(EXP_BM, grid, 2000, 7)
        est = estimate_noa(ens, Deterministic(0.0), Constant((1.0,)), 0.1)
        assert est.wilson_ci[0] > 0.0
        assert est.mirrored_p_hat > 0.0

    def test_epsilon_must_be_positive(self, grid64):
        ens = PathEnsemble(BubbleParams(), make_grid(1.0, 64), 5, 1)
        with pytest.raises(ValueError):
            estimate_noa(ens, Deterministic(0.0), Constant((1.0,)), 0.0)

    def test_degenerate_when_sigma_never_starts(self, grid64):
        ens = PathEnsemble(BubbleParams(), make_grid(1.0, 64), 20, 1)
        est = estimate_noa(ens, Deterministic(5.0), Constant((1.0,)), 0.1)
        assert est.degenerate and est.p_hat == 0.0

    def test_mirror_symmetry_exact(self):
        grid = make_grid(1.0, 256)
        paths = list(PathEnsemble(EXP_BM, grid, 100, 9))
        flipped = [scaled(p, -1.0) for p in paths]
        for eps in (0.05, 0.2):
            a = estimate_noa(paths, Deterministic(0.0), Constant((1.0,)), eps)
            b = estimate_noa(flipped, Deterministic(0.0), Constant((-1.0,)), eps)
            assert a.p_hat == b.p_hat
            assert a.mirrored_p_hat == b.mirrored_p_hat

    def test_monotone_in_epsilon(self):
        grid = make_grid(1.0, 256)
        paths = list(PathEnsemble(EXP_BM, grid, 300, 11))
        eps_grid = [0.02, 0.05, 0.1, 0.2, 0.5]
        hats = [estimate_noa(paths, Deterministic(0.0), Constant((1.0,)), e).p_hat
                for e in eps_grid]
        assert all(a <= b for a, b in zip(hats, hats[1:]))


class TestCrossingTimes:
    def test_immediate_up_crossing(self):
        grid = make_grid(1.0, 4)
        p = _path(grid, [[1.0, 1.2, 0.8, 0.9, 1.1]])
        ct = crossing_times(p, 0, Constant((1.0,)))
        assert (ct.up_index, ct.up_triggered) == (1, True)
        assert (ct.down_index, ct.down_triggered) == (2, True)

    def test_monotone_path_never_crosses_down(self):
        grid = make_grid(1.0, 4)
        p = _path(grid, [[1.0, 1.1, 1.2, 1.3, 1.4]])
        ct = crossing_times(p, 0, Constant((1.0,)))
        assert ct.up_triggered and ct.up_index == 1
        assert not ct.down_triggered and ct.down_index == grid.steps

    def test_matches_bruteforce_scan(self):
        grid = make_grid(1.0, 128)
        rng = np.random.default_rng(17)
        for case in range(1000):
            vals = np.cumsum(rng.standard_normal(129))[None, :] * 0.1
            p = _path(grid, vals)
            s = int(rng.integers(0, 100))
            ct = crossing_times(p, s, Constant((1.0,)))
            ref = vals[0, s]
            up = next((i for i in range(s, 129) if vals[0, i] > ref), None)
            dn = next((i for i in range(s, 129) if vals[0, i] < ref), None)
            assert ct.up_index == (up if up is not None else 128)
            assert ct.up_triggered == (up is not None)
            assert ct.down_index == (dn if dn is not None else 128)
            assert ct.down_triggered == (dn is not None)

    def test_up_crossing_is_strict_and_after_sigma(self):
        grid = make_grid(1.0, 256)
        for p in PathEnsemble(EXP_BM, grid, 100, 3):
            ct = crossing_times(p, 10, Constant((1.0,)))
            if ct.up_triggered:
                assert ct.up_index >= 10
                assert p.values[0, ct.up_index] > p.values[0, 10]


class TestTwcStatistic:
    def test_brownian_crosses_back_quickly(self):
        grid = make_grid(1.0, 2**12)
        ens = PathEnsemble(EXP_BM, grid, 1000, 5)
        curve = twc_statistic(ens, Deterministic(0.0), Constant((1.0,)), [0.01])
        assert curve.estimates[0] > 0.9
        # a discrete walk stays below its start for the whole horizon on a
        # small of fraction of paths, so conditioning loses a little mass
        assert curve.n_conditioning > 950

    def test_drifted_exp_does_not_cross_back(self):
        grid = make_grid(1.0, 2**12)
        ens = PathEnsemble(DriftedExpParams(0.25), grid, 1000, 5)
        curve = twc_statistic(ens, Deterministic(0.0), Constant((1.0,)), [0.01])
        assert curve.estimates[0] < 0.1

    def test_estimates_monotone_in_window(self):
        grid = make_grid(1.0, 2**10)
        ens = PathEnsemble(EXP_BM, grid, 500, 7)
        curve = twc_statistic(ens, Deterministic(0.0), Constant((1.0,)),
                              [0.1, 0.05, 0.02, 0.01])
        est = list(curve.estimates)
        assert est == sorted(est, reverse=True)

    def test_windows_must_exceed_grid_spacing(self):
        grid = make_grid(1.0, 100)
        ens = PathEnsemble(EXP_BM, grid, 5, 1)
        with pytest.raises(ValueError, match="grid spacing"):
            twc_statistic(ens, Deterministic(0.0), Constant((1.0,)), [0.005])

    def test_degenerate_conditioning_flagged(self):
        grid = make_grid(1.0, 100)
        ens = PathEnsemble(EXP_BM, grid, 5, 1)
        curve = twc_statistic(ens, Deterministic(5.0), Constant((1.0,)), [0.1])
        assert curve.degenerate

    def test_csv_emission(self):
        import io
        grid = make_grid(1.0, 256)
        ens = PathEnsemble(EXP_BM, grid, 50, 3)
        curve = twc_statistic(ens, Deterministic(0.0), Constant((1.0,)), [0.1, 0.05])
        buf = io.StringIO()
        curve.to_csv(buf)
        lines = buf.getvalue().strip().splitlines()
        assert lines[0] == "h,p_hat,ci_lo,ci_hi"
        assert len(lines) == 3


class TestRealizedQv:
    def test_black_scholes_log_price_slope(self):
        grid = make_grid(1.0, 2**12)
        ens = PathEnsemble(EXP_BM, grid, 5, 3)
        for p in ens:
            logp = _path(grid, np.log(p.values))
            rep = realized_qv(logp, 256)
            assert rep.global_slope_min_eig == pytest.approx(0.04, rel=0.10)

    def test_fbm_slope_vanishes_under_refinement(self):
        h = 0.75
        slopes = {}
        for n in (2**10, 2**14):
            p = gen_fbm(make_grid(1.0, n), h, seed=5)
            slopes[n] = realized_qv(p, 128).global_slope_min_eig
            # stationary increments make the expected slope dt^(2H-1) exactly
            expected = (1.0 / n) ** (2 * h - 1)
            assert slopes[n] == pytest.approx(expected, rel=0.3)
        assert slopes[2**14] < slopes[2**10] / 2.0

    def test_deterministic_straight_line_has_zero_min_eigenvalue(self):
        grid = make_grid(1.0, 512)
        p = _path(grid, np.vstack([2.0 * grid.times, -1.0 * grid.times]))
        rep = realized_qv(p, 64)
        assert abs(rep.global_slope_min_eig) < 1e-12
        assert abs(rep.epsilon_hat) < 1e-12

    def test_constant_path_is_exactly_zero(self):
        grid = make_grid(1.0, 512)
        p = _path(grid, np.ones((1, 513)))
        rep = realized_qv(p, 64)
        assert rep.global_slope_min_eig == 0.0

    def test_windowed_sums_add_up_to_global(self):
        grid = make_grid(1.0, 500)  # windows of 64 leave a remainder block
        rng = np.random.default_rng(5)
        p = _path(grid, np.cumsum(rng.standard_normal((2, 501)), axis=1))
        rep = realized_qv(p, 64)
        inc = np.diff(p.values, axis=1)
        whole = inc @ inc.T
        assert np.allclose(np.asarray(rep.global_matrix), whole, rtol=1e-12)

    def test_window_precondition(self):
        grid = make_grid(1.0, 64)
        p = _path(grid, np.ones((1, 65)))
        with pytest.raises(ValueError):
            realized_qv(p, 1)


class TestHolderEstimate:
    def test_linear_path_is_lipschitz(self):
        grid = make_grid(1.0, 2**12)
        p = _path(grid, 3.0 * grid.times[None, :])
        assert holder_estimate(p) == pytest.approx(1.0, abs=0.05)

    def test_brownian_half(self):
        grid = make_grid(1.0, 2**14)
        for seed in range(3):
            est = holder_estimate(gen_brownian(grid, 1, seed=seed))
            assert 0.4 <= est <= 0.6

    def test_constant_path_flagged_nan(self):
        grid = make_grid(1.0, 512)
        p = _path(grid, np.ones((1, 513)))
        assert np.isnan(holder_estimate(p))

    def test_needs_fine_grid(self):
        grid = make_grid(1.0, 128)
        p = _path(grid, grid.times[None, :])
        with pytest.raises(ValueError):
            holder_estimate(p)


class TestLilScaling:
    def test_median_in_oracle_band(self):
        # finite-range normalized maxima sit well below the asymptotic 1;
        # band frozen from an oracle run at these probes
        grid = make_grid(1.0, 2**14)
        paths = (gen_brownian(grid, 1, SeedInfo(100, i)) for i in range(500))
        rep = lil_scaling(paths)
        assert 0.5 <= rep.median <= 1.1

    def test_zero_path_gives_zero(self):
        grid = make_grid(1.0, 2**14)
        p = _path(grid, np.zeros((1, grid.steps + 1)))
        rep = lil_scaling([p])
        assert rep.maxima[0] == 0.0

    def test_positive_homogeneity(self):
        grid = make_grid(1.0, 2**14)
        p = gen_brownian(grid, 1, seed=3)
        a = lil_scaling([p]).maxima[0]
        b = lil_scaling([scaled(p, 2.0)]).maxima[0]
        assert b == pytest.approx(2.0 * a, rel=1e-12)

    def test_probe_validation(self):
        grid = make_grid(1.0, 2**10)
        p = gen_brownian(grid, 1, seed=1)
        with pytest.raises(ValueError, match="below the grid resolution"):
            lil_scaling([p], [2.0**-14, 2.0**-4])
        with pytest.raises(ValueError, match="3 decades"):
            lil_scaling([p], [2.0**-8, 2.0**-4])
        with pytest.raises(ValueError, match="1/e"):
            lil_scaling([p], [2.0**-12, 0.9])
