import numpy as np
import pytest

from arblab import make_grid, grid_tolerance


def test_make_grid_basic():
    g = make_grid(1.0, 4)
    assert np.array_equal(g.times, [0.0, 0.25, 0.5, 0.75, 1.0])
    assert g.dt == 0.25


def test_make_grid_minimal():
    g = make_grid(2.0, 1)
    assert np.array_equal(g.times, [0.0, 2.0])


@pytest.mark.parametrize("horizon,steps", [(1.0, 0), (0.0, 4), (-1.0, 4), (1.0, -3)])
def test_make_grid_rejects_bad_args(horizon, steps):
    with pytest.raises(ValueError):
        make_grid(horizon, steps)


def test_grid_endpoints_exact():
    g = make_grid(0.7, 997)
    assert g.times[0] == 0.0
    assert g.times[-1] == 0.7
    assert np.all(np.diff(g.times) > 0)


def test_index_at_snaps_and_ceils():
    g = make_grid(1.0, 4)
    assert g.index_at(0.5) == 2
    assert g.index_at(0.0) == 0
    assert g.index_at(0.6) == 3  # next grid point at or after t
    assert g.index_at(2.0) == 4  # clipped to horizon


def test_times_are_immutable():
    g = make_grid(1.0, 4)
    with pytest.raises(ValueError):
        g.times[0] = 1.0


def test_grid_tolerance_scales_with_dt():
    coarse = grid_tolerance(make_grid(1.0, 2**10))
    fine = grid_tolerance(make_grid(1.0, 2**14))
    assert fine < coarse
    assert fine == pytest.approx((2.0**-14) ** 0.4)
