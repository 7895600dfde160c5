import numpy as np
import pytest

from arblab import make_grid


@pytest.fixture(scope="session")
def grid64():
    return make_grid(1.0, 64)


@pytest.fixture(scope="session")
def grid1k():
    return make_grid(1.0, 2**10)


def mc_tolerance(samples: np.ndarray, n_se: float = 4.0) -> float:
    """n_se Monte-Carlo standard errors of the sample mean."""
    return n_se * samples.std(ddof=1) / np.sqrt(samples.size)
