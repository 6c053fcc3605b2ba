import numpy as np
import pytest

from junction.models.grid_models import Grid
from junction.services.model_service import validate_params


@pytest.fixture
def coarse_grid():
    return Grid(n_intervals=200)


@pytest.fixture
def grid():
    return Grid(n_intervals=1000)


@pytest.fixture
def planck_params():
    return validate_params(nu=0.5, tau_plus=0.6, c0=1.0 / 3.0, delta_j=0.0)


@pytest.fixture
def smooth_params():
    """Moderate case with a smooth field and a quickly converging series."""
    return validate_params(nu=1.1, tau_plus=0.6, c0=1.0 / 3.0, delta_j=-1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
