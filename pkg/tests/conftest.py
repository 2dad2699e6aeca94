import numpy as np
import pytest

from hawkesnet import EventData, ModelParams, SimConfig, simulate


@pytest.fixture
def small_params():
    rng = np.random.default_rng(12)
    d = 3
    return ModelParams(
        mu=rng.uniform(0.1, 0.5, d),
        A=rng.uniform(0.0, 0.2, (d, d)),
        alpha=rng.uniform(0.5, 2.0, (d, d)),
    )


@pytest.fixture
def small_data(small_params):
    return simulate(SimConfig(params=small_params, horizon_T=30.0, seed=1))


def random_instance(seed, d=2, horizon=25.0, max_mu=0.5):
    """A small simulated dataset with random per-pair decays."""
    rng = np.random.default_rng(seed)
    params = ModelParams(
        mu=rng.uniform(0.05, max_mu, d),
        A=rng.uniform(0.0, 0.25, (d, d)),
        alpha=rng.uniform(0.5, 2.0, (d, d)),
    )
    data = simulate(SimConfig(params=params, horizon_T=horizon, seed=seed + 1))
    return params, data
