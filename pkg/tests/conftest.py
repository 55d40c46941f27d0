import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20260824)


def random_histories(rng, n, horizon=12):
    """Random valid default-fraction histories: non-decreasing, in [0, 1], m0 = 0."""
    inc = rng.random((n, 3, horizon)) * (rng.random((n, 3, horizon)) < 0.3)
    m = np.concatenate([np.zeros((n, 3, 1)), np.cumsum(inc, axis=-1)], axis=-1)
    return m / np.maximum(m[..., -1:], 1.0) / rng.uniform(1.0, 3.0, (n, 3, 1))


def indicator_paths(rng, n, horizon=12):
    """Random absorbing 0/1 indicator paths n[..., tau] for tau = 0..horizon.

    Default months are drawn uniformly from {1, ..., horizon, never}.
    """
    month = rng.integers(1, horizon + 2, n)  # horizon+1 encodes "never defaults"
    tau = np.arange(horizon + 1)
    return (tau[None, :] >= month[:, None]).astype(float)
