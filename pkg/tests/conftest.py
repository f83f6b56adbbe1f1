"""Shared fixtures.  Warms the jit kernels once so timed tests measure the
algorithms, not compilation."""
from __future__ import annotations

import numpy as np
import pytest

from regimecast import _filters


@pytest.fixture(scope="session", autouse=True)
def _warm_jit_kernels():
    y = np.array([0.1, -0.2, 0.3, 0.0, 0.2, -0.1])
    w = np.ones(y.size)
    _filters.arma_weighted_loglik(y, np.array([0.5]), np.array([-0.3]), w)
    _filters.arma_filter(y, np.array([0.5, 0.1]), np.zeros(0))
    _filters.hamilton_filter(y, np.array([0.0, 1.0]), np.array([0.3, 0.5]),
                             np.array([1.0, 2.0]),
                             np.array([[0.9, 0.1], [0.2, 0.8]]),
                             np.array([0.5, 0.5]))
    yield
