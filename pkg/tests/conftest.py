import os
import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("acceptance", max_examples=1000, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def karate():
    from rcdmap.datasets import karate as load

    return load()


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile (or load cached) numba kernels once so timings exclude JIT."""
    from rcdmap import _kernels
    from rcdmap.graph import Graph

    g = Graph.from_edges(3, [(0, 1), (1, 2)])
    _kernels.distance_sums(g.indptr, g.indices, g.n)
    _kernels.brandes(g.indptr, g.indices, g.edge_ids, g.n, g.m)
    import numpy as np

    _kernels.sir(g.indptr, g.indices, g.n, np.array([0]), 0.5, 0.5, 2, 10, 0)
