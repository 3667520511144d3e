import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from dreamtest import _backend

sys.path.insert(0, os.path.dirname(__file__))

settings.register_profile("default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

BACKENDS = ["numpy"] + (["numba"] if _backend.HAVE_NUMBA else [])


@pytest.fixture(params=BACKENDS)
def backend(request):
    previous = _backend.backend_name()
    _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def frozen_instance():
    """Fixed instance whose oracle values are frozen in the tests."""
    rng = np.random.default_rng(20240501)
    Z = rng.standard_normal((12, 3))
    u = rng.standard_normal(12)
    B = np.linalg.qr(rng.standard_normal((3, 2)))[0]
    f = rng.uniform(0.2, 1.0, 12)
    return Z, u, B, f


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
