import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from conicp3p.synthetic import gen_batch

settings.register_profile(
    "default",
    deadline=None,
    max_examples=200,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("stress", parent=settings.get_profile("default"), max_examples=20_000)
settings.load_profile("default")


@pytest.fixture(scope="session")
def batch():
    """2000 seeded ground-truth trials shared across modules."""
    return gen_batch(20240601, 2000)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
