import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from rootldpc.construct import build_root_regular, random_regular_ldpc

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("thorough", max_examples=300, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def root400():
    return build_root_regular(400, seed=1)


@pytest.fixture(scope="session")
def root16():
    return build_root_regular(16, seed=7)


@pytest.fixture(scope="session")
def random400():
    return random_regular_ldpc(400, 3, 6, seed=2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record the verdict line of one acceptance criterion."""
    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail}"
        _CRITERIA[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[k])
