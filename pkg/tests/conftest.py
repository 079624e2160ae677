import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from liepairs import algebra_from_name, catalog_pair

settings.register_profile(
    "default",
    max_examples=30,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"

_ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def exact_values():
    return json.loads((FIXTURES / "exact_instances.json").read_text())


@pytest.fixture(scope="session")
def sl2():
    return algebra_from_name("sl2R")


@pytest.fixture(scope="session")
def su2():
    return algebra_from_name("su2")


@pytest.fixture(scope="session")
def sl3():
    return algebra_from_name("sl3R")


@pytest.fixture
def heisenberg():
    return catalog_pair("heisenberg-sl3")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(_ACCEPTANCE_KEY, {})
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(log):
        ok, detail = log[number]
        terminalreporter.write_line(f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
