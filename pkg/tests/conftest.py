from __future__ import annotations

import os

import pytest
from hypothesis import HealthCheck, settings

from pencil_lab.gf import FieldSpec, get_field

settings.register_profile(
    "default",
    max_examples=60,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
    derandomize=True,
)
settings.register_profile("thorough", max_examples=500, deadline=None)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session")
def F7():
    return get_field(FieldSpec.standard(7))


@pytest.fixture(scope="session")
def F9():
    return get_field(FieldSpec.standard(3, 2))


@pytest.fixture(scope="session")
def F49():
    return get_field(FieldSpec.standard(7, 2))


ACCEPTANCE_KEY = pytest.StashKey[dict]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    """criterion number -> (passed, title); printed once at the end of the run."""
    return request.config.stash.setdefault(ACCEPTANCE_KEY, {})


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    log = config.stash.get(ACCEPTANCE_KEY, None)
    if not log:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(log):
        passed, title = log[n]
        terminalreporter.write_line(f"criterion {n:>2}: {'PASS' if passed else 'FAIL'}  {title}")
