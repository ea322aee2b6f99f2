import pytest
import numpy as np
from hypothesis import HealthCheck, settings, strategies as st

from qcs.exp_class import random_function

settings.register_profile("default", max_examples=40, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def class_members(draw, with_modes=True):
    seed = draw(st.integers(0, 2**32 - 1))
    return random_function(np.random.default_rng(seed), with_modes=with_modes)


def complex_points(rng, n=20, re=2.0, im=1.0):
    return rng.uniform(-re, re, n) + 1j * rng.uniform(-im, im, n)


ACCEPTANCE = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[ACCEPTANCE] = {}


@pytest.fixture
def criterion(request):
    """Record one acceptance line: criterion(n, passed, detail)."""
    table = request.config.stash[ACCEPTANCE]

    def record(n: int, passed: bool, detail: str):
        line = f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {detail}"
        table[n] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(ACCEPTANCE, {})
    if table:
        terminalreporter.section("acceptance criteria")
        for n in sorted(table):
            terminalreporter.write_line(table[n])
