import numpy as np
import pytest

import acceptance_log
from diracloc.states import gaussian_profile, make_state
from diracloc.transform import CartesianGrid, position_state_cartesian


def pytest_terminal_summary(terminalreporter):
    if acceptance_log.LINES:
        terminalreporter.section("acceptance criteria")
        for line in acceptance_log.LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(987654321)


@pytest.fixture(scope="session")
def plain_profile():
    return gaussian_profile(1.0)


@pytest.fixture(scope="session")
def state5():
    return make_state(n=5)


@pytest.fixture(scope="session")
def ps5(state5):
    # grid with Nyquist well above the n = 5 momentum support
    return position_state_cartesian(state5, CartesianGrid(128, 12.0))
