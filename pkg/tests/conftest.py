import logging

import numpy as np
import pytest


@pytest.fixture(autouse=True)
def _quiet_torus_warnings(caplog):
    caplog.set_level(logging.ERROR, logger="fracheat.spde_solver")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
