import numpy as np
import pytest

from probe_channel.linalg import DensityMatrix

ACCEPTANCE_LINES: list[str] = []


def ket(*amps):
    return DensityMatrix.from_ket(np.array(amps, dtype=complex))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
