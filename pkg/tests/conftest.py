import numpy as np
import pytest

from hetcomp.model import NetworkConfig, TierConfig


def single_tier(antennas=8, pathloss=4.0, density=1e-4, feedback_bits=None, num_coordinated=0, **kw):
    bits = 3 * (antennas - 1) if feedback_bits is None else feedback_bits
    tier = TierConfig(power=1.0, antennas=antennas, pathloss=pathloss, density=density, feedback_bits=bits)
    return NetworkConfig(tiers=(tier,), num_coordinated=num_coordinated, **kw)


class FixedExponentials:
    """Stand-in generator that hands out preset exponential draws."""

    def __init__(self, values):
        self.values = np.asarray(values, dtype=float)

    def standard_exponential(self, size=None):
        return self.values.reshape(size) if size is not None else self.values


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
