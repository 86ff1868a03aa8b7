import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings

sys.path.insert(0, str(Path(__file__).parent))

from cablescaffold.rig import RigConfig  # noqa: E402
from cablescaffold.scenarios import simulation_trip  # noqa: E402
from cablescaffold.sim import run  # noqa: E402

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@pytest.fixture(scope="session")
def rig():
    return RigConfig()


@pytest.fixture(scope="session")
def trip_telemetry():
    """Closed-loop run of the simulated diagonal trip, shared across tests."""
    return run(simulation_trip())


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE_KEY, [])

    def record(number: int, passed: bool, detail: str):
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {detail}"
        lines.append((number, line))
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
