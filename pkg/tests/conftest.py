import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from dgsnmf.core import HyperCube  # noqa: E402


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_cube(rng, width, height, channels):
    return HyperCube(rng.uniform(0.0, 1.0, size=(channels, width * height)), width, height)


@pytest.fixture
def small_cube(rng):
    return random_cube(rng, 6, 5, 4)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for the terminal summary, then assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(name, ok, detail):
        lines.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        assert ok, f"{name}: {detail}"

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance")
        for line in lines:
            terminalreporter.write_line(line)
