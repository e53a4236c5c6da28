import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from imcf.config import load_scenario  # noqa: E402
from imcf.flow import run_flow  # noqa: E402
from imcf.hypersurface import CauchyGrid  # noqa: E402
from imcf.spacetime import ScaleFactor, WarpedSpacetime  # noqa: E402

HALF_PI = 0.5 * np.pi
TWO_PI = 2.0 * np.pi

# scenarios whose initial data pass the admission gate
RUNNABLE = ("cos_n1_homogeneous", "cos_n1_perturbed", "cos_n1_singularity", "cos_n2", "cos_exp")

ACCEPTANCE_LINES: list[str] = []


def cos_spacetime(n=1):
    return WarpedSpacetime(-HALF_PI, HALF_PI, n, ScaleFactor.cos(), (TWO_PI,) * n)


def flat_spacetime(n=1):
    return WarpedSpacetime(-1.0, 1.0, n, ScaleFactor.constant(1.0), (TWO_PI,) * n)


@pytest.fixture
def cos1():
    return cos_spacetime(1)


@pytest.fixture
def cos2():
    return cos_spacetime(2)


@pytest.fixture
def grid1(cos1):
    return CauchyGrid.for_spacetime(cos1, 64)


class _RunCache:
    """Bundled scenarios integrated once per session, with wall times."""

    def __init__(self):
        self._runs = {}

    def get(self, name):
        if name not in self._runs:
            config = load_scenario(name)
            start = time.perf_counter()
            traj = run_flow(config)
            self._runs[name] = (config, traj, time.perf_counter() - start)
        return self._runs[name]


@pytest.fixture(scope="session")
def bundled_runs():
    return _RunCache()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
