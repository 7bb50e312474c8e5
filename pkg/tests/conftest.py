import numpy as np
import pytest

from fsieve.fcurve import FunctionalSeries, Grid
from fsieve.simgen import Fma1FourierSpec, fma1_fourier


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def grid():
    return Grid.uniform(21)


@pytest.fixture
def random_series(rng, grid):
    """Smooth-ish random curves: a few random Fourier modes plus noise."""
    t = grid.points
    n = 60
    base = np.stack([np.ones_like(t), np.sin(2 * np.pi * t), np.cos(2 * np.pi * t), t**2])
    coef = rng.standard_normal((n, base.shape[0])) * np.array([1.0, 0.8, 0.5, 0.3])
    return FunctionalSeries(grid, coef @ base + 0.05 * rng.standard_normal((n, t.size)))


@pytest.fixture
def fma_series():
    spec = Fma1FourierSpec(operator="identity")
    return fma1_fourier(spec, 200, np.random.default_rng(7))


# one line per acceptance criterion, printed after the run whatever the capture mode
ACCEPTANCE_LINES: dict[int, str] = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
