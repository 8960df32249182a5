import numpy as np
import pytest

from topopaths.env import Bounds, Environment, Sphere


@pytest.fixture
def box10():
    return Bounds((0, 0, 0), (10, 10, 10))


@pytest.fixture
def empty_env(box10):
    return Environment(box10)


@pytest.fixture
def sphere_env(box10):
    return Environment(box10, (Sphere((5, 5, 5), 1.0),))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record a one-line acceptance verdict; lines are printed after the run."""
    def emit(name, ok, detail):
        ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
        return ok
    return emit


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
