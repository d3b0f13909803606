import pytest

from wealthex import _accel, shapes
from wealthex.grid import make_grid

ACCEPTANCE_LINES = []


@pytest.fixture(params=["numba", "numpy"])
def kernel_path(request, monkeypatch):
    """Run the test once with the compiled kernels and once with numpy."""
    if request.param == "numba" and not _accel.HAVE_NUMBA:
        pytest.skip("numba not installed")
    monkeypatch.setattr(_accel, "USE_NUMBA", request.param == "numba")
    return request.param


@pytest.fixture(scope="session")
def grid():
    return make_grid(30.0, 3001)


@pytest.fixture(scope="session")
def exp_field(grid):
    return shapes.exponential_field(grid)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
