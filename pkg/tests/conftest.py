import pytest

from extsource.curve import gaussian_curve
from extsource.density import GFunctionSet
from extsource.params import solve_parameters
from extsource.sheets import SheetTracker, branch_structure


@pytest.fixture(scope="session")
def params10():
    return solve_parameters(10.0)


@pytest.fixture(scope="session")
def curve10(params10):
    return params10.curve()


@pytest.fixture(scope="session")
def branch10(curve10):
    return branch_structure(curve10)


@pytest.fixture(scope="session")
def tracker10(curve10, branch10):
    return SheetTracker(curve10, branch10)


@pytest.fixture(scope="session")
def gset10(curve10, branch10, tracker10):
    return GFunctionSet(curve10, branch10, tracker10)


@pytest.fixture(scope="session")
def gauss2():
    c = gaussian_curve(2.0)
    return c, branch_structure(c)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash.setdefault(_ACCEPTANCE_KEY, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
