import pytest

from quatbanach.quaternion import AlgebraParams
from quatbanach.weight import InfChar, WeightChar, WeightModule

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def params5():
    return AlgebraParams(5, prec=50)


@pytest.fixture(scope="session")
def params7():
    return AlgebraParams(7, prec=40)


@pytest.fixture(scope="session")
def small_module():
    """W_{lambda,chi} at p = 5 with lambda(h) = 1, chi = 1, M = 30, 80 digits."""
    params = AlgebraParams(5, prec=80)
    return WeightModule(params, WeightChar.from_ints(5, 0, 1), InfChar.from_int(5, 1), 30)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
