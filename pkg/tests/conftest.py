import math

import pytest

from bubblestab import geometry


@pytest.fixture(scope="session")
def half():
    return geometry.from_r1(0.5)


@pytest.fixture(scope="session")
def small():
    return geometry.from_r1(0.2)


@pytest.fixture(scope="session")
def equal():
    return geometry.equal_from_radius(1.0)


@pytest.fixture(params=["half", "small", "equal"])
def any_base(request):
    return request.getfixturevalue(request.param)


def close(a, b, tol):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
