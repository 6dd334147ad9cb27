import pytest

from samrot import charts, lie


@pytest.fixture(scope="session")
def result9():
    return lie.normalize(9)


@pytest.fixture(scope="session")
def result3():
    return lie.normalize(3)


@pytest.fixture(scope="session")
def unit_params():
    """Moments (1, 2, 3) rescaled so that C = 1."""
    return charts.nondimensional_params(1.0, 2.0, 3.0)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import LINES
    except ImportError:
        return
    if LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(LINES):
            terminalreporter.write_line(LINES[k])
