import pytest

from acceptance_log import RESULTS
from ridehail import MarketParams, Quadratic


@pytest.fixture
def quad():
    return Quadratic(0.1, 9.0)


@pytest.fixture
def mixed_market():
    return MarketParams.from_e(2.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(RESULTS):
        passed, title, detail = RESULTS[number]
        terminalreporter.write_line(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}  [{detail}]")
