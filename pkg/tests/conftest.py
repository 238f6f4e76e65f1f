import pytest

from ptcoms.params import paper_defaults
from tests.acceptance_log import LINES as ACCEPTANCE_LINES


@pytest.fixture
def defaults():
    return paper_defaults()


@pytest.fixture
def pt(defaults):
    """Balanced gain and loss at the exceptional point J = kappa_a / 2."""
    return defaults.replace(J=0.5 * defaults.kappa_a)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
