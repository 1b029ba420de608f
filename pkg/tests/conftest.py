import numpy as np
import pytest

from qmetro.channels import KINDS, catalog

# acceptance verdicts collected by test_acceptance.py, echoed in the summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES, key=lambda k: (int(k.split("-")[0]), k)):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(params=KINDS)
def kind(request):
    return request.param


@pytest.fixture
def dephasing():
    return catalog("dephasing", "phase", 0.0, 0.9)
