import numpy as np
import pytest

from mdiew import catalog


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(params=catalog.NAMES)
def scenario(request):
    return catalog.load(request.param)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS, report_line

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(report_line(n))
