import numpy as np
import pytest

from symtd.linalg import KERNELS


@pytest.fixture
def rng():
    return np.random.default_rng(20141104)


@pytest.fixture(params=sorted(KERNELS))
def backend(request):
    return request.param


def pytest_terminal_summary(terminalreporter):
    from acceptance_log import LINES

    if LINES:
        terminalreporter.section("acceptance criteria")
        for line in LINES:
            terminalreporter.write_line(line)
