import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nordenkit.connection import levi_civita  # noqa: E402
from nordenkit.example import build_example, random_w10  # noqa: E402
from nordenkit.norden import norden_data  # noqa: E402


@pytest.fixture(scope="session")
def example():
    m = build_example(1.0, 2.0)
    lc = levi_civita(m)
    return m, lc, norden_data(m, lc)


@pytest.fixture(scope="session")
def w10_dim4():
    m = random_w10(2, 3)
    lc = levi_civita(m)
    return m, lc, norden_data(m, lc)


@pytest.fixture(scope="session")
def w10_dim6():
    m = random_w10(3, 1)
    lc = levi_civita(m)
    return m, lc, norden_data(m, lc)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in test_acceptance.RESULTS:
            terminalreporter.write_line(line)
