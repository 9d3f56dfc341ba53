import numpy as np
import pytest
from hypothesis import strategies as st

from cogradio.topology import network_from_gains


def random_gains(rng, n, low=1e-4, high=0.5):
    g = rng.uniform(low, high, size=(n, n))
    np.fill_diagonal(g, 1.0)
    return g


def random_net(rng, n):
    return network_from_gains(random_gains(rng, n), rng.uniform(0.5, 2.0, size=n))


@st.composite
def nets(draw, min_n=2, max_n=8):
    n = draw(st.integers(min_n, max_n))
    seed = draw(st.integers(0, 2**32 - 1))
    return random_net(np.random.default_rng(seed), n)


@pytest.fixture
def two_pair():
    # 0.25 from pair 2 into receiver 1, 0.1 from pair 1 into receiver 2
    return network_from_gains([[1.0, 0.1], [0.25, 1.0]])


# (criterion, verdict, detail) lines collected by the acceptance suite
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, verdict, detail in sorted(ACCEPTANCE, key=lambda r: r[0]):
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {detail}")
