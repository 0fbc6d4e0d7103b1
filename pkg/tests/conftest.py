import numpy as np
import pytest
from hypothesis import strategies as st

from predmatch.core import Instance
from predmatch.generators import figure1_instance, sample_uniform

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def fig1():
    return figure1_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_instance(n, seed):
    return sample_uniform(n, seed)


@st.composite
def instances(draw, min_n=1, max_n=6):
    n = draw(st.integers(min_n, max_n))
    perm = st.permutations(list(range(n)))
    rp = [draw(perm) for _ in range(n)]
    hp = [draw(perm) for _ in range(n)]
    return Instance(rp, hp)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
