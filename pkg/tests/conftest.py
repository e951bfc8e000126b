import itertools

import numpy as np
import pytest
from hypothesis import strategies as st

from jigsaw import DoubleGraph, Graph


def random_double(rng: np.random.Generator, n: int, p1: float, p2: float) -> DoubleGraph:
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    red = [e for e in pairs if rng.random() < p1]
    blue = [e for e in pairs if rng.random() < p2]
    return DoubleGraph.from_edges(n, red, blue)


@st.composite
def double_graphs(draw, max_n: int = 9):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(1, n + 1), 2))
    red = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    blue = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return DoubleGraph.from_edges(n, red, blue)


@pytest.fixture
def hand_example() -> DoubleGraph:
    # red star at 1, blue path 1-2-3-4: merges {1,2}, then {1,2,3}, then all
    return DoubleGraph.from_edges(4, [(1, 2), (1, 3), (1, 4)], [(1, 2), (2, 3), (3, 4)])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
