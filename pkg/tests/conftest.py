import math

import numpy as np
import pytest
from hypothesis import strategies as st

from cdbound.generators import default_corpus, random_connected_graph
from cdbound.graph import WeightedGraph
from cdbound.resistance import candidate_pairs, solve_pairs

CORPUS = default_corpus(seed=0)
DIMENSIONS = (2.0, 5.0, math.inf)


@pytest.fixture(scope="session")
def corpus():
    return CORPUS


@pytest.fixture(scope="session")
def resistance_cache():
    """All-pairs resistance solutions per corpus graph, solved once per session."""
    cache = {}

    def get(name):
        if name not in cache:
            G = CORPUS[name]
            cache[name] = solve_pairs(G, candidate_pairs(G)[0], 1e-8)
        return cache[name]

    return get


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@st.composite
def small_graphs(draw, max_size=7, weighted=True):
    """Connected graphs with random weights and measure."""
    size = draw(st.integers(2, max_size))
    seed = draw(st.integers(0, 2**31 - 1))
    p = draw(st.floats(0.0, 1.0))
    rule = draw(st.sampled_from(["unit", "degree"]))
    return random_connected_graph(size, p, seed, weighted=weighted and draw(st.booleans()), measure_rule=rule)


def single_edge(w=1.0, m=(1.0, 1.0)) -> WeightedGraph:
    return WeightedGraph(["a", "b"], [[0.0, w], [w, 0.0]], list(m))


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if REPORT:
        terminalreporter.section("acceptance criteria")
        for line in REPORT:
            terminalreporter.write_line(line)
