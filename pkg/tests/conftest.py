import os
import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from abtcore.graph import BipartiteGraph, load_edge_list

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def demo() -> BipartiteGraph:
    with open(DATA / "demo_graph.txt") as fh:
        return load_edge_list(fh)


@st.composite
def bipartite_graphs(draw, max_side: int = 7, max_edges: int = 30):
    nu = draw(st.integers(1, max_side))
    nl = draw(st.integers(1, max_side))
    cells = draw(st.sets(st.tuples(st.integers(0, nu - 1), st.integers(0, nl - 1)), max_size=max_edges))
    return BipartiteGraph(nu, nl, sorted(cells))


# One line per acceptance criterion, echoed in the terminal summary.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
