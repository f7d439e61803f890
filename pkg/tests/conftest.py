from pathlib import Path

import pytest

DATA = Path(__file__).parent / "data"


@pytest.fixture
def sample_matrix_path():
    return DATA / "sample_run_1.txt"


def nx_graph(topology):
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(range(topology.num_nodes))
    g.add_edges_from(link.pair for link in topology.links)
    return g


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
