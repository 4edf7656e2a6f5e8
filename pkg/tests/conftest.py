"""Shared helpers for the test suite."""
import os
import sys

import numpy as np
import networkx as nx
import pytest

from netfolio.corr import CorrelationMatrix
from netfolio.graph import WeightedGraph

DATA_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def pytest_terminal_summary(terminalreporter):
    """Replay the acceptance-criterion pass/fail lines after the run."""
    mod = sys.modules.get("test_acceptance") or sys.modules.get(
        "tests.test_acceptance"
    )
    results = getattr(mod, "RESULTS", None)
    if results:
        terminalreporter.section("acceptance criteria")
        for line in results:
            terminalreporter.write_line(line)


def random_correlation(rng, n, distinct=False):
    """Random positive-definite correlation matrix via normalized Gram form."""
    x = rng.normal(size=(n + 5, n))
    c = np.corrcoef(x, rowvar=False)
    if distinct:
        # nudge off-diagonal entries apart so edge ordering is strict
        iu = np.triu_indices(n, 1)
        jitter = rng.uniform(-1e-9, 1e-9, size=len(iu[0]))
        c[iu] += jitter
        c.T[iu] += jitter
        np.fill_diagonal(c, 1.0)
    return c


def corr_of(values, labels=None):
    n = values.shape[0]
    labels = labels or [f"S{k:02d}" for k in range(n)]
    return CorrelationMatrix(tuple(labels), np.asarray(values, dtype=float))


def graph_from_nx(G, weight=1.0, labels=None):
    """WeightedGraph from a networkx graph; unit weights unless given."""
    nodes = sorted(G.nodes())
    index = {v: k for k, v in enumerate(nodes)}
    labels = labels or [f"v{k:02d}" for k in range(len(nodes))]
    edges = {}
    for u, v, data in G.edges(data=True):
        w = data.get("weight", weight)
        edges[(index[u], index[v])] = float(w)
    return WeightedGraph(labels, edges)


def nx_from_graph(g):
    G = nx.Graph()
    G.add_nodes_from(range(g.n_vertices))
    for (i, j), w in g.edges.items():
        G.add_edge(i, j, weight=w)
    return G


def random_connected_graph(rng, n, p=0.5):
    """Connected Erdos-Renyi graph with uniform random weights."""
    while True:
        G = nx.gnp_random_graph(n, p, seed=int(rng.integers(2**31)))
        if n == 1 or nx.is_connected(G):
            break
    edges = {(u, v): float(rng.uniform(0.05, 1.0)) for u, v in G.edges()}
    return WeightedGraph([f"v{k:02d}" for k in range(n)], edges)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
