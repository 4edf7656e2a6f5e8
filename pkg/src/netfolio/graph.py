"""Undirected weighted graphs and PMFG extraction from correlation matrices.

The PMFG (planar maximally filtered graph) keeps the strongest correlations
that can be drawn without edge crossings: candidate edges are visited in
descending weight order and retained iff the running graph stays planar,
stopping at 3(N-2) edges.
"""
import csv

import numpy as np

from .errors import InsufficientUniverseError
from .planar import planar_check_kernel


class WeightedGraph:
    """Simple undirected weighted graph over labelled vertices.

    Edges are stored as a dict mapping (i, j) vertex-index pairs with i < j to
    a float weight. Self-loops and duplicate edges are rejected.
    """

    def __init__(self, labels, edges):
        self.labels = tuple(str(x) for x in labels)
        n = len(self.labels)
        if len(set(self.labels)) != n:
            raise ValueError("vertex labels must be unique")
        normalized = {}
        for (i, j), w in edges.items():
            if i == j:
                raise ValueError(f"self-loop on vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ValueError(f"edge ({i},{j}) out of range for {n} vertices")
            key = (i, j) if i < j else (j, i)
            if key in normalized:
                raise ValueError(f"duplicate edge {key}")
            normalized[key] = float(w)
        self.edges = normalized
        self._adj = None

    @property
    def n_vertices(self):
        return len(self.labels)

    @property
    def n_edges(self):
        return len(self.edges)

    def edge_arrays(self):
        """Edges as parallel (u, v, weight) arrays, sorted by (u, v)."""
        items = sorted(self.edges.items())
        if not items:
            z = np.zeros(0, dtype=np.int64)
            return z, z.copy(), np.zeros(0, dtype=float)
        eu = np.array([k[0] for k, _ in items], dtype=np.int64)
        ev = np.array([k[1] for k, _ in items], dtype=np.int64)
        w = np.array([w for _, w in items], dtype=float)
        return eu, ev, w

    def adjacency(self):
        """Dense symmetric weight matrix; zero where no edge. Cached."""
        if self._adj is None:
            n = self.n_vertices
            a = np.zeros((n, n))
            for (i, j), w in self.edges.items():
                a[i, j] = w
                a[j, i] = w
            self._adj = a
        return self._adj

    def strengths(self):
        """Weighted degree (sum of incident edge weights) per vertex."""
        return self.adjacency().sum(axis=1)

    def degrees(self):
        deg = np.zeros(self.n_vertices, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def is_connected(self):
        n = self.n_vertices
        if n == 0:
            return True
        nbrs = [[] for _ in range(n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        seen = np.zeros(n, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in nbrs[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        return bool(seen.all())

    def map_weights(self, fn):
        """New graph with the same topology and weights fn(w)."""
        return WeightedGraph(self.labels, {k: fn(w) for k, w in self.edges.items()})

    def to_networkx(self):
        import networkx as nx

        g = nx.Graph()
        g.add_nodes_from(range(self.n_vertices))
        for (i, j), w in self.edges.items():
            g.add_edge(i, j, weight=w)
        return g


class PmfgGraph(WeightedGraph):
    """A PMFG together with provenance of its construction.

    ``rejected_edges`` counts the candidate edges that were visited and failed
    the planarity test before the 3(N-2) target was reached; candidates never
    visited (because the target was already met) are not counted.
    """

    def __init__(self, labels, edges, source_id="", rejected_edges=0):
        super().__init__(labels, edges)
        self.source_id = str(source_id)
        self.rejected_edges = int(rejected_edges)


def is_planar(g):
    """True iff the graph embeds in the plane (no embedding is produced)."""
    eu, ev, _ = g.edge_arrays()
    return bool(planar_check_kernel(g.n_vertices, eu, ev))


def build_pmfg(corr, source_id=""):
    """Extract the PMFG from a correlation matrix.

    Candidate edges are visited in descending coefficient order; ties are
    broken by (min vertex index, max vertex index) ascending so the result is
    deterministic. Edge weights are the correlation coefficients.
    """
    symbols = list(corr.symbols)
    c = np.asarray(corr.values, dtype=float)
    n = len(symbols)
    if n < 3:
        raise InsufficientUniverseError(f"PMFG needs at least 3 symbols, got {n}")
    if not np.isfinite(c).all():
        raise ValueError("correlation matrix contains non-finite entries")

    iu, iv = np.triu_indices(n, 1)
    w = c[iu, iv]
    # lexsort: last key is primary -> weight desc, then min index, then max index
    order = np.lexsort((iv, iu, -w))

    target = 3 * (n - 2)
    cur_u = np.empty(target, dtype=np.int64)
    cur_v = np.empty(target, dtype=np.int64)
    count = 0
    rejected = 0
    edges = {}
    for idx in order:
        if count == target:
            break
        i = int(iu[idx])
        j = int(iv[idx])
        cur_u[count] = i
        cur_v[count] = j
        if planar_check_kernel(n, cur_u[: count + 1], cur_v[: count + 1]):
            count += 1
            edges[(i, j)] = float(w[idx])
        else:
            rejected += 1

    g = PmfgGraph(symbols, edges, source_id=source_id, rejected_edges=rejected)
    assert g.n_edges == target, "PMFG did not reach 3(N-2) edges"
    assert g.is_connected(), "PMFG of a complete matrix must be connected"
    return g


def write_edgelist_csv(g, path):
    """Write `u,v,weight` rows using vertex labels."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["u", "v", "weight"])
        eu, ev, w = g.edge_arrays()
        for i, j, wij in zip(eu, ev, w):
            out.writerow([g.labels[i], g.labels[j], repr(float(wij))])


def read_edgelist_csv(path):
    """Read a `u,v,weight` edge list back into a WeightedGraph."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["u", "v", "weight"]:
        raise ValueError(f"{path}: expected header u,v,weight")
    labels = []
    index = {}
    edges = {}
    for u, v, w in rows[1:]:
        for lab in (u, v):
            if lab not in index:
                index[lab] = len(labels)
                labels.append(lab)
        i, j = index[u], index[v]
        key = (i, j) if i < j else (j, i)
        edges[key] = float(w)
    return WeightedGraph(labels, edges)
