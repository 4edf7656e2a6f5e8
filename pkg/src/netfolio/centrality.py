"""Centrality bundle on a PMFG and the rank-based hybrid peripherality score.

Degree and eigenvector centrality read edge strength 1 + rho; betweenness,
eccentricity, and closeness read edge length sqrt(2(1 - rho)). Unweighted
variants use topology only. The hybrid score combines the ranks of all ten
variants; it is small for central vertices and large for peripheral ones.
"""
import csv
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.csgraph import csgraph_from_dense, dijkstra
from scipy.stats import rankdata

_RANK_DECIMALS = 10  # collapse float noise so symmetric vertices tie exactly


@dataclass(frozen=True)
class CentralityBundle:
    labels: tuple
    degree_w: np.ndarray = field(repr=False)
    degree_u: np.ndarray = field(repr=False)
    betweenness_w: np.ndarray = field(repr=False)
    betweenness_u: np.ndarray = field(repr=False)
    eccentricity_w: np.ndarray = field(repr=False)
    eccentricity_u: np.ndarray = field(repr=False)
    closeness_w: np.ndarray = field(repr=False)
    closeness_u: np.ndarray = field(repr=False)
    eigenvector_w: np.ndarray = field(repr=False)
    eigenvector_u: np.ndarray = field(repr=False)

    def columns(self):
        """(name, values) pairs in canonical export order."""
        return [
            ("degree_w", self.degree_w),
            ("degree_u", self.degree_u),
            ("betweenness_w", self.betweenness_w),
            ("betweenness_u", self.betweenness_u),
            ("eccentricity_w", self.eccentricity_w),
            ("eccentricity_u", self.eccentricity_u),
            ("closeness_w", self.closeness_w),
            ("closeness_u", self.closeness_u),
            ("eigenvector_w", self.eigenvector_w),
            ("eigenvector_u", self.eigenvector_u),
        ]


@dataclass(frozen=True)
class HybridScores:
    labels: tuple
    values: np.ndarray = field(repr=False)


def power_iteration_eigenvector(adj, tol=1e-10, max_iter=10000):
    """Leading eigenvector of a nonnegative adjacency, unit-max normalized.

    Iterates on (A + I) so bipartite-like structures cannot oscillate; the
    shift leaves the eigenvector unchanged. Starts from the all-ones vector.
    """
    n = adj.shape[0]
    x = np.ones(n)
    for _ in range(max_iter):
        y = adj @ x + x
        top = y.max()
        if top <= 0:
            return np.ones(n)  # edgeless; every vertex equivalent
        y /= top
        if np.abs(y - x).max() < tol:
            x = y
            break
        x = y
    return x / x.max()


def _shortest_paths(length_matrix):
    graph = csgraph_from_dense(length_matrix, null_value=np.inf)
    return dijkstra(graph, directed=False)


def _betweenness(nxg, weight):
    import networkx as nx

    vals = nx.betweenness_centrality(nxg, normalized=False, weight=weight)
    return np.array([vals[i] for i in range(nxg.number_of_nodes())])


def bundle_from_matrices(labels, mask, strength, length):
    """Centrality bundle from explicit edge data.

    ``mask`` is the boolean adjacency, ``strength`` holds degree/eigenvector
    weights, and ``length`` holds shortest-path lengths. Exposed separately
    from `centrality_bundle` so scale properties can be tested directly.
    """
    import networkx as nx

    n = len(labels)
    nxg = nx.Graph()
    nxg.add_nodes_from(range(n))
    iu, iv = np.nonzero(np.triu(mask, 1))
    for i, j in zip(iu, iv):
        nxg.add_edge(int(i), int(j), dist=float(length[i, j]))

    unit = np.where(mask, 1.0, np.inf)
    np.fill_diagonal(unit, np.inf)
    length_inf = np.where(mask, length, np.inf)
    np.fill_diagonal(length_inf, np.inf)

    d_w = _shortest_paths(length_inf)
    d_u = _shortest_paths(unit)
    if np.isinf(d_w).any() or np.isinf(d_u).any():
        raise ValueError("graph is disconnected; centralities undefined")

    np.fill_diagonal(d_w, 0.0)
    np.fill_diagonal(d_u, 0.0)
    denom = float(n - 1) if n > 1 else 1.0
    return CentralityBundle(
        labels=tuple(labels),
        degree_w=(strength * mask).sum(axis=1),
        degree_u=mask.sum(axis=1).astype(float),
        betweenness_w=_betweenness(nxg, "dist"),
        betweenness_u=_betweenness(nxg, None),
        eccentricity_w=d_w.max(axis=1),
        eccentricity_u=d_u.max(axis=1),
        closeness_w=denom / d_w.sum(axis=1),
        closeness_u=denom / d_u.sum(axis=1),
        eigenvector_w=power_iteration_eigenvector(strength * mask),
        eigenvector_u=power_iteration_eigenvector(mask.astype(float)),
    )


def centrality_bundle(g):
    """All ten centrality variants of a connected correlation PMFG."""
    if g.n_vertices < 2:
        raise ValueError("need at least 2 vertices")
    if not g.is_connected():
        raise ValueError("graph is disconnected; centralities undefined")
    n = g.n_vertices
    mask = np.zeros((n, n), dtype=bool)
    rho = np.zeros((n, n))
    for (i, j), w in g.edges.items():
        mask[i, j] = mask[j, i] = True
        rho[i, j] = rho[j, i] = w
    strength = 1.0 + rho
    length = np.sqrt(np.maximum(2.0 * (1.0 - rho), 0.0))
    return bundle_from_matrices(g.labels, mask, strength, length)


def _central_rank(values, smaller_is_central=False):
    """Rank 1 = most central; ties get the average rank."""
    v = np.round(np.asarray(values, dtype=float), _RANK_DECIMALS)
    return rankdata(v if smaller_is_central else -v, method="average")


def hybrid_measure(bundle):
    """Rank-combined peripherality score P in [0, 2]; large = peripheral."""
    n = len(bundle.labels)
    if n < 2:
        raise ValueError("need at least 2 vertices")
    r_dc_w = _central_rank(bundle.degree_w)
    r_dc_u = _central_rank(bundle.degree_u)
    r_bc_w = _central_rank(bundle.betweenness_w)
    r_bc_u = _central_rank(bundle.betweenness_u)
    r_e_w = _central_rank(bundle.eccentricity_w, smaller_is_central=True)
    r_e_u = _central_rank(bundle.eccentricity_u, smaller_is_central=True)
    r_c_w = _central_rank(bundle.closeness_w)
    r_c_u = _central_rank(bundle.closeness_u)
    r_ec_w = _central_rank(bundle.eigenvector_w)
    r_ec_u = _central_rank(bundle.eigenvector_u)

    p = (r_dc_w + r_dc_u + r_bc_w + r_bc_u - 4.0) / (4.0 * (n - 1)) + (
        r_e_w + r_e_u + r_c_w + r_c_u + r_ec_w + r_ec_u - 6.0
    ) / (6.0 * (n - 1))
    return HybridScores(labels=bundle.labels, values=p)


def write_bundle_csv(bundle, hybrid, path):
    """One row per vertex: ten centralities plus the hybrid score."""
    names = [name for name, _ in bundle.columns()]
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["symbol", *names, "hybrid"])
        cols = [vals for _, vals in bundle.columns()]
        for k, sym in enumerate(bundle.labels):
            out.writerow(
                [sym, *[repr(float(c[k])) for c in cols],
                 repr(float(hybrid.values[k]))]
            )
