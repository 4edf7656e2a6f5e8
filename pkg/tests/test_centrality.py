"""Centrality bundle and the rank-based hybrid peripherality score."""
import csv

import networkx as nx
import numpy as np
import pytest

from conftest import corr_of, graph_from_nx, random_correlation
from netfolio.centrality import (
    centrality_bundle,
    hybrid_measure,
    power_iteration_eigenvector,
    write_bundle_csv,
)
from netfolio.graph import build_pmfg


def pmfg_of(rng, n):
    return build_pmfg(corr_of(random_correlation(rng, n, distinct=True)))


class TestPowerIteration:
    def test_matches_dense_eigensolver(self, rng):
        for _ in range(10):
            n = int(rng.integers(3, 20))
            a = rng.uniform(0, 1, size=(n, n))
            a = (a + a.T) / 2
            np.fill_diagonal(a, 0.0)
            x = power_iteration_eigenvector(a)
            evals, evecs = np.linalg.eigh(a)
            lead = np.abs(evecs[:, -1])
            np.testing.assert_allclose(x / x.max(), lead / lead.max(), atol=1e-6)

    def test_star_hub_dominates(self):
        a = np.zeros((5, 5))
        a[0, 1:] = a[1:, 0] = 1.0
        x = power_iteration_eigenvector(a)
        assert x[0] == pytest.approx(1.0)
        assert np.all(x[1:] < 1.0)


class TestCentralityBundle:
    def test_matches_networkx_references(self, rng):
        g = pmfg_of(rng, 12)
        bundle = centrality_bundle(g)
        G = nx.Graph()
        G.add_nodes_from(range(g.n_vertices))
        for (i, j), w in g.edges.items():
            G.add_edge(i, j, strength=1.0 + w, dist=float(np.sqrt(2.0 * (1.0 - w))))

        deg_w = np.array([sum(d["strength"] for d in G[v].values()) for v in G])
        np.testing.assert_allclose(bundle.degree_w, deg_w, atol=1e-12)
        np.testing.assert_array_equal(bundle.degree_u, [G.degree(v) for v in G])

        bet_u = nx.betweenness_centrality(G, normalized=False)
        np.testing.assert_allclose(bundle.betweenness_u, [bet_u[v] for v in G], atol=1e-9)
        bet_w = nx.betweenness_centrality(G, normalized=False, weight="dist")
        np.testing.assert_allclose(bundle.betweenness_w, [bet_w[v] for v in G], atol=1e-9)

        ecc_u = nx.eccentricity(G)
        np.testing.assert_allclose(bundle.eccentricity_u, [ecc_u[v] for v in G], atol=1e-12)
        spl = dict(nx.shortest_path_length(G, weight="dist"))
        ecc_w = [max(spl[v].values()) for v in G]
        np.testing.assert_allclose(bundle.eccentricity_w, ecc_w, atol=1e-9)

        clo_u = nx.closeness_centrality(G)
        np.testing.assert_allclose(bundle.closeness_u, [clo_u[v] for v in G], atol=1e-9)
        clo_w = nx.closeness_centrality(G, distance="dist")
        np.testing.assert_allclose(bundle.closeness_w, [clo_w[v] for v in G], atol=1e-9)

        eig_u = nx.eigenvector_centrality_numpy(G)
        ref = np.array([eig_u[v] for v in G])
        np.testing.assert_allclose(bundle.eigenvector_u, ref / ref.max(), atol=1e-6)

    def test_disconnected_rejected(self):
        G = nx.union(nx.path_graph(3), nx.relabel_nodes(nx.path_graph(3), {i: i + 10 for i in range(3)}))
        with pytest.raises(ValueError, match="disconnected"):
            centrality_bundle(graph_from_nx(G))


class TestHybridMeasure:
    def test_cycle_all_equal(self):
        for n in (4, 5, 8, 11):
            g = graph_from_nx(nx.cycle_graph(n), weight=0.5)
            p = hybrid_measure(centrality_bundle(g)).values
            np.testing.assert_allclose(p, p[0], atol=1e-12)

    def test_star_hub_strictly_minimal(self):
        for n in (4, 6, 9):
            g = graph_from_nx(nx.star_graph(n - 1), weight=0.5)
            p = hybrid_measure(centrality_bundle(g)).values
            assert np.argmin(p) == 0
            assert np.all(p[1:] > p[0])

    def test_bounds_on_random_pmfgs(self, rng):
        for _ in range(100):
            n = int(rng.integers(6, 26))
            p = hybrid_measure(centrality_bundle(pmfg_of(rng, n))).values
            assert np.all(p >= -1e-12)
            assert np.all(p <= 2.0 + 1e-12)

    def test_rank_sum_identity(self, rng):
        # P averages two rank groups, each normalized so the group mean over
        # all vertices is (n+1-2)/(2(n-1)) ... = 1/2; the total mean is 1
        g = pmfg_of(rng, 15)
        p = hybrid_measure(centrality_bundle(g)).values
        assert float(np.mean(p)) == pytest.approx(1.0, abs=1e-12)

    def test_extremes_achieved_on_path_ends(self):
        # on a path the middle vertex is most central by every variant
        g = graph_from_nx(nx.path_graph(5), weight=0.5)
        p = hybrid_measure(centrality_bundle(g)).values
        assert np.argmin(p) == 2
        assert {int(np.argmax(p))} <= {0, 4}

    def test_label_permutation_equivariance(self, rng):
        c = random_correlation(rng, 10, distinct=True)
        perm = rng.permutation(10)
        base = hybrid_measure(centrality_bundle(build_pmfg(corr_of(c)))).values
        cp = c[np.ix_(perm, perm)]
        labels = [f"S{k:02d}" for k in perm]
        permuted = hybrid_measure(centrality_bundle(build_pmfg(corr_of(cp, labels)))).values
        np.testing.assert_allclose(permuted, base[perm], atol=1e-12)


class TestBundleCsv:
    def test_schema_and_values(self, tmp_path, rng):
        g = pmfg_of(rng, 8)
        bundle = centrality_bundle(g)
        hybrid = hybrid_measure(bundle)
        path = str(tmp_path / "bundle.csv")
        write_bundle_csv(bundle, hybrid, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert len(rows) == 8
        assert rows[0].keys() == {
            "symbol", "degree_w", "degree_u", "betweenness_w", "betweenness_u",
            "eccentricity_w", "eccentricity_u", "closeness_w", "closeness_u",
            "eigenvector_w", "eigenvector_u", "hybrid",
        }
        k = g.labels.index(rows[3]["symbol"])
        assert float(rows[3]["hybrid"]) == hybrid.values[k]
