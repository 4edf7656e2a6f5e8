"""Persistence profiles, core scores, centralization, and significance."""
import csv
import itertools
import math

import networkx as nx
import numpy as np
import pytest

from conftest import graph_from_nx, nx_from_graph, random_connected_graph
from netfolio.coreperiphery import (
    core_assignments,
    core_value_ladders,
    cp_centralization,
    degree_preserving_randomize,
    persistence_probability,
    pure_periphery,
    rombach_core_scores,
    rossa_profile,
    significance_test,
    stock_walk_weights,
)
from netfolio.graph import WeightedGraph
from netfolio.synthetic import homogeneous_graph, planted_core_graph


def brute_phi(adj, subset):
    """Persistence of a vertex set evaluated straight from the definition."""
    subset = list(subset)
    internal = adj[np.ix_(subset, subset)].sum()
    incident = adj[subset, :].sum()
    return internal / incident if incident > 0 else 0.0


def ladder_reference(n, alpha, beta):
    """Independent evaluation of the two-piece coreness ladder."""
    bn = math.floor(beta * n)
    out = []
    for i in range(1, n + 1):
        if i <= bn:
            out.append(i * (1 - alpha) / (2 * bn))
        else:
            out.append((i - bn) * (1 - alpha) / (2 * (n - bn)) + (1 + alpha) / 2)
    return np.array(out)


class TestWalkWeights:
    def test_transforms_edges_only(self):
        g = WeightedGraph(["a", "b", "c"], {(0, 1): 0.8, (1, 2): -0.4})
        t = stock_walk_weights(g)
        assert t.edges[(0, 1)] == pytest.approx(0.9)
        assert t.edges[(1, 2)] == pytest.approx(0.3)
        assert (0, 2) not in t.edges


class TestPersistenceProbability:
    def test_triangle_pair(self):
        g = graph_from_nx(nx.complete_graph(3), weight=1.0)
        assert persistence_probability(g, [0, 1]) == pytest.approx(0.5)

    def test_accepts_labels(self):
        g = WeightedGraph(["a", "b", "c"], {(0, 1): 1.0, (1, 2): 1.0, (0, 2): 1.0})
        assert persistence_probability(g, ["a", "b"]) == pytest.approx(0.5)

    def test_full_set_is_one(self):
        g = graph_from_nx(nx.cycle_graph(6), weight=0.7)
        assert persistence_probability(g, list(range(6))) == pytest.approx(1.0)

    def test_matches_brute_force(self, rng):
        g = random_connected_graph(rng, 7)
        adj = g.adjacency()
        for size in (1, 2, 3, 5):
            for subset in itertools.combinations(range(7), size):
                expect = brute_phi(adj, subset)
                assert persistence_probability(g, list(subset)) == pytest.approx(expect, abs=1e-14)


class TestRossaProfile:
    @pytest.mark.parametrize("n", [4, 5, 6, 7, 8, 9, 10])
    def test_star_closed_form(self, n):
        g = graph_from_nx(nx.star_graph(n - 1), weight=1.0)
        prof = rossa_profile(g)
        np.testing.assert_allclose(prof.phi[:-1], 0.0, atol=0.0)
        assert prof.phi[-1] == 1.0
        assert abs(cp_centralization(prof) - 1.0) <= 1e-12
        # hub enters last
        assert prof.order[-1] == 0

    @pytest.mark.parametrize("n", [4, 5, 6, 8, 10])
    def test_complete_closed_form(self, n):
        g = graph_from_nx(nx.complete_graph(n), weight=1.0)
        prof = rossa_profile(g)
        expect = (np.arange(1, n + 1) - 1) / (n - 1)
        np.testing.assert_allclose(prof.phi, expect, atol=1e-12)
        assert abs(cp_centralization(prof)) <= 1e-12

    def test_single_edge(self):
        g = WeightedGraph(["a", "b"], {(0, 1): 0.3})
        prof = rossa_profile(g)
        np.testing.assert_allclose(prof.phi, [0.0, 1.0])

    def test_endpoints_exact(self, rng):
        g = random_connected_graph(rng, 12)
        prof = rossa_profile(g)
        assert prof.phi[0] == 0.0
        assert prof.phi[-1] == 1.0

    def test_starts_at_min_strength(self, rng):
        g = random_connected_graph(rng, 9)
        prof = rossa_profile(g)
        strengths = g.strengths()
        assert strengths[prof.order[0]] == pytest.approx(strengths.min())

    def test_greedy_minimality_exhaustive(self, rng):
        # at every step the chosen vertex must achieve the minimum phi among
        # all candidate one-vertex extensions, checked from the definition
        for _ in range(50):
            n = int(rng.integers(3, 7))
            g = random_connected_graph(rng, n)
            adj = g.adjacency()
            prof = rossa_profile(g)
            current = [prof.order[0]]
            for step in range(1, n):
                options = [
                    brute_phi(adj, current + [v])
                    for v in range(n) if v not in current
                ]
                chosen = prof.order[step]
                achieved = brute_phi(adj, current + [chosen])
                assert achieved <= min(options) + 1e-12
                assert prof.phi[step] == pytest.approx(achieved, abs=1e-9)
                current.append(chosen)

    def test_coreness_aligns_with_order(self, rng):
        g = random_connected_graph(rng, 10)
        prof = rossa_profile(g)
        for rank, v in enumerate(prof.order):
            assert prof.coreness[v] == prof.phi[rank]

    def test_disconnected_rejected(self):
        G = nx.union(nx.path_graph(3), nx.relabel_nodes(nx.path_graph(3), {i: i + 5 for i in range(3)}))
        with pytest.raises(ValueError, match="connected"):
            rossa_profile(graph_from_nx(G))


class TestPurePeriphery:
    def test_star_leaves(self):
        g = graph_from_nx(nx.star_graph(5), weight=1.0)
        prof = rossa_profile(g)
        leaves = pure_periphery(prof)
        assert set(leaves) == set(g.labels[1:])

    def test_complete_graph_single_zero(self):
        g = graph_from_nx(nx.complete_graph(5), weight=1.0)
        assert len(pure_periphery(rossa_profile(g))) == 1


class TestCpCentralization:
    def test_requires_three_vertices(self):
        g = WeightedGraph(["a", "b"], {(0, 1): 1.0})
        with pytest.raises(ValueError):
            cp_centralization(rossa_profile(g))

    def test_between_star_and_complete(self, rng):
        # typical connected graphs land between the two anchors
        for _ in range(10):
            g = random_connected_graph(rng, 8, p=0.6)
            c = cp_centralization(rossa_profile(g))
            assert -1.0 <= c <= 1.0 + 1e-12


class TestCoreValueLadders:
    def test_matches_reference_formula(self, rng):
        for _ in range(25):
            n = int(rng.integers(3, 12))
            alpha = float(rng.uniform(0, 1))
            beta = float(rng.uniform(0.1, 0.95))
            ours = core_value_ladders(n, [alpha], [beta])[0]
            np.testing.assert_allclose(ours, ladder_reference(n, alpha, beta), atol=1e-12)

    def test_nondecreasing_and_bounded(self, rng):
        for _ in range(25):
            n = int(rng.integers(3, 12))
            row = core_value_ladders(n, [rng.uniform(0, 1)], [rng.uniform(0.05, 0.95)])[0]
            assert np.all(np.diff(row) >= -1e-12)
            assert row.min() >= 0.0
            assert row.max() <= 1.0 + 1e-12

    def test_alpha_one_gives_step(self):
        row = core_value_ladders(6, [1.0], [0.5])[0]
        np.testing.assert_allclose(row, [0, 0, 0, 1, 1, 1])


class TestCoreAssignments:
    def hand_best_q(self, adj, ladder):
        n = adj.shape[0]
        best = -np.inf
        for perm in itertools.permutations(range(n)):
            c = np.empty(n)
            c[list(perm)] = ladder
            q = float(c @ adj @ c)
            best = max(best, q)
        return best

    def test_exhaustive_matches_hand_search(self, rng):
        for _ in range(6):
            n = int(rng.integers(3, 6))
            g = random_connected_graph(rng, n)
            adj = g.adjacency()
            alphas = rng.uniform(0, 1, 3)
            betas = rng.uniform(0.1, 0.9, 3)
            _, qs = core_assignments(adj, alphas, betas, method="exhaustive")
            for k in range(3):
                ladder = ladder_reference(n, alphas[k], betas[k])
                assert qs[k] == pytest.approx(self.hand_best_q(adj, ladder), abs=1e-10)

    def test_anneal_reaches_exhaustive_optimum(self, rng):
        hits, total = 0, 0
        for trial in range(10):
            n = int(rng.integers(3, 6))
            g = random_connected_graph(rng, n)
            adj = g.adjacency()
            alphas = rng.uniform(0, 1, 4)
            betas = rng.uniform(0.1, 0.9, 4)
            _, q_ex = core_assignments(adj, alphas, betas, method="exhaustive")
            _, q_an = core_assignments(adj, alphas, betas, seed=trial, method="anneal")
            for k in range(4):
                total += 1
                if q_an[k] >= q_ex[k] - 1e-9 * max(1.0, abs(q_ex[k])):
                    hits += 1
        assert hits / total >= 0.95

    def test_anneal_never_exceeds_exhaustive(self, rng):
        g = random_connected_graph(rng, 5)
        adj = g.adjacency()
        alphas = rng.uniform(0, 1, 6)
        betas = rng.uniform(0.1, 0.9, 6)
        _, q_ex = core_assignments(adj, alphas, betas, method="exhaustive")
        _, q_an = core_assignments(adj, alphas, betas, seed=3, method="anneal")
        assert np.all(q_an <= q_ex + 1e-9)


class TestRombachCoreScores:
    def test_star_center_maximal(self):
        g = graph_from_nx(nx.star_graph(6), weight=1.0)
        cs = rombach_core_scores(g, n_samples=200, seed=1)
        assert cs.scores[0] == pytest.approx(1.0)
        assert np.all(cs.scores[1:] < 1.0)

    def test_exhaustive_orbit_symmetry(self):
        # tie-averaging over optimal permutations makes symmetric vertices equal
        g = graph_from_nx(nx.star_graph(5), weight=1.0)
        cs = rombach_core_scores(g, n_samples=100, seed=2, method="exhaustive")
        leaf = cs.scores[1:]
        np.testing.assert_allclose(leaf, leaf[0], atol=1e-9)

    def test_bit_reproducible(self):
        g = graph_from_nx(nx.barbell_graph(4, 1), weight=1.0)
        a = rombach_core_scores(g, n_samples=150, seed=9)
        b = rombach_core_scores(g, n_samples=150, seed=9)
        np.testing.assert_array_equal(a.scores, b.scores)

    def test_scores_in_unit_interval(self, rng):
        g = random_connected_graph(rng, 9)
        cs = rombach_core_scores(g, n_samples=120, seed=4)
        assert cs.scores.min() >= 0.0
        assert cs.scores.max() == pytest.approx(1.0)

    def test_path_interior_beats_ends(self):
        g = graph_from_nx(nx.path_graph(6), weight=1.0)
        cs = rombach_core_scores(g, n_samples=300, seed=5)
        assert min(cs.scores[2], cs.scores[3]) > max(cs.scores[0], cs.scores[5])


class TestDegreePreservingRandomize:
    def test_preserves_degrees_edges_weights(self, rng):
        for trial in range(12):
            g = random_connected_graph(rng, int(rng.integers(5, 14)), p=0.45)
            gn = degree_preserving_randomize(g, seed=trial)
            assert gn.n_edges == g.n_edges
            np.testing.assert_array_equal(gn.degrees(), g.degrees())
            assert sorted(gn.edges.values()) == pytest.approx(sorted(g.edges.values()))

    def test_star_is_rigid(self):
        g = graph_from_nx(nx.star_graph(4), weight=1.0)
        gn = degree_preserving_randomize(g, seed=11)
        assert set(gn.edges) == set(g.edges)

    def test_seed_determinism(self, rng):
        g = random_connected_graph(rng, 10)
        a = degree_preserving_randomize(g, seed=21)
        b = degree_preserving_randomize(g, seed=21)
        assert a.edges == b.edges

    def test_actually_rewires(self, rng):
        g = random_connected_graph(rng, 12, p=0.5)
        gn = degree_preserving_randomize(g, seed=2)
        assert set(gn.edges) != set(g.edges)

    def test_stays_simple(self, rng):
        g = random_connected_graph(rng, 10, p=0.5)
        gn = degree_preserving_randomize(g, seed=13)
        for i, j in gn.edges:
            assert i != j
        assert len(gn.edges) == len(set(gn.edges))


class TestSignificance:
    def test_star_p_zero(self):
        # nulls are isomorphic to the star, so no null strictly exceeds C
        g = graph_from_nx(nx.star_graph(9), weight=1.0)
        rep = significance_test(g, R=30, seed=0)
        assert rep.p_value == 0.0

    def test_p_equals_strict_exceed_fraction(self, rng):
        g = random_connected_graph(rng, 10)
        rep = significance_test(g, R=40, seed=8)
        expect = float(np.mean(np.asarray(rep.null_values) > rep.C))
        assert rep.p_value == pytest.approx(expect, abs=1e-15)
        assert len(rep.null_values) == 40

    def test_planted_graph_significant(self):
        g = planted_core_graph(seed=100)
        rep = significance_test(g, R=60, seed=1)
        assert rep.p_value < 0.05

    def test_homogeneous_graph_not_significant(self):
        g = homogeneous_graph(seed=300)
        rep = significance_test(g, R=100, seed=400)
        assert rep.p_value > 0.05

    def test_seed_determinism(self, rng):
        g = random_connected_graph(rng, 9)
        a = significance_test(g, R=25, seed=5)
        b = significance_test(g, R=25, seed=5)
        np.testing.assert_array_equal(a.null_values, b.null_values)


class TestProfileCsv:
    def test_profile_schema(self, tmp_path, rng):
        from netfolio.coreperiphery import write_profile_csv, write_scores_csv
        g = random_connected_graph(rng, 6)
        prof = rossa_profile(g)
        path = str(tmp_path / "profile.csv")
        write_profile_csv(prof, path)
        with open(path) as fh:
            rows = list(csv.DictReader(fh))
        assert rows[0].keys() == {"rank", "vertex", "phi"}
        assert len(rows) == 6
        assert [int(r["rank"]) for r in rows] == list(range(1, 7))
        assert float(rows[0]["phi"]) == 0.0

        cs = rombach_core_scores(g, n_samples=50, seed=3)
        spath = str(tmp_path / "scores.csv")
        write_scores_csv(cs, spath)
        with open(spath) as fh:
            srows = list(csv.DictReader(fh))
        assert srows[0].keys() == {"vertex", "core_score"}
        assert len(srows) == 6
