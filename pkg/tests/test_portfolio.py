"""Portfolio selection, weighting schemes, returns, and Sharpe ratios."""
import itertools
import math
import warnings

import networkx as nx
import numpy as np
import pytest

from conftest import corr_of, graph_from_nx, random_correlation
from netfolio.centrality import HybridScores
from netfolio.coreperiphery import CoreScores, rombach_core_scores, rossa_profile
from netfolio.errors import ConfigurationError, UndefinedSharpeError
from netfolio.graph import build_pmfg
from netfolio.ingest import PriceMatrix
from netfolio.portfolio import (
    Portfolio,
    canonical_strategy,
    markowitz_weights,
    portfolio_return,
    select_portfolio,
    sharpe_ratio,
    uniform_weights,
    write_portfolios_csv,
)


def star_profile(n_leaves=4, labels=None):
    g = graph_from_nx(nx.star_graph(n_leaves),
                      labels=labels or ["HUB"] + [f"L{k}" for k in range(n_leaves)])
    return rossa_profile(g)


def grid_sharpe(r, s, corr, step=1e-3):
    """Dense simplex grid search, the reference optimum for <= 3 assets."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    cov = corr * np.outer(s, s)
    k = round(1.0 / step)
    n = len(r)
    if n == 1:
        w = np.array([[1.0]])
    elif n == 2:
        i = np.arange(k + 1)
        w = np.column_stack([i, k - i]) / k
    else:
        i, j = np.meshgrid(np.arange(k + 1), np.arange(k + 1), indexing="ij")
        keep = i + j <= k
        w = np.column_stack([i[keep], j[keep], k - i[keep] - j[keep]]) / k
    mu = w @ r
    var = np.einsum("pi,ij,pj->p", w, cov, w)
    return float(np.max(mu / np.sqrt(np.maximum(var, 1e-300))))


class TestCanonicalStrategy:
    def test_formats(self):
        assert canonical_strategy(3) == "Type-3"
        assert canonical_strategy("type-5") == "Type-5"
        assert canonical_strategy("Type-1") == "Type-1"

    def test_invalid(self):
        with pytest.raises(ConfigurationError):
            canonical_strategy("Type-7")


class TestSelectPortfolio:
    def test_type1_star_example(self):
        # leaves all have zero coreness; picked by in-sample Sharpe descending
        prof = star_profile(4)
        sharpes = {"HUB": 2.0, "L0": 0.3, "L1": 0.1, "L2": 0.5, "L3": 0.2}
        picked = select_portfolio("Type-1", 2, profile=prof, in_sample_sharpe=sharpes)
        assert picked == ["L2", "L0"]

    def test_type1_fill_ascending_phi(self):
        prof = star_profile(3)
        sharpes = {"HUB": -1.0, "L0": 0.1, "L1": 0.2, "L2": 0.3}
        picked = select_portfolio("Type-1", 4, profile=prof, in_sample_sharpe=sharpes)
        # three pure-periphery leaves by Sharpe desc, then the hub fills
        assert picked == ["L2", "L1", "L0", "HUB"]

    def test_type2_pure_and_fill(self):
        labels = ("A", "B", "C", "D")
        scores = CoreScores(labels, np.array([0.0, 0.4, 0.0, 0.9]))
        sharpes = {"A": 0.5, "B": 9.0, "C": 1.5, "D": 9.0}
        assert select_portfolio("Type-2", 2, core_scores=scores, in_sample_sharpe=sharpes) == ["C", "A"]
        assert select_portfolio("Type-2", 3, core_scores=scores, in_sample_sharpe=sharpes) == ["C", "A", "B"]

    def test_type3_largest_hybrid(self):
        hs = HybridScores(("A", "B", "C", "D"), np.array([0.2, 1.8, 1.1, 0.7]))
        assert select_portfolio("Type-3", 2, hybrid_scores=hs) == ["B", "C"]

    def test_type4_complete_graph_largest_phi(self):
        g = graph_from_nx(nx.complete_graph(5), labels=list("ABCDE"))
        prof = rossa_profile(g)
        picked = select_portfolio("Type-4", 2, profile=prof)
        # K5 coreness ladder is (k-1)/4 in insertion order; the last two
        # inserted vertices carry the largest values
        expect = [prof.labels[v] for v in prof.order[-2:][::-1]]
        assert picked == expect

    def test_type5_largest_core_score(self):
        scores = CoreScores(("A", "B", "C"), np.array([0.3, 1.0, 0.6]))
        assert select_portfolio("Type-5", 2, core_scores=scores) == ["B", "C"]

    def test_type6_all_symbols_m_ignored(self):
        prof = star_profile(3)
        picked = select_portfolio("Type-6", 1, profile=prof)
        assert sorted(picked) == sorted(prof.labels)

    def test_lexicographic_tie_break(self):
        labels = ("B", "A", "D", "C")
        scores = CoreScores(labels, np.array([0.5, 0.5, 0.5, 0.5]))
        assert select_portfolio("Type-5", 2, core_scores=scores) == ["A", "B"]

    def test_m_exceeds_universe(self):
        prof = star_profile(3)
        with pytest.raises(ValueError):
            select_portfolio("Type-4", 9, profile=prof)

    def test_missing_inputs_rejected(self):
        prof = star_profile(3)
        with pytest.raises(ConfigurationError):
            select_portfolio("Type-3", 2, profile=prof)  # needs hybrid scores
        with pytest.raises(ConfigurationError):
            select_portfolio("Type-1", 2, profile=prof)  # needs sharpe map
        with pytest.raises(ConfigurationError):
            select_portfolio("Type-5", 2, profile=prof)  # needs core scores

    def test_deterministic(self, rng):
        c = random_correlation(rng, 10, distinct=True)
        pmfg = build_pmfg(corr_of(c))
        prof = rossa_profile(pmfg)
        sharpes = {lab: float(rng.normal()) for lab in prof.labels}
        a = select_portfolio("Type-1", 5, profile=prof, in_sample_sharpe=sharpes)
        b = select_portfolio("Type-1", 5, profile=prof, in_sample_sharpe=sharpes)
        assert a == b


class TestUniformWeights:
    def test_values(self):
        np.testing.assert_allclose(uniform_weights(1), [1.0])
        np.testing.assert_allclose(uniform_weights(4), [0.25] * 4)
        assert float(np.sum(uniform_weights(30))) == pytest.approx(1.0, abs=1e-15)

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            uniform_weights(0)


class TestMarkowitzWeights:
    def test_identical_assets_split(self):
        res = markowitz_weights([0.1, 0.1], [0.2, 0.2], np.eye(2))
        np.testing.assert_allclose(res.weights, [0.5, 0.5], atol=1e-6)
        assert not res.degenerate

    def test_zero_return_asset_excluded(self):
        res = markowitz_weights([0.1, 0.0], [0.2, 0.2], np.eye(2))
        np.testing.assert_allclose(res.weights, [1.0, 0.0], atol=1e-6)

    def test_single_asset(self):
        res = markowitz_weights([0.05], [0.1], np.eye(1))
        np.testing.assert_allclose(res.weights, [1.0])

    def test_all_nonpositive_degenerate(self):
        with pytest.warns(UserWarning, match="non-positive"):
            res = markowitz_weights([-0.1, -0.02], [0.2, 0.1], np.eye(2))
        assert res.degenerate
        np.testing.assert_allclose(res.weights, [0.0, 1.0])  # least-bad r/s

    def test_constraints_to_tolerance(self, rng):
        for _ in range(50):
            n = int(rng.integers(2, 9))
            r = rng.normal(0.001, 0.01, n)
            r[int(rng.integers(n))] = abs(r[0]) + 0.001
            s = rng.uniform(0.005, 0.03, n)
            c = random_correlation(rng, n)
            res = markowitz_weights(r, s, c)
            assert abs(float(np.sum(res.weights)) - 1.0) <= 1e-9
            assert res.weights.min() >= -1e-9

    def test_grid_oracle_small_instances(self, rng):
        # the optimizer may only fall short of the dense grid by 1e-6;
        # beating the grid is expected (the grid undershoots the optimum
        # by its own quantization error)
        for trial in range(100):
            n = int(rng.integers(1, 4))
            r = rng.normal(0.001, 0.01, n)
            if trial % 4 == 0:
                r = np.abs(r) + 1e-4
            s = rng.uniform(0.005, 0.02, n)
            c = random_correlation(rng, n) if n > 1 else np.eye(1)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = markowitz_weights(r, s, c)
            if res.degenerate:
                continue
            cov = c * np.outer(s, s)
            achieved = float(res.weights @ r) / math.sqrt(
                float(res.weights @ cov @ res.weights))
            oracle = grid_sharpe(r, s, c)
            assert achieved >= oracle - 1e-6
            assert achieved <= oracle + 1e-4  # sanity ceiling

    def test_beats_uniform(self, rng):
        for _ in range(40):
            n = int(rng.integers(3, 11))
            r = rng.normal(0.002, 0.01, n)
            r[0] = abs(r[0]) + 1e-4
            s = rng.uniform(0.005, 0.03, n)
            c = random_correlation(rng, n)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                res = markowitz_weights(r, s, c)
            cov = c * np.outer(s, s)
            u = np.full(n, 1.0 / n)
            sh = lambda w: float(w @ r) / math.sqrt(float(w @ cov @ w))
            assert sh(res.weights) >= sh(u) - 1e-12

    def test_scale_invariance(self, rng):
        n = 4
        r = np.abs(rng.normal(0.002, 0.01, n)) + 1e-4
        s = rng.uniform(0.005, 0.03, n)
        c = random_correlation(rng, n)
        a = markowitz_weights(r, s, c)
        b = markowitz_weights(2.0 * r, s, c)
        np.testing.assert_allclose(a.weights, b.weights, atol=1e-6)


def price_fixture(rows):
    rows = np.asarray(rows, dtype=float)
    return PriceMatrix(
        tuple(f"S{k}" for k in range(rows.shape[1])),
        tuple(str(t) for t in range(rows.shape[0])),
        rows,
    )


class TestPortfolioReturn:
    def make_portfolio(self, symbols, weights):
        return Portfolio(tuple(symbols), np.asarray(weights, dtype=float),
                         "Type-6", "uniform", len(symbols), 0)

    def test_unchanged_prices(self):
        prices = price_fixture([[100, 50], [100, 50]])
        p = self.make_portfolio(["S0", "S1"], [0.5, 0.5])
        assert portfolio_return(p, prices, 0, 1) == 0.0

    def test_single_asset_log_return(self):
        prices = price_fixture([[100.0], [110.0]])
        p = self.make_portfolio(["S0"], [1.0])
        assert portfolio_return(p, prices, 0, 1) == pytest.approx(math.log(1.1), abs=1e-15)

    def test_two_asset_hand_value(self):
        prices = price_fixture([[100, 100], [110, 90]])
        p = self.make_portfolio(["S0", "S1"], [0.5, 0.5])
        expect = 0.5 * (math.log(1.1) + math.log(0.9))
        assert portfolio_return(p, prices, 0, 1) == pytest.approx(expect, abs=1e-15)
        assert portfolio_return(p, prices, 0, 1) == pytest.approx(-0.0050252, abs=1e-7)

    def test_range_overflow(self):
        prices = price_fixture([[100], [101]])
        p = self.make_portfolio(["S0"], [1.0])
        with pytest.raises(IndexError):
            portfolio_return(p, prices, 0, 5)


class TestSharpeRatio:
    def test_two_point_example(self):
        rec = sharpe_ratio([0.01, 0.03], holding_period=7)
        assert rec.mean_return == pytest.approx(0.02, abs=1e-15)
        assert rec.std == pytest.approx(0.01414213562373095, abs=1e-12)
        assert rec.sharpe == pytest.approx(1.414213562373095, abs=1e-9)
        assert rec.holding_period == 7

    def test_constant_returns_undefined(self):
        with pytest.raises(UndefinedSharpeError):
            sharpe_ratio([0.02, 0.02, 0.02])

    def test_antisymmetry(self, rng):
        x = rng.normal(0.01, 0.02, size=30)
        a = sharpe_ratio(x).sharpe
        b = sharpe_ratio(-x).sharpe
        assert a == pytest.approx(-b, abs=1e-12)

    def test_needs_two_points(self):
        with pytest.raises(ValueError):
            sharpe_ratio([0.01])


class TestPortfolioValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError):
            Portfolio(("A", "B"), np.array([0.7, 0.7]), "Type-6", "uniform", 2, 0)

    def test_no_negative_weights(self):
        with pytest.raises(ValueError):
            Portfolio(("A", "B"), np.array([1.5, -0.5]), "Type-6", "uniform", 2, 0)

    def test_no_duplicate_symbols(self):
        with pytest.raises(ValueError):
            Portfolio(("A", "A"), np.array([0.5, 0.5]), "Type-6", "uniform", 2, 0)


class TestPortfoliosCsv:
    def test_schema(self, tmp_path):
        import csv as csvmod
        p1 = Portfolio(("A", "B"), np.array([0.6, 0.4]), "Type-1", "markowitz", 2, 3)
        p2 = Portfolio(("C",), np.array([1.0]), "Type-6", "uniform", 1, 4)
        path = str(tmp_path / "ports.csv")
        write_portfolios_csv([p1, p2], path)
        with open(path) as fh:
            rows = list(csvmod.DictReader(fh))
        assert rows[0].keys() == {"window_id", "strategy", "m", "weighting", "symbol", "weight"}
        assert len(rows) == 3
        assert rows[0]["window_id"] == "3"
        assert float(rows[0]["weight"]) == 0.6
