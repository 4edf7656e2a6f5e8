"""Portfolio selection (six strategy types), weighting schemes, and
holding-period performance evaluation.

Strategies pick symbols from core-periphery structure: Type-1/2 favor the
periphery (with in-sample Sharpe ordering), Type-3 the largest hybrid
centrality measure, Type-4/5 the deepest core, Type-6 everything.
"""
import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError, UndefinedSharpeError

_PURE_TOL = 1e-12
_STRATEGIES = tuple(f"Type-{k}" for k in range(1, 7))


@dataclass(frozen=True)
class Portfolio:
    symbols: tuple
    weights: np.ndarray = field(repr=False)
    strategy: str = "Type-6"
    weighting: str = "uniform"
    m: int = 0
    window_id: int = 0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "weights", w)
        if len(self.symbols) != len(w):
            raise ValueError("symbols and weights must align")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbols in portfolio")
        if w.min() < -1e-9:
            raise ValueError("negative portfolio weight")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")


@dataclass(frozen=True)
class PerformanceRecord:
    holding_period: int
    mean_return: float
    std: float
    sharpe: float


@dataclass(frozen=True)
class MarkowitzResult:
    weights: np.ndarray = field(repr=False)
    degenerate: bool = False


def canonical_strategy(strategy):
    if isinstance(strategy, int):
        strategy = f"Type-{strategy}"
    s = str(strategy).strip()
    s = "Type-" + s[5:] if s[:5].lower() == "type-" else s
    if s not in _STRATEGIES:
        raise ConfigurationError(f"unknown strategy {strategy!r}")
    return s


def _sharpe_lookup(labels, in_sample_sharpe, strategy):
    if in_sample_sharpe is None:
        raise ConfigurationError(f"{strategy} needs in-sample Sharpe ratios")
    try:
        return {lab: float(in_sample_sharpe[lab]) for lab in labels}
    except KeyError as exc:
        raise ConfigurationError(f"no in-sample Sharpe for symbol {exc}") from exc


def _periphery_pick(labels, coreness, sharpe, m):
    """Pure-periphery symbols by Sharpe descending, topped up by ascending
    coreness (then Sharpe descending); lexicographic tiebreak throughout."""
    pure = [lab for lab, c in zip(labels, coreness) if c <= _PURE_TOL]
    pure.sort(key=lambda lab: (-sharpe[lab], lab))
    if len(pure) >= m:
        return pure[:m]
    chosen = set(pure)
    by_vertex = dict(zip(labels, coreness))
    rest = [lab for lab in labels if lab not in chosen]
    rest.sort(key=lambda lab: (by_vertex[lab], -sharpe[lab], lab))
    return pure + rest[: m - len(pure)]


def select_portfolio(strategy, m, profile=None, core_scores=None,
                     hybrid_scores=None, in_sample_sharpe=None):
    """Symbol list for one strategy; deterministic given its inputs.

    Type-1 uses the persistence profile, Type-2 the aggregated core scores
    (both need `in_sample_sharpe`), Type-3 the hybrid measure, Type-4/5 the
    largest profile/core-score values, Type-6 the whole universe.
    """
    strategy = canonical_strategy(strategy)
    source = profile or core_scores or hybrid_scores
    if source is None:
        raise ConfigurationError(f"{strategy} needs a score object")
    labels = source.labels
    if strategy != "Type-6":
        if m < 1 or m > len(labels):
            raise ValueError(f"m={m} out of range for {len(labels)} symbols")

    if strategy == "Type-1":
        if profile is None:
            raise ConfigurationError("Type-1 needs a core-periphery profile")
        sh = _sharpe_lookup(profile.labels, in_sample_sharpe, strategy)
        return _periphery_pick(profile.labels, profile.coreness, sh, m)
    if strategy == "Type-2":
        if core_scores is None:
            raise ConfigurationError("Type-2 needs core scores")
        sh = _sharpe_lookup(core_scores.labels, in_sample_sharpe, strategy)
        return _periphery_pick(core_scores.labels, core_scores.scores, sh, m)
    if strategy == "Type-3":
        if hybrid_scores is None:
            raise ConfigurationError("Type-3 needs hybrid scores")
        ranked = sorted(
            zip(hybrid_scores.labels, hybrid_scores.values),
            key=lambda t: (-t[1], t[0]),
        )
        return [lab for lab, _ in ranked[:m]]
    if strategy == "Type-4":
        if profile is None:
            raise ConfigurationError("Type-4 needs a core-periphery profile")
        ranked = sorted(
            zip(profile.labels, profile.coreness), key=lambda t: (-t[1], t[0])
        )
        return [lab for lab, _ in ranked[:m]]
    if strategy == "Type-5":
        if core_scores is None:
            raise ConfigurationError("Type-5 needs core scores")
        ranked = sorted(
            zip(core_scores.labels, core_scores.scores),
            key=lambda t: (-t[1], t[0]),
        )
        return [lab for lab, _ in ranked[:m]]
    return list(labels)  # Type-6


def uniform_weights(m):
    if m < 1:
        raise ValueError("m must be >= 1")
    return np.full(m, 1.0 / m)


def _project_simplex(v):
    """Euclidean projection onto the probability simplex."""
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.arange(1, len(v) + 1)
    cond = u + (1.0 - css) / k > 0
    rho = int(k[cond][-1])
    tau = (1.0 - css[rho - 1]) / rho
    return np.maximum(v + tau, 0.0)


def _sharpe_objective(w, r, cov):
    a = float(r @ w)
    cw = cov @ w
    b = max(float(w @ cw), 1e-30)
    sb = math.sqrt(b)
    return a / sb, r / sb - a * cw / (b * sb)


def _ascend(w0, r, cov, max_iter=600):
    w = _project_simplex(np.asarray(w0, dtype=float))
    f, g = _sharpe_objective(w, r, cov)
    step = 1.0
    stalls = 0
    for _ in range(max_iter):
        cand = _project_simplex(w + step * g)
        fc, gc = _sharpe_objective(cand, r, cov)
        if fc > f + 1e-15:
            w, f, g = cand, fc, gc
            step = min(step * 1.5, 1e8)
            stalls = 0
        else:
            step *= 0.5
            stalls += 1
            if stalls > 60:
                break
    return w, f


def markowitz_weights(expected_returns, vols, corr):
    """Long-only maximum-Sharpe weights on the simplex.

    Projected-gradient ascent from deterministic starts (barycenter plus
    simplex vertices; for more than 9 assets, the 9 best individual Sharpe
    vertices). If no expected return is positive the objective has no
    interior maximizer; the least-bad single asset is returned with
    ``degenerate=True`` and a warning.
    """
    r = np.asarray(expected_returns, dtype=float)
    s = np.asarray(vols, dtype=float)
    c = np.asarray(getattr(corr, "values", corr), dtype=float)
    n = len(r)
    if n < 1:
        raise ValueError("need at least one asset")
    if len(s) != n or c.shape != (n, n):
        raise ValueError("expected_returns, vols, corr must align")
    if s.min() <= 0:
        raise ValueError("volatilities must be positive")

    if r.max() <= 0:
        warnings.warn(
            "all expected returns non-positive; maximum-Sharpe objective is "
            "degenerate, returning the single least-bad asset"
        )
        w = np.zeros(n)
        w[int(np.argmax(r / s))] = 1.0
        return MarkowitzResult(weights=w, degenerate=True)
    if n == 1:
        return MarkowitzResult(weights=np.ones(1), degenerate=False)

    cov = np.outer(s, s) * c
    starts = [np.full(n, 1.0 / n)]
    if n <= 9:
        vertex_order = range(n)
    else:
        vertex_order = np.argsort(-r / s, kind="stable")[:9]
    for i in vertex_order:
        e = np.zeros(n)
        e[i] = 1.0
        starts.append(e)

    best_w, best_f = None, -math.inf
    for w0 in starts:
        w, f = _ascend(w0, r, cov)
        if f > best_f:
            best_w, best_f = w, f
    best_w = np.maximum(best_w, 0.0)
    best_w /= best_w.sum()
    return MarkowitzResult(weights=best_w, degenerate=False)


def portfolio_return(portfolio, prices, t, T):
    """Weighted sum of log price relatives between timeline rows t and t+T."""
    n_rows = len(prices.timeline)
    if t < 0 or T < 0 or t + T > n_rows - 1:
        raise IndexError(
            f"holding window [{t}, {t + T}] outside timeline of {n_rows} rows"
        )
    ix = {sym: k for k, sym in enumerate(prices.symbols)}
    total = 0.0
    for sym, w in zip(portfolio.symbols, portfolio.weights):
        col = ix[sym]
        s0 = prices.values[t, col]
        s1 = prices.values[t + T, col]
        if not (np.isfinite(s0) and np.isfinite(s1)):
            raise ValueError(f"missing price for {sym} in holding window")
        total += float(w) * math.log(s1 / s0)
    return total


def sharpe_ratio(returns, holding_period=0):
    """Mean over sample standard deviation (ddof=1), no risk-free rate."""
    arr = np.asarray(list(returns), dtype=float)
    if arr.size < 2:
        raise ValueError("need at least 2 returns")
    mean = float(arr.mean())
    std = float(arr.std(ddof=1))
    if std == 0.0:
        raise UndefinedSharpeError(mean)
    return PerformanceRecord(
        holding_period=int(holding_period), mean_return=mean, std=std,
        sharpe=mean / std,
    )


def write_portfolios_csv(portfolios, path):
    """`window_id,strategy,m,weighting,symbol,weight`, one row per holding."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["window_id", "strategy", "m", "weighting", "symbol",
                      "weight"])
        for p in portfolios:
            for sym, w in zip(p.symbols, p.weights):
                out.writerow([p.window_id, p.strategy, p.m, p.weighting, sym,
                              repr(float(w))])
