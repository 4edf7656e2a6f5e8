"""Rolling-window backtest orchestration, cross-validation resampling, the
proportion z-test, and core/periphery occurrence analysis.

Each formation window builds two correlation networks (plain Pearson for the
core-periphery strategies, exponentially weighted for the hybrid-measure
strategy), extracts scores, forms every configured (strategy, size,
weighting) portfolio, and evaluates holding-period returns at the formation
close. Windows are independent work units with seeds derived from
(master seed, window id), so parallel and serial runs agree bit for bit.
"""
import csv
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from itertools import product

import numpy as np
from numpy.random import SeedSequence, default_rng
from scipy.stats import norm

from .centrality import centrality_bundle, hybrid_measure
from .coreperiphery import rombach_core_scores, rossa_profile, stock_walk_weights
from .corr import exp_weights, pearson_matrix, weighted_pearson_matrix
from .errors import ConfigurationError, DuplicateKeyError, WindowingError
from .graph import build_pmfg
from .portfolio import (Portfolio, canonical_strategy, markowitz_weights,
                        select_portfolio, uniform_weights)

ALL_STRATEGIES = tuple(f"Type-{k}" for k in range(1, 7))
DEFAULT_SIZES = (5, 10, 20, 30)
CROSSVAL_HOLDINGS = (50, 60, 70, 80, 90, 100, 110, 125)
CROSSVAL_METRICS = ("sharpe", "mean_return", "std")

_REGIMES = {
    # regime: (formation length, step)
    "daily": (125, 125),
    "highfreq": (240, 60),
}


@dataclass(frozen=True)
class BacktestConfig:
    """Window layout and portfolio grid for one study.

    Formation windows hold `formation_length` price rows; the evaluation
    window is the next `formation_length` rows, so holding periods run up to
    the formation length. Unset fields take the regime defaults (daily:
    L=125, step=125; highfreq: L=240, step=60).
    """

    regime: str = "daily"
    formation_length: int = None
    step: int = None
    holding_periods: tuple = None
    strategies: tuple = ALL_STRATEGIES
    sizes: tuple = DEFAULT_SIZES
    weightings: tuple = ("uniform", "markowitz")
    seed: int = 0
    rombach_samples: int = 10000
    rombach_method: str = "auto"
    theta: float = None
    exp_strategies: tuple = ("Type-3",)

    def __post_init__(self):
        if self.regime not in _REGIMES:
            raise ConfigurationError(f"unknown regime {self.regime!r}")
        base_len, base_step = _REGIMES[self.regime]
        length = base_len if self.formation_length is None else int(self.formation_length)
        step = base_step if self.step is None else int(self.step)
        if length < 3:
            raise ConfigurationError("formation_length must be >= 3")
        if step < 1:
            raise ConfigurationError("step must be >= 1")
        holdings = self.holding_periods
        if holdings is None:
            holdings = tuple(range(1, length + 1))
        holdings = tuple(int(t) for t in holdings)
        if not holdings:
            raise ConfigurationError("need at least one holding period")
        if min(holdings) < 1 or max(holdings) > length:
            raise ConfigurationError(
                f"holding periods must lie in 1..{length} (evaluation window)"
            )
        theta = float(length) if self.theta is None else float(self.theta)
        if theta <= 0:
            raise ConfigurationError("theta must be positive")
        strategies = tuple(canonical_strategy(s) for s in self.strategies)
        exp_strats = tuple(canonical_strategy(s) for s in self.exp_strategies)
        sizes = tuple(int(m) for m in self.sizes)
        if not sizes or min(sizes) < 1:
            raise ConfigurationError("portfolio sizes must be >= 1")
        weightings = tuple(self.weightings)
        for w in weightings:
            if w not in ("uniform", "markowitz"):
                raise ConfigurationError(f"unknown weighting {w!r}")
        for name, value in [
            ("formation_length", length), ("step", step),
            ("holding_periods", holdings), ("theta", theta),
            ("strategies", strategies), ("exp_strategies", exp_strats),
            ("sizes", sizes), ("weightings", weightings),
            ("rombach_samples", int(self.rombach_samples)),
            ("seed", int(self.seed)),
        ]:
            object.__setattr__(self, name, value)


@dataclass(frozen=True)
class CellStats:
    mean_return: float = None
    std: float = None
    sharpe: float = None
    n_windows: int = 0
    reason: str = None

    @property
    def ok(self):
        return self.reason is None


@dataclass
class BacktestReport:
    config: BacktestConfig
    holding_periods: tuple
    window_ids: tuple
    cells: dict = field(repr=False)
    portfolios: tuple = field(repr=False)
    window_returns: dict = field(repr=False)
    failures: tuple = ()

    @property
    def window_count(self):
        return len(self.window_ids)


@dataclass(frozen=True)
class CrossValCell:
    holding_period: int
    m: int
    weighting: str
    metric: str
    comparator: str
    p_hat: float
    z: float
    p_value: float


@dataclass
class CrossValReport:
    cells: tuple
    iterations: int
    n_windows: int
    p0: float
    seed: int
    holding_periods: tuple
    backtest: BacktestReport = field(repr=False, default=None)
    last_iteration: dict = field(repr=False, default_factory=dict)


@dataclass
class OccurrenceReport:
    labels: tuple
    n_windows: int
    k: int
    core_counts: np.ndarray = field(repr=False)
    periphery_counts: np.ndarray = field(repr=False)
    core_runs: dict = field(repr=False)
    periphery_runs: dict = field(repr=False)
    sector_of: dict = field(repr=False)
    sector_core_fractions: dict = field(repr=False)
    sector_periphery_fractions: dict = field(repr=False)


@dataclass(frozen=True)
class ReturnWindow:
    symbols: tuple
    values: np.ndarray = field(repr=False)


def formation_starts(n_rows, formation_length, step, evaluation=False):
    """Start indices of formation windows; with `evaluation`, only windows
    whose full evaluation window also fits."""
    span = 2 * formation_length if evaluation else formation_length
    if n_rows < span:
        raise WindowingError(
            f"timeline has {n_rows} rows; need at least {span}"
        )
    count = (n_rows - span) // step + 1
    return [k * step for k in range(count)]


def window_network(config, symbols, ret_values, start, wid):
    """All per-window network artifacts, keyed for reuse by every command."""
    length = config.formation_length
    seg = ret_values[start : start + length - 1]
    win = ReturnWindow(tuple(symbols), seg)
    corr_plain = pearson_matrix(win)
    pmfg_plain = build_pmfg(corr_plain, source_id=f"w{wid}:plain")
    walk = stock_walk_weights(pmfg_plain)
    profile = rossa_profile(walk)
    seed = SeedSequence(config.seed, spawn_key=(wid,))
    scores = rombach_core_scores(
        walk, n_samples=config.rombach_samples, seed=seed,
        method=config.rombach_method,
    )
    weights = exp_weights(length - 1, config.theta)
    corr_exp = weighted_pearson_matrix(win, weights)
    pmfg_exp = build_pmfg(corr_exp, source_id=f"w{wid}:exp")
    hybrid = hybrid_measure(centrality_bundle(pmfg_exp))
    return {
        "corr_plain": corr_plain, "pmfg_plain": pmfg_plain,
        "profile": profile, "scores": scores,
        "corr_exp": corr_exp, "pmfg_exp": pmfg_exp, "hybrid": hybrid,
    }


def in_sample_sharpe(symbols, formation_returns):
    """Per-symbol Sharpe over the formation window at holding period 1.

    Constant return columns map to +/-inf (0 for a constant zero) so the
    ordering stays total without raising.
    """
    mean = formation_returns.mean(axis=0)
    std = formation_returns.std(axis=0, ddof=1)
    out = {}
    for k, sym in enumerate(symbols):
        if std[k] > 0:
            out[sym] = float(mean[k] / std[k])
        elif mean[k] > 0:
            out[sym] = math.inf
        elif mean[k] < 0:
            out[sym] = -math.inf
        else:
            out[sym] = 0.0
    return out


def _window_task(args):
    config, symbols, ret_values, price_values, start, wid = args
    length = config.formation_length
    t_close = start + length - 1
    net = window_network(config, symbols, ret_values, start, wid)
    seg = ret_values[start : start + length - 1]
    sharpe_map = in_sample_sharpe(symbols, seg)
    ix = {sym: k for k, sym in enumerate(symbols)}
    log_prices = np.log(price_values)
    horizons = np.asarray(config.holding_periods, dtype=int)

    portfolios = []
    rets = {}
    failures = []
    selection_cache = {}
    type6_weights = {}
    with warnings.catch_warnings():
        warnings.filterwarnings(
            "ignore", message="all expected returns non-positive"
        )
        for strategy, m in product(config.strategies, config.sizes):
            sel_key = (strategy, -1 if strategy == "Type-6" else m)
            if sel_key not in selection_cache:
                selection_cache[sel_key] = select_portfolio(
                    strategy, m, profile=net["profile"],
                    core_scores=net["scores"], hybrid_scores=net["hybrid"],
                    in_sample_sharpe=sharpe_map,
                )
            syms = selection_cache[sel_key]
            idx = [ix[s] for s in syms]
            corr = net["corr_exp"] if strategy in config.exp_strategies \
                else net["corr_plain"]
            for weighting in config.weightings:
                key = (strategy, m, weighting)
                try:
                    if weighting == "uniform":
                        w = uniform_weights(len(syms))
                    elif strategy == "Type-6" and weighting in type6_weights:
                        w = type6_weights[weighting]
                    else:
                        w = markowitz_weights(
                            seg[:, idx].mean(axis=0),
                            seg[:, idx].std(axis=0, ddof=1),
                            corr.sub(idx),
                        ).weights
                        if strategy == "Type-6":
                            type6_weights[weighting] = w
                except Exception as exc:  # record, keep other cells alive
                    failures.append((wid, key, str(exc)))
                    continue
                portfolios.append(Portfolio(
                    symbols=tuple(syms), weights=w, strategy=strategy,
                    weighting=weighting, m=m, window_id=wid,
                ))
                steps = log_prices[t_close + horizons][:, idx] \
                    - log_prices[t_close, idx]
                rets[key] = steps @ w
    return wid, portfolios, rets, failures


def _column_stats(values):
    """(mean, std, sharpe, n, reason) for one pooled return column."""
    vals = values[np.isfinite(values)]
    n = int(vals.size)
    if n < 2:
        return CellStats(n_windows=n, reason="fewer than 2 valid window returns")
    mean = float(vals.mean())
    std = float(vals.std(ddof=1))
    if std == 0.0:
        return CellStats(mean_return=mean, std=0.0, n_windows=n,
                         reason="zero standard deviation across windows")
    return CellStats(mean_return=mean, std=std, sharpe=mean / std, n_windows=n)


def run_backtest(config, returns, prices, jobs=1):
    """Backtest every configured cell over rolling windows.

    `returns` must be the log returns of `prices` (row i spans price rows i
    to i+1). Aggregation pools the per-window returns of each holding period
    before computing mean/std/Sharpe.
    """
    symbols = tuple(prices.symbols)
    if tuple(returns.symbols) != symbols:
        raise ConfigurationError("returns and prices cover different symbols")
    n_rows = len(prices.timeline)
    if len(returns.timeline) != n_rows - 1:
        raise ConfigurationError(
            "returns timeline must be one row shorter than prices"
        )
    length = config.formation_length
    if max(config.sizes) > len(symbols):
        raise ConfigurationError(
            f"portfolio size {max(config.sizes)} exceeds universe of "
            f"{len(symbols)} symbols"
        )
    if n_rows < 2 * length:
        raise ConfigurationError(
            f"timeline has {n_rows} rows; need at least {2 * length} for one "
            f"formation+evaluation window pair"
        )
    starts = formation_starts(n_rows, length, config.step, evaluation=True)

    ret_values = np.asarray(returns.values, dtype=float)
    price_values = np.asarray(prices.values, dtype=float)
    tasks = [
        (config, symbols, ret_values, price_values, s, wid)
        for wid, s in enumerate(starts)
    ]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_window_task, tasks))
    else:
        results = [_window_task(t) for t in tasks]
    results.sort(key=lambda r: r[0])

    horizons = config.holding_periods
    n_win = len(starts)
    keys = [
        (s, m, w)
        for s in config.strategies
        for m in config.sizes
        for w in config.weightings
    ]
    window_returns = {k: np.full((n_win, len(horizons)), np.nan) for k in keys}
    portfolios = []
    failures = []
    for wid, ports, rets, fails in results:
        portfolios.extend(ports)
        failures.extend(fails)
        for k, vec in rets.items():
            window_returns[k][wid] = vec

    cells = {}
    for k in keys:
        mat = window_returns[k]
        for tix, horizon in enumerate(horizons):
            cells[k + (horizon,)] = _column_stats(mat[:, tix])
    return BacktestReport(
        config=config, holding_periods=horizons,
        window_ids=tuple(range(n_win)), cells=cells,
        portfolios=tuple(portfolios), window_returns=window_returns,
        failures=tuple(failures),
    )


def proportion_z_test(p_hat, p0, n):
    """One-sided (upper tail) z-test for a sample proportion."""
    if not 0.0 < p0 < 1.0:
        raise ValueError("p0 must be strictly between 0 and 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    z = (p_hat - p0) / math.sqrt(p0 * (1.0 - p0) / n)
    return z, float(norm.sf(z))


def _metric_values(mat, metric):
    """Per-column metric over pooled window returns; nan where undefined."""
    finite = np.isfinite(mat)
    count = finite.sum(axis=0)
    out = np.full(mat.shape[1], np.nan)
    ok = count >= 2
    if not ok.any():
        return out
    with np.errstate(invalid="ignore"), warnings.catch_warnings():
        warnings.simplefilter("ignore")
        mean = np.nanmean(mat, axis=0)
        std = np.nanstd(mat, axis=0, ddof=1)
    if metric == "mean_return":
        out[ok] = mean[ok]
    elif metric == "std":
        out[ok] = std[ok]
    elif metric == "sharpe":
        pos = ok & (std > 0)
        out[pos] = mean[pos] / std[pos]
    else:
        raise ValueError(f"unknown metric {metric!r}")
    return out


def cross_validate(config, returns, prices, n_windows=None, iterations=1000,
                   p0=0.7, seed=0, metrics=CROSSVAL_METRICS,
                   comparators=("Type-2", "Type-3"), jobs=1):
    """Resampled proportion tests: how often Type-1 beats each comparator.

    Each iteration samples `n_windows` windows without replacement and pools
    their returns per cell on the {50,60,...} holding grid (clipped to the
    formation length); p-hat is the fraction of iterations where Type-1's
    metric beats the comparator's (larger mean/Sharpe, smaller std). An
    undefined metric on either side never counts as a beat.
    """
    comparators = tuple(canonical_strategy(c) for c in comparators)
    for metric in metrics:
        if metric not in CROSSVAL_METRICS:
            raise ValueError(f"unknown metric {metric!r}")
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    needed = ("Type-1",) + comparators
    grid = tuple(t for t in CROSSVAL_HOLDINGS if t <= config.formation_length)
    if not grid:
        raise ConfigurationError(
            "formation window shorter than the whole cross-validation "
            "holding grid"
        )
    cfg = replace(config, holding_periods=grid, strategies=needed)
    report = run_backtest(cfg, returns, prices, jobs=jobs)
    total = report.window_count
    if n_windows is None:
        n_windows = total
    n_windows = int(n_windows)
    if not 1 <= n_windows <= total:
        raise WindowingError(
            f"n_windows={n_windows} outside 1..{total} available windows"
        )

    rng = default_rng(SeedSequence(seed))
    combos = [
        (m, w, metric, comp)
        for m in cfg.sizes
        for w in cfg.weightings
        for metric in metrics
        for comp in comparators
    ]
    beats = {c: np.zeros(len(grid), dtype=int) for c in combos}
    last_iteration = {}
    for _ in range(iterations):
        idx = np.sort(rng.choice(total, size=n_windows, replace=False))
        metric_cache = {}
        for strat, m, w in product(needed, cfg.sizes, cfg.weightings):
            mat = report.window_returns[(strat, m, w)][idx]
            for metric in metrics:
                metric_cache[(strat, m, w, metric)] = _metric_values(mat, metric)
        for m, w, metric, comp in combos:
            own = metric_cache[("Type-1", m, w, metric)]
            other = metric_cache[(comp, m, w, metric)]
            defined = np.isfinite(own) & np.isfinite(other)
            win = (own < other) if metric == "std" else (own > other)
            beats[(m, w, metric, comp)] += (defined & win).astype(int)
        last_iteration = metric_cache

    cells = []
    for tix, horizon in enumerate(grid):
        for m, w, metric, comp in combos:
            p_hat = beats[(m, w, metric, comp)][tix] / iterations
            z, p = proportion_z_test(p_hat, p0, iterations)
            cells.append(CrossValCell(
                holding_period=horizon, m=m, weighting=w, metric=metric,
                comparator=comp, p_hat=float(p_hat), z=z, p_value=p,
            ))
    return CrossValReport(
        cells=tuple(cells), iterations=int(iterations), n_windows=n_windows,
        p0=float(p0), seed=int(seed), holding_periods=grid, backtest=report,
        last_iteration=last_iteration,
    )


# ---------------------------------------------------------------------------
# occurrence analysis


def _runs(flags):
    """Lengths of maximal consecutive True runs."""
    runs = []
    current = 0
    for f in flags:
        if f:
            current += 1
        elif current:
            runs.append(current)
            current = 0
    if current:
        runs.append(current)
    return tuple(runs)


def occurrence_analysis(profiles, k, sectors=None):
    """Count per-stock membership in the top-k core and top-k periphery
    across windows, with run lengths and sector-aggregated fractions."""
    profiles = list(profiles)
    if not profiles:
        raise ValueError("need at least one profile")
    labels = profiles[0].labels
    for p in profiles:
        if p.labels != labels:
            raise ValueError("profiles cover different symbol sets")
    n = len(labels)
    if not 1 <= k <= n:
        raise ValueError(f"k={k} outside 1..{n}")

    n_win = len(profiles)
    core_flags = np.zeros((n_win, n), dtype=bool)
    peri_flags = np.zeros((n_win, n), dtype=bool)
    for wix, prof in enumerate(profiles):
        ranked = sorted(range(n), key=lambda v: (-prof.coreness[v], labels[v]))
        core_flags[wix, ranked[:k]] = True
        ranked = sorted(range(n), key=lambda v: (prof.coreness[v], labels[v]))
        peri_flags[wix, ranked[:k]] = True

    sector_of = {}
    if sectors is not None:
        unknown = [lab for lab in labels if lab not in sectors]
        if unknown:
            warnings.warn(
                f"{len(unknown)} symbol(s) missing from the sector map; "
                f"bucketed as Unclassified: {', '.join(unknown[:5])}"
            )
        sector_of = {lab: sectors.get(lab, "Unclassified") for lab in labels}

    def sector_fractions(counts):
        total = counts.sum()
        if not sector_of or total == 0:
            return {}
        agg = {}
        for lab, cnt in zip(labels, counts):
            agg[sector_of[lab]] = agg.get(sector_of[lab], 0) + int(cnt)
        return {sec: cnt / total for sec, cnt in sorted(agg.items())}

    core_counts = core_flags.sum(axis=0)
    peri_counts = peri_flags.sum(axis=0)
    return OccurrenceReport(
        labels=labels, n_windows=n_win, k=int(k),
        core_counts=core_counts, periphery_counts=peri_counts,
        core_runs={lab: _runs(core_flags[:, v]) for v, lab in enumerate(labels)},
        periphery_runs={lab: _runs(peri_flags[:, v]) for v, lab in enumerate(labels)},
        sector_of=sector_of,
        sector_core_fractions=sector_fractions(core_counts),
        sector_periphery_fractions=sector_fractions(peri_counts),
    )


# ---------------------------------------------------------------------------
# file formats


def read_sector_map(path):
    """CSV `symbol,sector` -> dict."""
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0] != ["symbol", "sector"]:
        raise ValueError(f"{path}: expected header symbol,sector")
    out = {}
    for sym, sector in rows[1:]:
        if sym in out:
            raise DuplicateKeyError(f"duplicate symbol {sym!r} in sector map")
        out[sym] = sector
    return out


def _fmt(x):
    return "" if x is None else repr(float(x))


def write_report_csv(report, path):
    """`strategy,m,weighting,holding_period,sharpe,mean_return,std`; failed
    cells leave their undefined numbers blank."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["strategy", "m", "weighting", "holding_period",
                      "sharpe", "mean_return", "std"])
        for s in report.config.strategies:
            for m in report.config.sizes:
                for w in report.config.weightings:
                    for horizon in report.holding_periods:
                        cell = report.cells[(s, m, w, horizon)]
                        out.writerow([
                            s, m, w, horizon, _fmt(cell.sharpe),
                            _fmt(cell.mean_return), _fmt(cell.std),
                        ])


def write_crossval_csv(report, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["holding_period", "m", "weighting", "metric",
                      "comparator", "p_hat", "p_value"])
        for c in report.cells:
            out.writerow([
                c.holding_period, c.m, c.weighting, c.metric, c.comparator,
                repr(c.p_hat), repr(c.p_value),
            ])


def write_occurrence_csv(report, path):
    """Per-symbol occurrence counts and longest runs."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["symbol", "sector", "core_count", "periphery_count",
                      "max_core_run", "max_periphery_run"])
        for v, lab in enumerate(report.labels):
            out.writerow([
                lab, report.sector_of.get(lab, ""),
                int(report.core_counts[v]), int(report.periphery_counts[v]),
                max(report.core_runs[lab], default=0),
                max(report.periphery_runs[lab], default=0),
            ])


def write_occurrence_sectors_csv(report, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["group", "sector", "fraction"])
        for group, fractions in [
            ("core", report.sector_core_fractions),
            ("periphery", report.sector_periphery_fractions),
        ]:
            for sector, frac in fractions.items():
                out.writerow([group, sector, repr(float(frac))])
