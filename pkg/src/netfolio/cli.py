"""Command-line entry point.

Subcommands: ingest, network, backtest, crossval, significance, occurrence.
Every flag can also be set by key in a YAML config file (`--config`); flags
win on conflict. Outputs land in --outdir, the NETFOLIO_OUTDIR environment
variable, or the working directory, in that order of preference.

Exit codes: 0 success, 2 input validation failure, 3 windowing/configuration
failure, 4 missing input or upstream artifact.
"""
import argparse
import csv
import os
import sys

import yaml
from numpy.random import SeedSequence

from .backtest import (BacktestConfig, ReturnWindow, cross_validate,
                       formation_starts, occurrence_analysis, read_sector_map,
                       run_backtest, write_crossval_csv, write_occurrence_csv,
                       write_occurrence_sectors_csv, write_report_csv)
from .centrality import centrality_bundle, hybrid_measure, write_bundle_csv
from .coreperiphery import (cp_centralization, rombach_core_scores,
                            rossa_profile, significance_test,
                            stock_walk_weights, write_profile_csv,
                            write_scores_csv)
from .corr import exp_weights, pearson_matrix, weighted_pearson_matrix
from .errors import (ConfigurationError, DuplicateKeyError, EmptyInputError,
                     FlaggedSymbolError, InsufficientUniverseError,
                     MissingArtifactError, ParseError, UndefinedSharpeError,
                     WindowingError)
from .graph import build_pmfg, write_edgelist_csv
from .ingest import (DEFAULT_SESSION, load_daily_closes, load_tick_data,
                     log_returns, read_prices_csv, symbol_filter_report,
                     vwap_series, write_prices_csv)
from .portfolio import write_portfolios_csv

_VALIDATION_ERRORS = (ParseError, EmptyInputError, DuplicateKeyError,
                      FlaggedSymbolError, InsufficientUniverseError,
                      UndefinedSharpeError, ValueError)
_WINDOWING_ERRORS = (WindowingError, ConfigurationError)
_MISSING_ERRORS = (MissingArtifactError, FileNotFoundError)


def _log(ns, msg):
    if ns.verbose:
        print(msg, file=sys.stderr)


def _outdir(value):
    out = value or os.environ.get("NETFOLIO_OUTDIR") or "."
    os.makedirs(out, exist_ok=True)
    return out


def _require(path):
    if path is None:
        raise ValueError("no input file given")
    if not os.path.exists(path):
        raise MissingArtifactError(path)
    return path


def _merged(args, defaults):
    """Resolve each key as: command-line flag, then config file, then default."""
    data = {}
    cfg_path = getattr(args, "config", None)
    if cfg_path is not None:
        _require(cfg_path)
        with open(cfg_path) as fh:
            loaded = yaml.safe_load(fh)
        if loaded is None:
            loaded = {}
        if not isinstance(loaded, dict):
            raise ValueError(f"{cfg_path}: config must be a key-value mapping")
        data = loaded
        unknown = sorted(set(data) - set(defaults))
        if unknown:
            print(f"warning: ignoring unknown config keys: {', '.join(unknown)}",
                  file=sys.stderr)
    merged = {}
    for key, default in defaults.items():
        value = getattr(args, key, None)
        if value is None:
            value = data.get(key)
        if value is None:
            value = default
        merged[key] = value
    merged["outdir"] = _outdir(merged.get("outdir"))
    return argparse.Namespace(**merged)


def _window_config(ns, **overrides):
    kwargs = dict(
        regime=ns.regime,
        formation_length=ns.window,
        step=ns.step,
        seed=ns.seed,
    )
    for name in ("theta", "rombach_samples", "rombach_method"):
        if hasattr(ns, name) and getattr(ns, name) is not None:
            kwargs[name] = getattr(ns, name)
    kwargs.update(overrides)
    return BacktestConfig(**kwargs)


def _load_prices(ns):
    prices = read_prices_csv(_require(ns.prices))
    return prices, log_returns(prices)


# ---------------------------------------------------------------------------
# commands

_INGEST_DEFAULTS = dict(
    tick=None, daily=None, tick_length=30, session=list(DEFAULT_SESSION),
    max_missing=0.02, lenient=False, out="prices.csv",
    summary="ingest_summary.csv", outdir=None, verbose=False,
)


def cmd_ingest(args):
    ns = _merged(args, _INGEST_DEFAULTS)
    if (ns.tick is None) == (ns.daily is None):
        raise ValueError("give exactly one of --tick or --daily")
    session = tuple(ns.session)
    if ns.tick is not None:
        ticks = load_tick_data(_require(ns.tick), session=session,
                               lenient=ns.lenient)
        raw = vwap_series(ticks, tick_length=ns.tick_length, session=session)
    else:
        raw = load_daily_closes(_require(ns.daily), lenient=ns.lenient)
    matrix, report = symbol_filter_report(raw, ns.max_missing)
    out_path = os.path.join(ns.outdir, ns.out)
    write_prices_csv(matrix, out_path)
    with open(os.path.join(ns.outdir, ns.summary), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["symbol", "status", "reason"])
        w.writerows(report)
    dropped = [sym for sym, status, _ in report if status == "dropped"]
    print(f"kept {len(matrix.symbols)} symbols, dropped {len(dropped)}; "
          f"wrote {out_path}")
    if dropped:
        print(f"dropped: {', '.join(dropped)}")
    return 0


_NETWORK_DEFAULTS = dict(
    prices=None, regime="daily", window=None, step=None, theta=None,
    rombach_samples=None, rombach_method=None, method="both", seed=0,
    outdir=None, verbose=False,
)


def cmd_network(args):
    ns = _merged(args, _NETWORK_DEFAULTS)
    if ns.method not in ("both", "rossa", "rombach"):
        raise ValueError(f"unknown --method {ns.method!r}")
    prices, returns = _load_prices(ns)
    cfg = _window_config(ns)
    length = cfg.formation_length
    starts = formation_starts(len(prices.timeline), length, cfg.step)
    weights = exp_weights(length - 1, cfg.theta)
    centralization = []
    for wid, s in enumerate(starts):
        win = ReturnWindow(tuple(prices.symbols),
                           returns.values[s : s + length - 1])
        tag = f"w{wid:04d}"
        pmfg = build_pmfg(pearson_matrix(win), source_id=f"{tag}:plain")
        write_edgelist_csv(pmfg, os.path.join(ns.outdir, f"edges_plain_{tag}.csv"))
        pmfg_exp = build_pmfg(weighted_pearson_matrix(win, weights),
                              source_id=f"{tag}:exp")
        write_edgelist_csv(pmfg_exp, os.path.join(ns.outdir, f"edges_exp_{tag}.csv"))
        bundle = centrality_bundle(pmfg_exp)
        write_bundle_csv(bundle, hybrid_measure(bundle),
                         os.path.join(ns.outdir, f"hybrid_{tag}.csv"))
        walk = stock_walk_weights(pmfg)
        if ns.method in ("both", "rossa"):
            profile = rossa_profile(walk)
            write_profile_csv(profile, os.path.join(ns.outdir, f"profile_{tag}.csv"))
            centralization.append((wid, cp_centralization(profile)))
        if ns.method in ("both", "rombach"):
            scores = rombach_core_scores(
                walk, n_samples=cfg.rombach_samples,
                seed=SeedSequence(cfg.seed, spawn_key=(wid,)),
                method=cfg.rombach_method,
            )
            write_scores_csv(scores, os.path.join(ns.outdir, f"scores_{tag}.csv"))
        _log(ns, f"window {wid}: start {s}, artifacts written")
    if centralization:
        with open(os.path.join(ns.outdir, "centralization.csv"), "w",
                  newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["window_id", "C"])
            for wid, c in centralization:
                w.writerow([wid, repr(float(c))])
    print(f"processed {len(starts)} windows into {ns.outdir}")
    return 0


_BACKTEST_DEFAULTS = dict(
    prices=None, regime="daily", window=None, step=None, theta=None,
    holdings=None, sizes=None, strategies=None, weightings=None,
    rombach_samples=None, rombach_method=None, seed=0, jobs=1,
    out="report.csv", portfolios_out="portfolios.csv", outdir=None,
    verbose=False,
)


def _backtest_config(ns):
    overrides = {}
    if ns.holdings is not None:
        overrides["holding_periods"] = tuple(int(t) for t in ns.holdings)
    if ns.sizes is not None:
        overrides["sizes"] = tuple(int(m) for m in ns.sizes)
    if ns.strategies is not None:
        overrides["strategies"] = tuple(ns.strategies)
    if ns.weightings is not None:
        overrides["weightings"] = tuple(ns.weightings)
    return _window_config(ns, **overrides)


def cmd_backtest(args):
    ns = _merged(args, _BACKTEST_DEFAULTS)
    prices, returns = _load_prices(ns)
    cfg = _backtest_config(ns)
    report = run_backtest(cfg, returns, prices, jobs=int(ns.jobs))
    write_report_csv(report, os.path.join(ns.outdir, ns.out))
    write_portfolios_csv(report.portfolios,
                         os.path.join(ns.outdir, ns.portfolios_out))
    failed = sum(1 for c in report.cells.values() if not c.ok)
    print(f"windows={report.window_count} cells={len(report.cells)} "
          f"failed_cells={failed} wrote {ns.out}, {ns.portfolios_out}")
    for wid, key, reason in report.failures:
        _log(ns, f"window {wid} {key}: {reason}")
    return 0


_CROSSVAL_DEFAULTS = dict(
    prices=None, regime="daily", window=None, step=None, theta=None,
    sizes=None, weightings=None, n_windows=None, iterations=1000, p0=0.7,
    metrics=None, comparators=None, rombach_samples=None, rombach_method=None,
    seed=0, jobs=1, out="crossval.csv", outdir=None, verbose=False,
)


def cmd_crossval(args):
    ns = _merged(args, _CROSSVAL_DEFAULTS)
    prices, returns = _load_prices(ns)
    overrides = {}
    if ns.sizes is not None:
        overrides["sizes"] = tuple(int(m) for m in ns.sizes)
    if ns.weightings is not None:
        overrides["weightings"] = tuple(ns.weightings)
    cfg = _window_config(ns, **overrides)
    kwargs = {}
    if ns.metrics is not None:
        kwargs["metrics"] = tuple(ns.metrics)
    if ns.comparators is not None:
        kwargs["comparators"] = tuple(ns.comparators)
    report = cross_validate(
        cfg, returns, prices,
        n_windows=None if ns.n_windows is None else int(ns.n_windows),
        iterations=int(ns.iterations), p0=float(ns.p0), seed=int(ns.seed),
        jobs=int(ns.jobs), **kwargs,
    )
    write_crossval_csv(report, os.path.join(ns.outdir, ns.out))
    print(f"windows={report.backtest.window_count} sampled={report.n_windows} "
          f"iterations={report.iterations} rows={len(report.cells)} "
          f"wrote {ns.out}")
    return 0


_SIGNIFICANCE_DEFAULTS = dict(
    prices=None, regime="daily", window=None, step=None, rand=100, seed=0,
    out="significance.csv", nulls_out="significance_nulls.csv", outdir=None,
    verbose=False,
)


def cmd_significance(args):
    ns = _merged(args, _SIGNIFICANCE_DEFAULTS)
    prices, returns = _load_prices(ns)
    cfg = _window_config(ns)
    length = cfg.formation_length
    starts = formation_starts(len(prices.timeline), length, cfg.step)
    rows = []
    null_rows = []
    for wid, s in enumerate(starts):
        win = ReturnWindow(tuple(prices.symbols),
                           returns.values[s : s + length - 1])
        walk = stock_walk_weights(build_pmfg(pearson_matrix(win)))
        result = significance_test(
            walk, R=int(ns.rand), seed=SeedSequence(cfg.seed, spawn_key=(wid,))
        )
        rows.append((wid, result.C, result.p_value))
        for rep, c in enumerate(result.null_values):
            null_rows.append((wid, rep, float(c)))
        _log(ns, f"window {wid}: C={result.C:.4f} p={result.p_value:.3f}")
    with open(os.path.join(ns.outdir, ns.out), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["window_id", "C", "p_value"])
        for wid, c, p in rows:
            w.writerow([wid, repr(float(c)), repr(float(p))])
    with open(os.path.join(ns.outdir, ns.nulls_out), "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["window_id", "replicate", "C_null"])
        for wid, rep, c in null_rows:
            w.writerow([wid, rep, repr(c)])
    print(f"tested {len(rows)} windows with R={ns.rand}; wrote {ns.out}")
    return 0


_OCCURRENCE_DEFAULTS = dict(
    prices=None, regime="daily", window=None, step=None, seed=0, k=20,
    sectors=None, out="occurrence.csv", sectors_out="occurrence_sectors.csv",
    outdir=None, verbose=False,
)


def cmd_occurrence(args):
    ns = _merged(args, _OCCURRENCE_DEFAULTS)
    prices, returns = _load_prices(ns)
    cfg = _window_config(ns)
    length = cfg.formation_length
    starts = formation_starts(len(prices.timeline), length, cfg.step)
    profiles = []
    for wid, s in enumerate(starts):
        win = ReturnWindow(tuple(prices.symbols),
                           returns.values[s : s + length - 1])
        profiles.append(
            rossa_profile(stock_walk_weights(build_pmfg(pearson_matrix(win))))
        )
        _log(ns, f"window {wid}: profile done")
    sectors = read_sector_map(_require(ns.sectors)) if ns.sectors else None
    report = occurrence_analysis(profiles, int(ns.k), sectors=sectors)
    write_occurrence_csv(report, os.path.join(ns.outdir, ns.out))
    if sectors:
        write_occurrence_sectors_csv(
            report, os.path.join(ns.outdir, ns.sectors_out)
        )
    print(f"analyzed {report.n_windows} windows at k={report.k}; wrote {ns.out}")
    return 0


# ---------------------------------------------------------------------------
# parser


def _add_common(sp):
    sp.add_argument("--config", help="YAML config file; flags win on conflict")
    sp.add_argument("--outdir",
                    help="output directory (default $NETFOLIO_OUTDIR or .)")
    sp.add_argument("--verbose", action="store_const", const=True,
                    help="log progress to stderr")


def _add_window_flags(sp, seeded=True):
    sp.add_argument("--regime", choices=["daily", "highfreq"],
                    help="window-length defaults: daily L=125/step=125, "
                         "highfreq L=240/step=60")
    sp.add_argument("-L", "--window", type=int, dest="window",
                    help="formation window length in price rows")
    sp.add_argument("--step", type=int, help="window start spacing")
    if seeded:
        sp.add_argument("--seed", type=int, help="master seed (default 0)")


def _add_rombach_flags(sp):
    sp.add_argument("--theta", type=float,
                    help="exponential weighting decay (default: window length)")
    sp.add_argument("--rombach-samples", type=int, dest="rombach_samples",
                    help="number of sampled (alpha, beta) pairs (default 10000)")
    sp.add_argument("--rombach-method", dest="rombach_method",
                    choices=["auto", "exhaustive", "anneal"],
                    help="core-score optimizer (default auto)")


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="netfolio",
        description="Correlation-network portfolio toolkit: ingest prices, "
                    "build PMFG networks, profile core-periphery structure, "
                    "and backtest periphery-based strategies.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build the canonical price matrix")
    p.add_argument("--tick", help="tick CSV (timestamp,symbol,price,volume)")
    p.add_argument("--daily", help="daily CSV (date,symbol,close)")
    p.add_argument("--tick-length", type=int, dest="tick_length",
                   help="VWAP bar length in seconds (default 30)")
    p.add_argument("--session", nargs=2, metavar=("OPEN", "CLOSE"),
                   help="trading session, e.g. 09:30 15:30")
    p.add_argument("--max-missing", type=float, dest="max_missing",
                   help="max missing fraction per symbol (default 0.02)")
    p.add_argument("--lenient", action="store_const", const=True,
                   help="accept extra CSV columns")
    p.add_argument("--out", help="price matrix filename (default prices.csv)")
    p.add_argument("--summary",
                   help="kept/dropped summary filename "
                        "(default ingest_summary.csv)")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("network",
                       help="per-window PMFG, profile, core scores, hybrid")
    p.add_argument("--prices", help="canonical price matrix CSV")
    _add_window_flags(p)
    _add_rombach_flags(p)
    p.add_argument("--method", choices=["both", "rossa", "rombach"],
                   help="which core-periphery outputs to write (default both)")
    _add_common(p)
    p.set_defaults(func=cmd_network)

    p = sub.add_parser("backtest", help="rolling-window strategy backtest")
    p.add_argument("--prices", help="canonical price matrix CSV")
    _add_window_flags(p)
    _add_rombach_flags(p)
    p.add_argument("--holdings", nargs="+", type=int,
                   help="holding periods (default 1..L)")
    p.add_argument("--sizes", nargs="+", type=int,
                   help="portfolio sizes (default 5 10 20 30)")
    p.add_argument("--strategies", nargs="+",
                   help="strategies (default Type-1 .. Type-6)")
    p.add_argument("--weightings", nargs="+",
                   choices=["uniform", "markowitz"],
                   help="weighting schemes (default both)")
    p.add_argument("--jobs", type=int, help="parallel window workers")
    p.add_argument("--out", help="report filename (default report.csv)")
    p.add_argument("--portfolios-out", dest="portfolios_out",
                   help="portfolio log filename (default portfolios.csv)")
    _add_common(p)
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("crossval",
                       help="resampled Type-1 vs comparator proportion tests")
    p.add_argument("--prices", help="canonical price matrix CSV")
    _add_window_flags(p)
    _add_rombach_flags(p)
    p.add_argument("--sizes", nargs="+", type=int)
    p.add_argument("--weightings", nargs="+",
                   choices=["uniform", "markowitz"])
    p.add_argument("--n-windows", type=int, dest="n_windows",
                   help="windows sampled per iteration (default: all)")
    p.add_argument("--iterations", type=int,
                   help="resampling iterations (default 1000)")
    p.add_argument("--p0", type=float,
                   help="null proportion for the z-test (default 0.7)")
    p.add_argument("--metrics", nargs="+",
                   choices=["sharpe", "mean_return", "std"])
    p.add_argument("--comparators", nargs="+",
                   help="strategies to compare against (default Type-2 Type-3)")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="output filename (default crossval.csv)")
    _add_common(p)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("significance",
                       help="cp-centralization vs degree-preserving nulls")
    p.add_argument("--prices", help="canonical price matrix CSV")
    _add_window_flags(p)
    p.add_argument("--rand", type=int,
                   help="randomized replicates per window (default 100)")
    p.add_argument("--out", help="output filename (default significance.csv)")
    p.add_argument("--nulls-out", dest="nulls_out",
                   help="null distribution filename "
                        "(default significance_nulls.csv)")
    _add_common(p)
    p.set_defaults(func=cmd_significance)

    p = sub.add_parser("occurrence",
                       help="top-k core/periphery membership across windows")
    p.add_argument("--prices", help="canonical price matrix CSV")
    _add_window_flags(p, seeded=False)
    p.add_argument("--seed", type=int, help=argparse.SUPPRESS)
    p.add_argument("--k", type=int, help="group size (default 20)")
    p.add_argument("--sectors", help="sector map CSV (symbol,sector)")
    p.add_argument("--out", help="output filename (default occurrence.csv)")
    p.add_argument("--sectors-out", dest="sectors_out",
                   help="sector fraction filename "
                        "(default occurrence_sectors.csv)")
    _add_common(p)
    p.set_defaults(func=cmd_occurrence)

    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args) or 0
    except _MISSING_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4
    except _WINDOWING_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except _VALIDATION_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
