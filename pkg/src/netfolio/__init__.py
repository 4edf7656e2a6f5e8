"""Correlation-network portfolio toolkit.

Pipeline: price ingestion (tick VWAP bars or daily closes) -> log returns ->
plain / exponentially weighted Pearson correlation -> planar maximally
filtered graph -> core-periphery structure (persistence profile, annealed
core scores, hybrid centrality measure) -> periphery-vs-core portfolio
backtests with uniform and maximum-Sharpe weights.
"""
from .backtest import (ALL_STRATEGIES, BacktestConfig, BacktestReport,
                       CellStats, CrossValCell, CrossValReport,
                       OccurrenceReport, ReturnWindow, cross_validate,
                       formation_starts, in_sample_sharpe,
                       occurrence_analysis, proportion_z_test,
                       read_sector_map, run_backtest, window_network,
                       write_crossval_csv, write_occurrence_csv,
                       write_occurrence_sectors_csv, write_report_csv)
from .centrality import (CentralityBundle, HybridScores, bundle_from_matrices,
                         centrality_bundle, hybrid_measure,
                         power_iteration_eigenvector, write_bundle_csv)
from .coreperiphery import (CorePeripheryProfile, CoreScores,
                            SignificanceReport, core_assignments,
                            core_value_ladders, cp_centralization,
                            degree_preserving_randomize,
                            persistence_probability, pure_periphery,
                            rombach_core_scores, rossa_profile,
                            significance_test, stock_walk_weights,
                            write_profile_csv, write_scores_csv)
from .corr import (CorrelationMatrix, ExpWeights, exp_weights, pearson_matrix,
                   read_correlation_csv, weighted_pearson_matrix,
                   write_correlation_csv)
from .errors import (ConfigurationError, DuplicateKeyError, EmptyInputError,
                     FlaggedSymbolError, InsufficientUniverseError,
                     MissingArtifactError, NetfolioError, ParseError,
                     UndefinedSharpeError, WindowingError)
from .graph import (PmfgGraph, WeightedGraph, build_pmfg, is_planar,
                    read_edgelist_csv, write_edgelist_csv)
from .ingest import (PriceMatrix, ReturnMatrix, TickRecord, filter_symbols,
                     load_daily_closes, load_tick_data, log_returns,
                     read_prices_csv, symbol_filter_report, vwap_series,
                     write_prices_csv)
from .planar import planar_check
from .portfolio import (MarkowitzResult, PerformanceRecord, Portfolio,
                        markowitz_weights, portfolio_return, select_portfolio,
                        sharpe_ratio, uniform_weights, write_portfolios_csv)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
