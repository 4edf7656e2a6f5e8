#!/usr/bin/env python3
"""Generate the bundled synthetic datasets under data/.

Produces three fixtures:

  * a 40-symbol daily close panel with a planted core-periphery market
    (one tightly coupled financial core, a weakly coupled industrial
    midfield, and a handful of idiosyncratic utilities with positive
    drift), plus its sector map;
  * an 800-day two-block panel used for longer windowed runs;
  * a small two-day tick tape for exercising the intraday ingestion path.

All three are deterministic for a given seed, so re-running this script
reproduces the committed files byte for byte.
"""

import argparse
import os

from netfolio.synthetic import (
    block_market,
    planted_market,
    tick_market,
    write_daily_csv,
    write_sector_csv,
    write_tick_csv,
)


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--outdir", default="data", help="output directory (default: data)")
    parser.add_argument("--days", type=int, default=400, help="trading days in the planted panel")
    parser.add_argument("--seed", type=int, default=11, help="seed for the planted panel")
    args = parser.parse_args(argv)

    os.makedirs(args.outdir, exist_ok=True)

    prices, sectors = planted_market(n_days=args.days, seed=args.seed)
    daily_path = os.path.join(args.outdir, "synthetic_daily.csv")
    sector_path = os.path.join(args.outdir, "synthetic_sectors.csv")
    write_daily_csv(prices, daily_path)
    write_sector_csv(sectors, sector_path)
    print(f"wrote {daily_path} ({prices.values.shape[0]} days x {len(prices.symbols)} symbols)")
    print(f"wrote {sector_path}")

    block, _ = block_market()
    block_path = os.path.join(args.outdir, "synthetic_block_daily.csv")
    write_daily_csv(block, block_path)
    print(f"wrote {block_path} ({block.values.shape[0]} days x {len(block.symbols)} symbols)")

    ticks = tick_market()
    tick_path = os.path.join(args.outdir, "synthetic_ticks.csv")
    write_tick_csv(ticks, tick_path)
    print(f"wrote {tick_path} ({len(ticks)} trades)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
