"""Synthetic fixtures: factor-model price histories with planted
core-periphery structure, a tick-stream generator, and graph fixtures for
significance-test calibration. Everything is reproducible from its seed.
"""
import csv
import datetime

import networkx as nx
import numpy as np
from numpy.random import SeedSequence, default_rng

from .graph import WeightedGraph
from .ingest import PriceMatrix

_EPOCH = datetime.date(2015, 1, 2)


def factor_market(n_days, groups, factor_vol=0.012, seed=0, start_price=100.0):
    """Daily price matrix from a one-factor model.

    ``groups`` is a sequence of (prefix, count, drift, factor loading,
    idiosyncratic vol); each member i of a group gets returns
    drift + loading * F_t + vol * eps_it. Returns (PriceMatrix, sector map)
    where the sector is the group prefix.
    """
    rng = default_rng(SeedSequence(seed))
    symbols = []
    sectors = {}
    mus, betas, vols = [], [], []
    for prefix, count, mu, beta, vol in groups:
        for k in range(count):
            sym = f"{prefix}{k:02d}"
            symbols.append(sym)
            sectors[sym] = prefix
            mus.append(mu)
            betas.append(beta)
            vols.append(vol)
    n = len(symbols)
    if n == 0 or n_days < 2:
        raise ValueError("need at least one symbol and 2 days")
    factor = rng.normal(0.0, factor_vol, size=n_days - 1)
    eps = rng.normal(0.0, 1.0, size=(n_days - 1, n))
    rets = (np.asarray(mus)[None, :]
            + factor[:, None] * np.asarray(betas)[None, :]
            + eps * np.asarray(vols)[None, :])
    prices = start_price * np.exp(
        np.vstack([np.zeros(n), np.cumsum(rets, axis=0)])
    )
    timeline = tuple(
        (_EPOCH + datetime.timedelta(days=k)).isoformat() for k in range(n_days)
    )
    matrix = PriceMatrix(symbols=tuple(symbols), timeline=timeline,
                         values=prices)
    return matrix, sectors


def planted_market(n_days=400, seed=11):
    """Bundled 40-symbol daily fixture with a planted correlated core.

    FIN symbols load fully on a common factor and drift down, UTL symbols are
    idiosyncratic with strong positive drift (the plants that should surface
    in periphery portfolios), IND symbols sit in between with a slight
    negative drift. Symbols come out in sorted order.
    """
    groups = (
        ("FIN", 8, -0.0025, 1.0, 0.004),
        ("IND", 24, -0.001, 0.3, 0.010),
        ("UTL", 8, 0.004, 0.0, 0.010),
    )
    return factor_market(n_days, groups, factor_vol=0.012, seed=seed)


def block_market(n_days=800, n_block=5, n_total=40, seed=3):
    """One tight factor block of `n_block` symbols among independent ones."""
    groups = (
        ("BLK", n_block, 0.0, 1.0, 0.004),
        ("RST", n_total - n_block, 0.0, 0.0, 0.012),
    )
    return factor_market(n_days, groups, factor_vol=0.012, seed=seed)


def write_daily_csv(prices, path):
    """`date,symbol,close` long-format rows, grouped by date."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["date", "symbol", "close"])
        for t, day in enumerate(prices.timeline):
            for k, sym in enumerate(prices.symbols):
                out.writerow([day, sym, repr(float(prices.values[t, k]))])


def write_sector_csv(sectors, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["symbol", "sector"])
        for sym in sorted(sectors):
            out.writerow([sym, sectors[sym]])


def tick_market(n_days=2, n_symbols=4, trades_per_day=4000, seed=7,
                session=("09:30", "15:30")):
    """Synthetic tick stream: (timestamp, symbol, price, volume) rows in time
    order, dense enough that 30-second VWAP bars rarely come up empty."""
    rng = default_rng(SeedSequence(seed))
    h0, m0 = map(int, session[0].split(":"))
    h1, m1 = map(int, session[1].split(":"))
    open_s = h0 * 3600 + m0 * 60
    close_s = h1 * 3600 + m1 * 60
    rows = []
    for d in range(n_days):
        day = (_EPOCH + datetime.timedelta(days=d)).isoformat()
        for s in range(n_symbols):
            sym = f"TCK{s:02d}"
            offsets = np.sort(rng.integers(open_s, close_s, size=trades_per_day))
            steps = rng.normal(0.0, 3e-4, size=trades_per_day)
            prices = 100.0 * np.exp(np.cumsum(steps) + 0.01 * d + 0.05 * s)
            volumes = rng.integers(1, 500, size=trades_per_day)
            for off, price, vol in zip(offsets, prices, volumes):
                hh, rem = divmod(int(off), 3600)
                mm, ss = divmod(rem, 60)
                rows.append(
                    (f"{day}T{hh:02d}:{mm:02d}:{ss:02d}", sym,
                     float(price), int(vol))
                )
    rows.sort(key=lambda r: (r[0], r[1]))
    return rows


def write_tick_csv(rows, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["timestamp", "symbol", "price", "volume"])
        for ts, sym, price, vol in rows:
            out.writerow([ts, sym, repr(price), vol])


def planted_core_graph(n_core=10, n_periphery=40, seed=0):
    """Dense weighted core plus a sparse periphery hanging off it.

    Core pairs are connected with probability 0.85 and strong weights; each
    periphery vertex attaches to four random core vertices with weak weights
    and never to another periphery vertex. Periphery vertices take the low
    indices so zero-persistence ties resolve toward the true periphery, and
    the core stays slightly below a clique: a complete core would freeze the
    double-edge-swap null model (every swap that could create a
    periphery-periphery edge also needs a currently-missing core pair).
    """
    rng = default_rng(SeedSequence(seed))
    labels = [f"P{k:02d}" for k in range(n_periphery)]
    labels += [f"C{k:02d}" for k in range(n_core)]
    edges = {}
    for i in range(n_core):
        for j in range(i + 1, n_core):
            if rng.random() < 0.85:
                edges[(n_periphery + i, n_periphery + j)] = float(rng.uniform(0.5, 0.7))
    for v in range(n_periphery):
        for c in rng.choice(n_core, size=4, replace=False):
            edges[(v, n_periphery + int(c))] = float(rng.uniform(0.2, 0.4))
    return WeightedGraph(labels, edges)


def homogeneous_graph(n=30, degree=4, seed=0):
    """Connected random regular graph with lightly jittered weights."""
    rng = default_rng(SeedSequence(seed))
    attempt = int(rng.integers(0, 2**31 - 1))
    for _ in range(100):
        g = nx.random_regular_graph(degree, n, seed=attempt)
        if nx.is_connected(g):
            break
        attempt += 1
    else:
        raise RuntimeError("no connected regular graph found")
    labels = [f"V{k:02d}" for k in range(n)]
    edges = {}
    for u, v in sorted(g.edges()):
        a, b = (u, v) if u < v else (v, u)
        edges[(a, b)] = float(1.0 + rng.uniform(-0.05, 0.05))
    return WeightedGraph(labels, edges)
