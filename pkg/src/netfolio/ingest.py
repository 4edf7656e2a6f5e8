"""Loading tick/daily price data, VWAP aggregation, completeness filtering.

Timestamps are interpreted in exchange-local session time; the library never
converts timezones. Missing prices are NaN cells in the PriceMatrix until
`filter_symbols` repairs or removes them.
"""
import csv
import math
import warnings
from dataclasses import dataclass, field
from datetime import date, datetime, timedelta

import numpy as np

from .errors import (
    DuplicateKeyError,
    EmptyInputError,
    InsufficientUniverseError,
    ParseError,
)

DEFAULT_SESSION = ("09:30", "15:30")
_EPOCH_DAY0 = date(1970, 1, 1)


@dataclass(frozen=True)
class TickRecord:
    timestamp: float  # seconds since epoch, exchange-local
    symbol: str
    price: float
    volume: int
    day: str  # ISO date of the session day
    tod: int  # seconds past local midnight


@dataclass(frozen=True)
class PriceMatrix:
    """Per-symbol prices on a shared time grid; NaN marks a missing cell."""

    symbols: tuple
    timeline: tuple
    values: np.ndarray = field(repr=False)

    @property
    def n_missing(self):
        return int(np.isnan(self.values).sum())


@dataclass(frozen=True)
class ReturnMatrix:
    """Log returns; one row shorter than the price timeline."""

    symbols: tuple
    timeline: tuple
    values: np.ndarray = field(repr=False)


def _parse_clock(text):
    parts = str(text).split(":")
    if len(parts) not in (2, 3):
        raise ValueError(f"bad clock time {text!r}")
    h, m = int(parts[0]), int(parts[1])
    s = int(parts[2]) if len(parts) == 3 else 0
    return h * 3600 + m * 60 + s


def _parse_timestamp(text):
    """Epoch seconds + (day label, seconds-of-day) for int or ISO timestamps."""
    text = text.strip()
    try:
        ts = int(text)
    except ValueError:
        dt = datetime.fromisoformat(text)
        tod = dt.hour * 3600 + dt.minute * 60 + dt.second
        return dt.date().toordinal() * 86400.0 + tod, dt.date().isoformat(), tod
    dayn, tod = divmod(ts, 86400)
    return float(ts), (_EPOCH_DAY0 + timedelta(days=dayn)).isoformat(), int(tod)


def _read_rows(path, required, lenient):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise EmptyInputError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if lenient:
            missing = [c for c in required if c not in header]
            if missing:
                raise ParseError(f"{path}: missing column(s) {missing}", line=1)
            cols = [header.index(c) for c in required]
        else:
            if header != list(required):
                raise ParseError(
                    f"{path}: expected header {','.join(required)}, got "
                    f"{','.join(header)} (use lenient mode for extra columns)",
                    line=1,
                )
            cols = list(range(len(required)))
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) < len(header):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}",
                                 line=lineno)
            rows.append((lineno, [row[c].strip() for c in cols]))
    if not rows:
        raise EmptyInputError(f"{path}: no data rows")
    return rows


def load_tick_data(path, session=DEFAULT_SESSION, lenient=False):
    """Parse a tick CSV and keep trades inside the [start, end) session window.

    Returns TickRecords sorted by (symbol, timestamp).
    """
    start = _parse_clock(session[0])
    end = _parse_clock(session[1])
    if not start < end:
        raise ValueError("session start must precede session end")
    records = []
    for lineno, (ts_text, symbol, price_text, volume_text) in _read_rows(
        path, ("timestamp", "symbol", "price", "volume"), lenient
    ):
        try:
            ts, day, tod = _parse_timestamp(ts_text)
        except ValueError as exc:
            raise ParseError(f"bad timestamp {ts_text!r}: {exc}", line=lineno) from None
        try:
            price = float(price_text)
            volume = int(volume_text)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if price <= 0:
            raise ParseError(f"price must be positive, got {price}", line=lineno)
        if volume < 0:
            raise ParseError(f"volume must be >= 0, got {volume}", line=lineno)
        if not symbol:
            raise ParseError("empty symbol", line=lineno)
        if start <= tod < end:
            records.append(TickRecord(ts, symbol, price, volume, day, tod))
    records.sort(key=lambda r: (r.symbol, r.timestamp))
    return records


def vwap_series(ticks, tick_length=30, session=DEFAULT_SESSION):
    """Aggregate ticks into per-interval volume-weighted average prices.

    The session is cut into fixed intervals of ``tick_length`` seconds (720
    per day for a 6-hour session at 30 s). Intervals with zero traded volume
    are missing; a symbol that traded zero volume over its whole history is
    warned about and left all-missing for `filter_symbols` to remove.
    """
    if tick_length <= 0:
        raise ValueError("tick_length must be positive")
    start = _parse_clock(session[0])
    end = _parse_clock(session[1])
    n_intervals = math.ceil((end - start) / tick_length)
    symbols = sorted({r.symbol for r in ticks})
    days = sorted({r.day for r in ticks})
    sym_ix = {s: k for k, s in enumerate(symbols)}
    day_ix = {d: k for k, d in enumerate(days)}

    pv = np.zeros((len(days) * n_intervals, len(symbols)))
    vol = np.zeros_like(pv)
    for r in ticks:
        slot = (r.tod - start) // tick_length
        if not 0 <= slot < n_intervals:
            continue  # outside the session grid
        row = day_ix[r.day] * n_intervals + slot
        col = sym_ix[r.symbol]
        pv[row, col] += r.price * r.volume
        vol[row, col] += r.volume

    with np.errstate(invalid="ignore", divide="ignore"):
        prices = np.where(vol > 0, pv / np.where(vol > 0, vol, 1.0), np.nan)

    dead = [s for k, s in enumerate(symbols) if not (vol[:, k] > 0).any()]
    if dead:
        warnings.warn(
            f"symbol(s) with zero traded volume flagged for removal: "
            f"{', '.join(dead)}",
            stacklevel=2,
        )

    timeline = []
    for d in days:
        for i in range(n_intervals):
            tod = start + i * tick_length
            timeline.append(f"{d}T{tod // 3600:02d}:{tod % 3600 // 60:02d}:{tod % 60:02d}")
    return PriceMatrix(tuple(symbols), tuple(timeline), prices)


def load_daily_closes(path, lenient=False):
    """Parse a daily-close CSV into a PriceMatrix on the union of dates."""
    cells = {}
    for lineno, (day, symbol, close_text) in _read_rows(
        path, ("date", "symbol", "close"), lenient
    ):
        try:
            close = float(close_text)
        except ValueError as exc:
            raise ParseError(str(exc), line=lineno) from None
        if close <= 0:
            raise ParseError(f"close must be positive, got {close}", line=lineno)
        if not symbol:
            raise ParseError("empty symbol", line=lineno)
        key = (day, symbol)
        if key in cells:
            raise DuplicateKeyError(f"duplicate (date, symbol) {key} at line {lineno}")
        cells[key] = close

    dates = sorted({d for d, _ in cells})
    symbols = sorted({s for _, s in cells})
    values = np.full((len(dates), len(symbols)), np.nan)
    day_ix = {d: k for k, d in enumerate(dates)}
    sym_ix = {s: k for k, s in enumerate(symbols)}
    for (d, s), close in cells.items():
        values[day_ix[d], sym_ix[s]] = close
    return PriceMatrix(tuple(symbols), tuple(dates), values)


def symbol_filter_report(prices, max_missing_fraction):
    """Filtered matrix plus per-symbol (status, reason) rows.

    Symbols whose missing fraction exceeds the threshold are removed, as are
    symbols whose first observation is missing (nothing to forward-fill from).
    Remaining gaps are forward-filled with the most recent prior price.
    """
    if not 0 <= max_missing_fraction <= 1:
        raise ValueError("max_missing_fraction must lie in [0, 1]")
    vals = prices.values
    n_rows = vals.shape[0]
    keep = []
    report = []
    for k, sym in enumerate(prices.symbols):
        col = vals[:, k]
        miss = np.isnan(col)
        frac = miss.mean() if n_rows else 0.0
        if frac > max_missing_fraction:
            report.append((sym, "dropped", f"missing fraction {frac:.4f} above threshold"))
        elif n_rows and miss[0]:
            report.append((sym, "dropped", "leading missing cell"))
        else:
            keep.append(k)
            report.append((sym, "kept", ""))

    filled = vals[:, keep].copy()
    for c in range(filled.shape[1]):
        col = filled[:, c]
        for r in range(1, n_rows):
            if np.isnan(col[r]):
                col[r] = col[r - 1]

    out = PriceMatrix(
        tuple(prices.symbols[k] for k in keep), prices.timeline, filled
    )
    if out.values.shape[1] < 3:
        raise InsufficientUniverseError(
            f"only {out.values.shape[1]} symbols survive filtering; need >= 3"
        )
    return out, report


def filter_symbols(prices, max_missing_fraction):
    """Remove incomplete symbols and forward-fill the remaining gaps."""
    out, _ = symbol_filter_report(prices, max_missing_fraction)
    return out


def log_returns(prices):
    """Log returns between consecutive timeline rows."""
    vals = prices.values
    if np.isnan(vals).any():
        raise ValueError("price matrix has missing entries; filter_symbols first")
    if (vals <= 0).any():
        raise ValueError("prices must be positive for log returns")
    if vals.shape[0] < 2:
        raise ValueError("need at least 2 price rows")
    rets = np.log(vals[1:] / vals[:-1])
    return ReturnMatrix(prices.symbols, tuple(prices.timeline[1:]), rets)


def write_prices_csv(prices, path):
    """Canonical price-matrix CSV: header `time,<symbols...>`, blank = missing."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["time", *prices.symbols])
        for r, label in enumerate(prices.timeline):
            row = [label]
            for x in prices.values[r]:
                row.append("" if np.isnan(x) else repr(float(x)))
            out.writerow(row)


def read_prices_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["time"]:
        raise ParseError(f"{path}: expected 'time' header", line=1)
    symbols = tuple(rows[0][1:])
    timeline = tuple(r[0] for r in rows[1:])
    values = np.full((len(timeline), len(symbols)), np.nan)
    for r, row in enumerate(rows[1:], start=0):
        if len(row) != len(symbols) + 1:
            raise ParseError("row width mismatch", line=r + 2)
        for c, cell in enumerate(row[1:]):
            if cell:
                values[r, c] = float(cell)
    return PriceMatrix(symbols, timeline, values)
