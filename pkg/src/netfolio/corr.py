"""Plain and exponentially-weighted Pearson correlation matrices."""
import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import FlaggedSymbolError


@dataclass(frozen=True)
class ExpWeights:
    """Exponential observation weights over a window of length T.

    w_t is proportional to exp((t - T) / theta) for t = 1..T and the sequence
    is normalized to unit sum, so later observations always weigh more.
    """

    T: int
    theta: float
    weights: np.ndarray = field(repr=False)

    def __len__(self):
        return self.T


@dataclass(frozen=True)
class CorrelationMatrix:
    symbols: tuple
    values: np.ndarray = field(repr=False)

    def sub(self, indices):
        """Correlation submatrix restricted to the given symbol indices."""
        idx = list(indices)
        return CorrelationMatrix(
            symbols=tuple(self.symbols[i] for i in idx),
            values=self.values[np.ix_(idx, idx)].copy(),
        )


def exp_weights(T, theta):
    """Normalized exponential weight sequence of length T with decay theta."""
    T = int(T)
    if T < 1:
        raise ValueError("window length T must be >= 1")
    if theta <= 0:
        raise ValueError("decay constant theta must be positive")
    t = np.arange(1, T + 1, dtype=float)
    w = np.exp((t - T) / float(theta))
    w /= w.sum()
    return ExpWeights(T=T, theta=float(theta), weights=w)


def _window_values(window):
    """Accept a ReturnMatrix-like object or a plain 2-D array."""
    if hasattr(window, "values"):
        y = np.asarray(window.values, dtype=float)
        symbols = tuple(window.symbols)
    else:
        y = np.asarray(window, dtype=float)
        symbols = tuple(f"V{k}" for k in range(y.shape[1]))
    if y.ndim != 2:
        raise ValueError("return window must be 2-D (rows = time)")
    return symbols, y


def _check_variance(symbols, var):
    flat = [symbols[k] for k in np.nonzero(var == 0.0)[0]]
    if flat:
        raise FlaggedSymbolError(
            f"zero-variance return column(s): {', '.join(flat)}", symbols=flat
        )


def _finalize(c):
    c = (c + c.T) / 2.0
    c = np.clip(c, -1.0, 1.0)
    np.fill_diagonal(c, 1.0)
    return c


def pearson_matrix(window):
    """Sample Pearson correlation matrix of a return window (rows = time)."""
    symbols, y = _window_values(window)
    if y.shape[0] < 2:
        raise ValueError("need at least 2 rows to correlate")
    _check_variance(symbols, y.var(axis=0))
    c = np.corrcoef(y, rowvar=False)
    return CorrelationMatrix(symbols=symbols, values=_finalize(c))


def weighted_pearson_matrix(window, weights):
    """Weighted Pearson correlation matrix.

    With weights w_t, means, variances, and covariances are all computed as
    w-weighted sums; the coefficient is the weighted covariance divided by the
    weighted standard deviations. ``weights`` may be an ExpWeights or any
    positive sequence of the window length (the result is invariant to the
    weight scale).
    """
    symbols, y = _window_values(window)
    w = np.asarray(weights.weights if isinstance(weights, ExpWeights) else weights,
                   dtype=float)
    if w.ndim != 1 or w.shape[0] != y.shape[0]:
        raise ValueError(
            f"weight length {w.shape[0] if w.ndim == 1 else w.shape} "
            f"!= window length {y.shape[0]}"
        )
    if not (w > 0).all():
        raise ValueError("weights must be strictly positive")
    w = w / w.sum()
    mu = w @ y
    yc = y - mu
    cov = yc.T @ (yc * w[:, None])
    var = np.diag(cov).copy()
    _check_variance(symbols, var)
    d = np.sqrt(var)
    c = cov / np.outer(d, d)
    return CorrelationMatrix(symbols=symbols, values=_finalize(c))


def write_correlation_csv(cm, path):
    """Write a correlation matrix with a symbol header row and column."""
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["symbol", *cm.symbols])
        for k, sym in enumerate(cm.symbols):
            out.writerow([sym, *[repr(float(x)) for x in cm.values[k]]])


def read_correlation_csv(path):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][:1] != ["symbol"]:
        raise ValueError(f"{path}: expected 'symbol' header")
    symbols = tuple(rows[0][1:])
    values = np.array([[float(x) for x in r[1:]] for r in rows[1:]])
    return CorrelationMatrix(symbols=symbols, values=values)
