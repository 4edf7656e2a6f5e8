"""Exception types shared across the toolkit."""


class NetfolioError(Exception):
    """Base class for all toolkit errors."""


class ParseError(NetfolioError):
    """A raw input row could not be parsed.

    Carries the 1-based line number of the offending row.
    """

    def __init__(self, msg, line=None):
        if line is not None:
            msg = f"line {line}: {msg}"
        super().__init__(msg)
        self.line = line


class EmptyInputError(NetfolioError):
    """An input file contained no data rows."""


class DuplicateKeyError(NetfolioError):
    """The same (date, symbol) key appeared more than once."""


class InsufficientUniverseError(NetfolioError):
    """Fewer symbols survived filtering than the downstream step needs."""


class FlaggedSymbolError(NetfolioError):
    """A symbol's data is unusable (e.g. zero-variance return column)."""

    def __init__(self, msg, symbols=()):
        super().__init__(msg)
        self.symbols = tuple(symbols)


class ConfigurationError(NetfolioError):
    """A run configuration is inconsistent or cannot be satisfied."""


class WindowingError(NetfolioError):
    """The timeline is too short for the requested window layout."""


class UndefinedSharpeError(NetfolioError):
    """Sharpe ratio is undefined because the return std is zero.

    The mean return is still informative and is carried on the exception.
    """

    def __init__(self, mean):
        super().__init__(f"sharpe undefined: zero std (mean return {mean!r})")
        self.mean = mean


class MissingArtifactError(NetfolioError):
    """An upstream pipeline artifact is absent from disk."""

    def __init__(self, path):
        super().__init__(f"missing artifact: {path}")
        self.path = path
