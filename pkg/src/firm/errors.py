"""Exception types shared across the package."""


class FirmError(ValueError):
    """Base class for all errors raised by this package."""


class DataFormatError(FirmError):
    """Malformed input file (bad cell, ragged row, unknown symbol, ...)."""


class DegenerateFeatureError(FirmError):
    """Feature is constant (or otherwise unusable) on the given data."""


class BudgetExceededError(FirmError):
    """Requested table is larger than the configured cell budget."""
