"""Exceptions raised by the toolkit. Config errors use Django's `ValidationError`."""


class BlowupError(Exception):
    """Root of every toolkit error."""


class ParameterDomainError(BlowupError, ValueError):
    """A closed-form quantity was requested outside the range where it is defined."""


class GridMismatchError(BlowupError, ValueError):
    """Fields live on different grids, or an operator is undefined in this dimension."""


class HypothesisError(BlowupError):
    """
    A theorem hypothesis failed where the operation requires it.

    Parameters:
    - `failed` - Names of the failed hypotheses, in check order.
    """

    def __init__(self, message, failed=()):
        super().__init__(message)
        self.failed = list(failed)


class SeriesMismatchError(BlowupError):
    """A time series and a certificate were produced from different configs."""
