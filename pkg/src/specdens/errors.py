"""Exception types shared across the package."""


class NumericalFailure(RuntimeError):
    """A computation produced non-finite or otherwise unusable numbers."""


class OracleCapExceeded(RuntimeError):
    """A dense reference computation was requested above its size cap."""
