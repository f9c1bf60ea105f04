"""Exception types shared across the simulator."""


class ConfigError(ValueError):
    """Inconsistent or invalid configuration, caught before any simulation runs."""


class SaturationError(RuntimeError):
    """A word-line pulse is long enough to pull the access transistor out of
    saturation, so the square-law discharge model would no longer be valid.

    ``code`` names the offending DAC code (transfer sweeps) and ``column`` the
    offending array column (MAC pipeline), when known.
    """

    def __init__(self, message: str, *, code: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.code = code
        self.column = column
