"""Exception types shared across the package."""


class TeflowError(Exception):
    """Base class for all errors raised by teflow on bad inputs."""


class DataError(TeflowError):
    """Input data violates a contract (bad file, unknown ticker, empty overlap)."""


class DegenerateSchemeError(TeflowError):
    """Two quantile levels collide, leaving a bin that no value can occupy."""

    def __init__(self, level_a: float, level_b: float):
        self.levels = (level_a, level_b)
        super().__init__(
            f"quantile levels {level_a} and {level_b} produce the same bin edge"
        )
