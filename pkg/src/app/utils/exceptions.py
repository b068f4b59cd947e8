from typing import Optional


class RspError(Exception):
    """Base class for every error the simulator raises on purpose."""


class ConfigError(RspError):
    def __init__(self, message: str, line: Optional[int] = None, key: Optional[str] = None):
        self.line = line
        self.key = key
        if line is not None:
            message = f"{message} (line {line})"
        super().__init__(message)


class SimulationError(RspError):
    pass


class NotInformationallyCompleteError(SimulationError):
    def __init__(self, rank: int, required: int):
        self.rank = rank
        self.required = required
        super().__init__(
            f"measurement set is not informationally complete: rank {rank}, need {required}"
        )


class ImpossibleOutcomeError(SimulationError):
    pass


class SweepPointError(SimulationError):
    def __init__(self, point_index: int, cause: Exception):
        self.point_index = point_index
        self.cause = cause
        super().__init__(f"sweep point {point_index} failed: {cause}")


class DimensionMismatchError(ValueError):
    pass


class StateValidationError(ValueError):
    pass
