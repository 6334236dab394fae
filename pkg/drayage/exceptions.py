from __future__ import annotations


class ScenarioValidationError(ValueError):
    """Input data broke an invariant. `record` names the offending row/field when known."""

    def __init__(self, message: str, *, record: str | int | None = None) -> None:
        self.record = record
        if record is not None:
            message = f"{message} (record {record})"
        super().__init__(message)


class OverSpeedError(RuntimeError):
    """Machine speed left its map range in every gear."""


class PackFaultError(RuntimeError):
    """Pack terminal voltage collapsed to zero or below."""


class EnergyInfeasibleError(RuntimeError):
    """State of charge left [0, 1] during a step."""
