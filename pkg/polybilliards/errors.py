from __future__ import annotations

from typing import Any

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_ORBIT_TERMINATED = 2
EXIT_MALFORMED = 3
EXIT_PRECONDITION = 4
EXIT_IO = 5
EXIT_USAGE = 64
EXIT_INTERNAL = 70


class BilliardsError(Exception):
    """Base error; carries the CLI exit code and a JSON-ready detail mapping."""

    exit_code = EXIT_PRECONDITION

    def __init__(self, message: str, **details: Any) -> None:
        super().__init__(message)
        self.message = message
        self.details = details

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": type(self).__name__,
            "message": self.message,
            "details": {k: _jsonable(v) for k, v in self.details.items()},
        }


def _jsonable(value: Any) -> Any:
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    to_dict = getattr(value, "to_dict", None)
    if callable(to_dict):
        return to_dict()
    return str(value)


class MalformedInput(BilliardsError):
    exit_code = EXIT_MALFORMED


class DegeneratePolygon(BilliardsError):
    exit_code = EXIT_MALFORMED


class InvalidPhasePoint(BilliardsError):
    exit_code = EXIT_MALFORMED


class OrbitTerminated(BilliardsError):
    """The billiard map is undefined at the given phase point."""

    exit_code = EXIT_ORBIT_TERMINATED

    def __init__(self, message: str, step: int | None = None, **details: Any) -> None:
        super().__init__(message, **details)
        self.step = step

    def at_step(self, step: int) -> "OrbitTerminated":
        self.step = step
        self.details["step"] = step
        return self


class CornerHit(OrbitTerminated):
    pass


class Tangency(OrbitTerminated):
    pass


class InsufficientData(BilliardsError):
    pass


class DuplicateAmbiguity(BilliardsError):
    pass


class OrderMismatch(BilliardsError):
    exit_code = EXIT_NEGATIVE

    def __init__(self, message: str, witness: Any = None, **details: Any) -> None:
        super().__init__(message, witness=witness, **details)
        self.witness = witness


class LowCoverage(BilliardsError):
    pass


class DegenerateDirection(BilliardsError):
    pass


class IrrationalPolygon(BilliardsError):
    pass


class TangentDirection(BilliardsError):
    pass


class ExceptionalDirection(BilliardsError):
    pass


class UnbalancedMap(BilliardsError):
    pass


class IoFailure(BilliardsError):
    exit_code = EXIT_IO


class UsageError(BilliardsError):
    exit_code = EXIT_USAGE


__all__ = [
    "BilliardsError",
    "CornerHit",
    "DegenerateDirection",
    "DegeneratePolygon",
    "DuplicateAmbiguity",
    "ExceptionalDirection",
    "InsufficientData",
    "InvalidPhasePoint",
    "IoFailure",
    "IrrationalPolygon",
    "LowCoverage",
    "MalformedInput",
    "OrbitTerminated",
    "OrderMismatch",
    "Tangency",
    "TangentDirection",
    "UnbalancedMap",
    "UsageError",
]
