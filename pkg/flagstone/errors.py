from __future__ import annotations

from dataclasses import dataclass

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_IO = 2


class FlagstoneError(Exception):
    """Base error. `exit_code` is what the cli returns when this escapes a subcommand."""

    exit_code = EXIT_CONFIG

    def __init__(self, msg: str) -> None:
        super().__init__(msg)
        self.msg = msg


class InvalidParams(FlagstoneError):
    pass


class SingularPoint(FlagstoneError):
    pass


class SamplingExhausted(FlagstoneError):
    pass


class ConfigMismatch(FlagstoneError):
    pass


class DegenerateBasis(FlagstoneError):
    pass


class BoxTooLarge(FlagstoneError):
    def __init__(self, points: int, cap: int) -> None:
        super().__init__(f"Bounding box holds {points} integer points, more than the cap of {cap}")
        self.points = points
        self.cap = cap

    def __reduce__(self) -> tuple:
        return (BoxTooLarge, (self.points, self.cap))


@dataclass
class ParseError(FlagstoneError):
    line: int
    message: str

    def __post_init__(self) -> None:
        super().__init__(f"line {self.line}: {self.message}")


class CorruptCheckpoint(FlagstoneError):
    exit_code = EXIT_IO


class UnsoundSolution(FlagstoneError):
    exit_code = EXIT_IO
