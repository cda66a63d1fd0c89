from __future__ import annotations

import datetime
import json
import logging
import os
from collections.abc import Iterator
from pathlib import Path
from typing import IO, Optional

from typing_extensions import NotRequired, Self, TypedDict

from flagstone.errors import ParseError, UnsoundSolution
from flagstone.verifier import Solution, SolutionRecord, TargetSet, residue_admissible, verify_row

logger = logging.getLogger("flagstone.results")

SCHEMA_VERSION = 1


class ResultLine(TypedDict):
    schema_version: int
    c: int
    d: int
    # decimal strings, beyond the 53 bits a JSON consumer can be trusted with
    x: str
    y: str
    z: str
    X0: Optional[float]
    h: Optional[float]
    K: Optional[float]
    L: Optional[float]
    seed: Optional[int]
    trial: int
    timestamp: NotRequired[str]


def utc_now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds").replace("+00:00", "Z")


def as_result_line(rec: SolutionRecord, timestamp: bool = True) -> ResultLine:
    s = rec.solution
    X0, h, K, L = rec.window if rec.window else (None, None, None, None)
    line: ResultLine = {
        "schema_version": SCHEMA_VERSION,
        "c": s.c,
        "d": s.d,
        "x": str(s.x),
        "y": str(s.y),
        "z": str(s.z),
        "X0": X0,
        "h": h,
        "K": K,
        "L": L,
        "seed": rec.seed,
        "trial": rec.trial,
    }
    if timestamp:
        line["timestamp"] = utc_now()
    return line


def emit_solution(rec: SolutionRecord, timestamp: bool = True) -> str:
    """One newline-terminated JSON line."""
    return json.dumps(as_result_line(rec, timestamp), separators=(",", ":")) + "\n"


def header_line(info: dict) -> str:
    return json.dumps({"schema_version": SCHEMA_VERSION, "header": info}, separators=(",", ":"), sort_keys=True) + "\n"


def parse_solution(text: str) -> SolutionRecord | None:
    """Parse one result line. Returns None for a header line.

    Raises:
        ValueError, KeyError, TypeError: if the line is not a result line.
    """
    raw = json.loads(text)
    if "header" in raw:
        return None
    window = None if raw.get("X0") is None else (raw["X0"], raw["h"], raw["K"], raw["L"])
    solution = Solution(int(raw["c"]), int(raw["d"]), int(raw["x"]), int(raw["y"]), int(raw["z"]))
    return SolutionRecord(solution, window, raw.get("seed"), int(raw["trial"]))


def read_solutions(path: str | os.PathLike) -> Iterator[SolutionRecord]:
    """Records from an existing results file; a torn last line (killed run) is skipped."""
    with open(path) as f:
        for n, text in enumerate(f, start=1):
            if not text.strip():
                continue
            try:
                if rec := parse_solution(text):
                    yield rec
            except (ValueError, KeyError, TypeError) as e:
                logger.warning(f"{path}:{n}: skipping unreadable result line: {e}")


class JsonlSink:
    """Append-only results writer. Re-verifies every record before it is written."""

    def __init__(self, stream: IO[str], timestamp: bool = True) -> None:
        self._stream = stream
        self._timestamp = timestamp

    def __enter__(self) -> Self:
        return self

    def __exit__(self, *exc: object) -> None:
        self.flush()

    def emit(self, rec: SolutionRecord) -> None:
        s = rec.solution
        if not verify_row(s.c, s.d, s.x, s.y, s.z) or s.d <= 0:
            raise UnsoundSolution(f"refusing to write {s}: d != c·x³ + y³ + z³ or d <= 0")
        self._stream.write(emit_solution(rec, self._timestamp))

    def write_header(self, info: dict) -> None:
        self._stream.write(header_line(info))

    def flush(self) -> None:
        self._stream.flush()


def load_targets(path: str | os.PathLike, d_max: int = 10000, min_yz: int = 100, c: int = 2) -> TargetSet:
    """One non-negative integer per line; blank lines and '#' comments are ignored.

    Duplicates collapse. Targets ruled out by a congruence for this c are dropped with a warning.

    Raises:
        ParseError: on the first line that is not a non-negative integer, or a value above d_max.
    """
    wanted: set[int] = set()
    for n, text in enumerate(Path(path).read_text().splitlines(), start=1):
        if not (text := text.strip()) or text.startswith("#"):
            continue
        try:
            d = int(text)
        except ValueError:
            raise ParseError(n, f"not an integer: {text!r}") from None
        if d < 0:
            raise ParseError(n, f"negative target {d}; solutions are reported with d > 0")
        if d > d_max:
            raise ParseError(n, f"target {d} is above d_max={d_max}")
        if not residue_admissible(c, d):
            logger.warning(f"{path}:{n}: dropping target {d}, no solution can exist for c={c}")
            continue
        wanted.add(d)
    if not wanted:
        logger.warning(f"{path} lists no targets, accepting any d <= {d_max}")
    return TargetSet(frozenset(wanted), d_max, min_yz)
