from __future__ import annotations

import json
import os
import tempfile
from dataclasses import asdict, dataclass, field
from pathlib import Path

from flagstone.errors import ConfigMismatch, CorruptCheckpoint

CHECKPOINT_VERSION = 1


@dataclass(frozen=True)
class CheckpointState:
    seed: int
    trials_done: int
    digests: list[str]
    config_hash: str
    counters: dict = field(default_factory=dict)


def checkpoint_save(state: CheckpointState, path: str | os.PathLike) -> None:
    """Write the checkpoint atomically: a temp file in the same directory, fsync'd, then renamed over `path`."""
    path = Path(path)
    payload = json.dumps({"version": CHECKPOINT_VERSION, **asdict(state)}, sort_keys=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as f:
            f.write(payload)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp, path)
    except BaseException:
        # the old checkpoint, if any, is untouched
        Path(tmp).unlink(missing_ok=True)
        raise


def checkpoint_load(path: str | os.PathLike, expected_hash: str | None = None) -> CheckpointState:
    """Load a checkpoint, optionally rejecting one written for a different configuration.

    Raises:
        CorruptCheckpoint: if the file is not a complete checkpoint.
        ConfigMismatch: if `expected_hash` is given and differs from the stored config hash.
    """
    try:
        raw = json.loads(Path(path).read_text())
        if raw.get("version") != CHECKPOINT_VERSION:
            raise CorruptCheckpoint(f"{path}: unsupported checkpoint version {raw.get('version')!r}")
        state = CheckpointState(
            seed=int(raw["seed"]),
            trials_done=int(raw["trials_done"]),
            digests=[str(d) for d in raw["digests"]],
            config_hash=str(raw["config_hash"]),
            counters=dict(raw.get("counters", {})),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, AttributeError) as e:
        raise CorruptCheckpoint(f"{path}: {e}") from e

    if expected_hash is not None and state.config_hash != expected_hash:
        raise ConfigMismatch(
            f"{path} was written for a different configuration; rerun without --resume or restore the original flags"
        )
    return state
