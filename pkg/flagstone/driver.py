from __future__ import annotations

import dataclasses
import hashlib
import json
import logging
import math
import random
import sys
import time
from collections.abc import Iterable, Iterator
from dataclasses import dataclass, field
from fractions import Fraction
from multiprocessing import get_context
from pathlib import Path
from typing import Protocol

from flagstone.checkpoint import CheckpointState, checkpoint_load, checkpoint_save
from flagstone.curve import CurveParams, SearchWindow, build_basis, build_window, check_straddle
from flagstone.errors import BoxTooLarge, InvalidParams, SamplingExhausted, SingularPoint, UnsoundSolution
from flagstone.lattice import DEFAULT_DELTA, lll_reduce
from flagstone.pyramid import (
    DEFAULT_BOX_CAP,
    DEFAULT_EPS,
    Point,
    cone_points,
    count_is_plausible,
    map_candidate,
    neighbour_points,
)
from flagstone.rng import trial_rng
from flagstone.verifier import (
    Solution,
    SolutionRecord,
    TargetSet,
    admissible_solution,
    canonicalize,
    verify_row,
)

logger = logging.getLogger("flagstone.driver")

MAX_REJECTIONS = 100

# the worked example window: its first two reduced vectors give d=19 and d=427
EXAMPLE_WINDOW = {"X0": "0.31415", "h": "0.001", "K": "0.00001", "L": "1000"}


@dataclass(frozen=True)
class DriverConfig:
    c: int = 2
    x0_low: float = -10.0
    x0_high: float = 10.0
    h_low: float = 1e-5
    h_high: float = 1e-2
    # K = kappa·h², L = lambda_/h
    kappa: float = 10.0
    lambda_: float = 1.0
    trials: int = 1
    seed: int = 0
    workers: int = 1
    eps: Fraction = DEFAULT_EPS
    delta: Fraction = DEFAULT_DELTA
    box_cap: int = DEFAULT_BOX_CAP
    precision_bits: int = 128
    checkpoint_every: int = 100

    def __post_init__(self) -> None:
        problems = []
        if self.x0_low > self.x0_high:
            problems.append(f"x0 range {self.x0_low}:{self.x0_high} is empty")
        if not 0 < self.h_low <= self.h_high:
            problems.append(f"h range {self.h_low}:{self.h_high} must satisfy 0 < lo <= hi")
        if self.kappa <= 0 or self.lambda_ <= 0:
            problems.append("kappa and lambda must be positive")
        elif self.lambda_ / self.h_high <= 1:
            problems.append(f"L = lambda/h must exceed 1 but lambda/h_high = {self.lambda_ / self.h_high}")
        if self.trials < 0:
            problems.append(f"trials must be >= 0, got {self.trials}")
        if self.workers < 1:
            problems.append(f"workers must be >= 1, got {self.workers}")
        if self.eps < 0:
            problems.append(f"eps must be >= 0, got {self.eps}")
        if not Fraction(1, 4) < self.delta < 1:
            problems.append(f"delta must be in (1/4, 1), got {self.delta}")
        if self.checkpoint_every < 1:
            problems.append(f"checkpoint_every must be >= 1, got {self.checkpoint_every}")
        if problems:
            raise InvalidParams("; ".join(problems))
        # validates c and precision_bits
        CurveParams(self.c, self.precision_bits)

    @property
    def curve_params(self) -> CurveParams:
        return CurveParams(self.c, self.precision_bits)


def example_window(c: int = 2) -> SearchWindow:
    return build_window(CurveParams(c), **EXAMPLE_WINDOW)


def config_hash(cfg: DriverConfig, targets: TargetSet) -> str:
    """Hash of everything that decides which solutions a trial emits (not trials, workers or cadence)."""
    fields = dataclasses.asdict(cfg)
    for ignored in ("trials", "workers", "checkpoint_every"):
        fields.pop(ignored)
    fields["eps"] = str(cfg.eps)
    fields["delta"] = str(cfg.delta)
    fields["targets"] = {"wanted": sorted(targets.wanted), "d_max": targets.d_max, "min_yz": targets.min_yz}
    return hashlib.sha256(json.dumps(fields, sort_keys=True).encode()).hexdigest()


def digest(solution: Solution) -> str:
    return hashlib.blake2b(solution.key().encode(), digest_size=16).hexdigest()


@dataclass
class TrialSummary:
    trial: int
    window: tuple[float, float, float, float] | None = None
    points: int = 0
    neighbours: int = 0
    candidates: int = 0
    solutions: int = 0
    wall_time: float = 0.0
    skipped: bool = False
    error: str | None = None
    anomaly: bool = False
    straddles: bool = True


@dataclass
class RunSummary:
    trials_done: int = 0
    trials_run: int = 0
    skipped: int = 0
    errors: int = 0
    points: int = 0
    neighbours: int = 0
    candidates: int = 0
    solutions: int = 0
    emitted: int = 0
    anomalies: int = 0
    straddle_failures: int = 0
    wall_time: float = 0.0
    distinct_d: list[int] = field(default_factory=list)

    def add(self, s: TrialSummary) -> None:
        self.trials_run += 1
        self.trials_done = max(self.trials_done, s.trial + 1)
        self.skipped += s.skipped
        self.errors += s.error is not None
        self.points += s.points
        self.neighbours += s.neighbours
        self.candidates += s.candidates
        self.solutions += s.solutions
        self.anomalies += s.anomaly
        self.straddle_failures += not s.straddles
        self.wall_time += s.wall_time

    def counters(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_counters(cls, counters: dict) -> RunSummary:
        known = {f.name for f in dataclasses.fields(cls)}
        return cls(**{k: v for k, v in counters.items() if k in known})


class SolutionSink(Protocol):
    def emit(self, rec: SolutionRecord) -> None: ...

    def flush(self) -> None: ...


def sample_window(rng: random.Random, cfg: DriverConfig) -> SearchWindow:
    """Draw h log-uniformly and X0 uniformly, redrawing while X0 sits too near the singular point.

    Raises:
        SamplingExhausted: after MAX_REJECTIONS draws all hit the singular margin.
    """
    params = cfg.curve_params
    for _ in range(MAX_REJECTIONS):
        if cfg.h_low == cfg.h_high:
            h = cfg.h_low
        else:
            h = math.exp(rng.uniform(math.log(cfg.h_low), math.log(cfg.h_high)))
        X0 = cfg.x0_low if cfg.x0_low == cfg.x0_high else rng.uniform(cfg.x0_low, cfg.x0_high)
        try:
            return build_window(params, X0, h, cfg.kappa * h * h, cfg.lambda_ / h)
        except SingularPoint:
            continue
    raise SamplingExhausted(
        f"{MAX_REJECTIONS} draws of X0 in [{cfg.x0_low}, {cfg.x0_high}] all hit the singular point margin"
    )


def run_trial(
    window: SearchWindow, targets: TargetSet, cfg: DriverConfig, trial: int = -1, seed: int | None = None
) -> tuple[TrialSummary, list[SolutionRecord]]:
    """Window → basis → LLL → pyramid → verify.

    Raises:
        BoxTooLarge: if the reduced pyramid's bounding box exceeds cfg.box_cap.
    """
    start = time.perf_counter()
    summary = TrialSummary(trial=trial, window=window.summary())
    red = lll_reduce(build_basis(window), cfg.delta)

    seen: set[Solution] = set()
    records: list[SolutionRecord] = []

    def check(v: Point) -> None:
        summary.candidates += 1
        if (sol := canonicalize(cfg.c, map_candidate(red.M, v))) is None or sol in seen:
            return
        seen.add(sol)
        rec = SolutionRecord(sol, window.summary(), seed, trial)
        if admissible_solution(rec, targets):
            records.append(rec)

    for v in cone_points(red.H, cfg.eps, cfg.box_cap):
        summary.points += 1
        check(v)
    for v in neighbour_points(red.H, cfg.eps):
        summary.neighbours += 1
        check(v)

    if not count_is_plausible(red.H, summary.points):
        summary.anomaly = True
        logger.debug(f"trial {trial}: {summary.points} cone points is implausible for the pyramid volume")
    summary.straddles = check_straddle(window)
    if not summary.straddles:
        logger.debug(f"trial {trial}: midline does not straddle the curve at X0={float(window.X0)}")

    summary.solutions = len(records)
    summary.wall_time = time.perf_counter() - start
    return summary, sorted(records, key=lambda r: r.solution)


def _trial_task(args: tuple[DriverConfig, TargetSet, int]) -> tuple[TrialSummary, list[SolutionRecord]]:
    # runs in a worker: nothing may escape, a failed trial is reported in its summary
    cfg, targets, trial = args
    try:
        window = sample_window(trial_rng(cfg.seed, trial), cfg)
    except Exception as e:
        logger.error(f"trial {trial}: sampling failed", exc_info=e)
        return TrialSummary(trial=trial, error=f"{type(e).__name__}: {e}"), []
    try:
        return run_trial(window, targets, cfg, trial, cfg.seed)
    except BoxTooLarge as e:
        logger.warning(f"trial {trial} skipped: {e.msg}")
        return TrialSummary(trial=trial, window=window.summary(), skipped=True), []
    except Exception as e:
        logger.error(f"trial {trial}: unhandled error", exc_info=e)
        return TrialSummary(trial=trial, window=window.summary(), error=f"{type(e).__name__}: {e}"), []


def _outcomes(
    cfg: DriverConfig, targets: TargetSet, trials: Iterable[int]
) -> Iterator[tuple[TrialSummary, list[SolutionRecord]]]:
    """Trial outcomes in trial order, whatever the number of workers."""
    tasks = ((cfg, targets, t) for t in trials)
    if cfg.workers == 1:
        yield from map(_trial_task, tasks)
        return
    ctx = get_context("fork") if sys.platform == "darwin" else get_context()
    with ctx.Pool(processes=cfg.workers) as pool:
        yield from pool.imap(_trial_task, tasks, chunksize=8)


def search(
    cfg: DriverConfig,
    targets: TargetSet,
    sink: SolutionSink,
    checkpoint_path: str | Path | None = None,
    resume: bool = False,
    known: Iterable[Solution] = (),
) -> RunSummary:
    """Run cfg.trials trials and deliver every new admissible solution to `sink` exactly once.

    Args:
        known: solutions already delivered in an earlier session (eg: read back from the
            results file) which must not be emitted again.

    Raises:
        ConfigMismatch, CorruptCheckpoint: if resuming from an incompatible or damaged checkpoint.
        UnsoundSolution: if a record fails exact re-verification.
    """
    chash = config_hash(cfg, targets)
    digests = {digest(s) for s in known}
    summary = RunSummary()
    first = 0

    if resume and checkpoint_path and Path(checkpoint_path).exists():
        state = checkpoint_load(checkpoint_path, chash)
        first = state.trials_done
        digests |= set(state.digests)
        summary = RunSummary.from_counters(state.counters)
        logger.info(f"resuming from trial {first} with {len(state.digests)} known solutions")
    elif resume:
        logger.warning(f"no checkpoint at {checkpoint_path}, starting from trial 0")

    distinct = set(summary.distinct_d)

    def save() -> None:
        if not checkpoint_path:
            return
        sink.flush()
        summary.distinct_d = sorted(distinct)
        state = CheckpointState(cfg.seed, summary.trials_done, sorted(digests), chash, summary.counters())
        checkpoint_save(state, checkpoint_path)
        logger.info(f"checkpoint at trial {summary.trials_done}: {summary.emitted} solutions emitted")

    summary.trials_done = max(summary.trials_done, first)
    for n, (trial_summary, records) in enumerate(_outcomes(cfg, targets, range(first, cfg.trials)), start=1):
        summary.add(trial_summary)
        for rec in records:
            if (key := digest(rec.solution)) in digests:
                continue
            s = rec.solution
            if not verify_row(s.c, s.d, s.x, s.y, s.z):
                raise UnsoundSolution(f"{s} does not satisfy d = c·x³ + y³ + z³")
            digests.add(key)
            distinct.add(s.d)
            sink.emit(rec)
            summary.emitted += 1
        logger.debug(f"trial {trial_summary}")
        if n % cfg.checkpoint_every == 0:
            save()

    save()
    summary.distinct_d = sorted(distinct)
    sink.flush()
    return summary
