from __future__ import annotations

import argparse
import contextlib
import json
import logging
import sys
from collections.abc import Iterator, Sequence
from fractions import Fraction
from pathlib import Path
from typing import IO

import flagstone
from flagstone.curve import build_basis
from flagstone.driver import DriverConfig, RunSummary, config_hash, example_window, run_trial, search
from flagstone.errors import EXIT_CONFIG, EXIT_IO, EXIT_OK, FlagstoneError, ParseError
from flagstone.lattice import lll_reduce
from flagstone.results import JsonlSink, load_targets, parse_solution, read_solutions, utc_now
from flagstone.verifier import Solution, SolutionRecord, TargetSet, brute_force_oracle, eval_report_form

logger = logging.getLogger("flagstone.cli")


def float_range(text: str) -> tuple[float, float]:
    try:
        lo, hi = (float(p) for p in text.split(":"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO:HI, got {text!r}") from None
    return lo, hi


def arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flagstone",
        description="""Find large solutions of d = c·x³ + y³ + z³ by lattice reduction.
        eg: flagstone search --trials 1000 --out results.jsonl""",
        formatter_class=argparse.ArgumentDefaultsHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="-v for progress, -vv for per-trial detail")
    parser.add_argument("--version", action="version", version=flagstone.__version__)
    subparsers = parser.add_subparsers(dest="command")

    defaults = DriverConfig()
    sp = subparsers.add_parser(
        "search", help="sample windows and stream solutions", formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    sp.add_argument("--c", type=int, default=defaults.c, help="coefficient of x³")
    sp.add_argument("--targets", help="file of wanted d values, one per line. If omitted any d <= --d-max is kept.")
    sp.add_argument("--d-max", type=int, default=10000)
    sp.add_argument("--min-yz", type=int, default=100, help="keep solutions with min(|y|,|z|) above this")
    sp.add_argument("--trials", type=int, default=defaults.trials)
    sp.add_argument("--seed", type=int, default=defaults.seed)
    sp.add_argument("--workers", type=int, default=defaults.workers)
    sp.add_argument("--h-range", type=float_range, default=(defaults.h_low, defaults.h_high), help="LO:HI")
    sp.add_argument("--x0-range", type=float_range, default=(defaults.x0_low, defaults.x0_high), help="LO:HI")
    sp.add_argument("--kappa", type=float, default=defaults.kappa, help="K = kappa·h²")
    sp.add_argument("--lambda", dest="lambda_", type=float, default=defaults.lambda_, help="L = lambda/h")
    sp.add_argument("--delta", type=Fraction, default=defaults.delta, help="LLL parameter in (1/4, 1)")
    sp.add_argument("--eps", type=Fraction, default=defaults.eps, help="pyramid membership slack")
    sp.add_argument("--box-cap", type=int, default=defaults.box_cap, help="skip trials with more box points")
    sp.add_argument("--precision", type=int, default=defaults.precision_bits, help="minimum working bits")
    sp.add_argument("--out", help="append results here instead of stdout")
    sp.add_argument("--checkpoint", help="checkpoint file")
    sp.add_argument("--checkpoint-every", type=int, default=defaults.checkpoint_every, help="trials")
    sp.add_argument("--resume", action="store_true", help="continue from --checkpoint")
    sp.add_argument("--no-timestamp", action="store_true", help="byte-comparable output")

    vp = subparsers.add_parser("verify", help="exactly re-check result lines or 'd x y z' rows")
    vp.add_argument("path", help="file to check, or - for stdin")
    vp.add_argument("--c", type=int, default=2, help="coefficient for 'd x y z' rows")

    op = subparsers.add_parser(
        "oracle", help="exhaustive small-box search", formatter_class=argparse.ArgumentDefaultsHelpFormatter
    )
    op.add_argument("--c", type=int, default=2)
    op.add_argument("--box-bound", type=int, default=20, help="search |x|, |y|, |z| <= this")
    op.add_argument("--d-max", type=int, default=1000)
    op.add_argument("--out", help="write results here instead of stdout")
    op.add_argument("--no-timestamp", action="store_true")

    ep = subparsers.add_parser("example", help="run the X0=0.31415 worked example and show each stage")
    ep.add_argument("--c", type=int, default=2)
    return parser


@contextlib.contextmanager
def output(path: str | None, mode: str = "a") -> Iterator[IO[str]]:
    if path is None:
        yield sys.stdout
        return
    with open(path, mode) as f:
        yield f


def run_search(pargs: argparse.Namespace) -> int:
    cfg = DriverConfig(
        c=pargs.c,
        x0_low=pargs.x0_range[0],
        x0_high=pargs.x0_range[1],
        h_low=pargs.h_range[0],
        h_high=pargs.h_range[1],
        kappa=pargs.kappa,
        lambda_=pargs.lambda_,
        trials=pargs.trials,
        seed=pargs.seed,
        workers=pargs.workers,
        eps=pargs.eps,
        delta=pargs.delta,
        box_cap=pargs.box_cap,
        precision_bits=pargs.precision,
        checkpoint_every=pargs.checkpoint_every,
    )
    if pargs.targets:
        targets = load_targets(pargs.targets, pargs.d_max, pargs.min_yz, pargs.c)
    else:
        targets = TargetSet(frozenset(), pargs.d_max, pargs.min_yz)

    known: list[Solution] = []
    fresh = True
    if pargs.out and Path(pargs.out).exists() and Path(pargs.out).stat().st_size:
        fresh = False
        if pargs.resume:
            known = [rec.solution for rec in read_solutions(pargs.out)]

    with output(pargs.out) as stream:
        sink = JsonlSink(stream, timestamp=not pargs.no_timestamp)
        if pargs.out and fresh:
            info = {"c": cfg.c, "seed": cfg.seed, "config_hash": config_hash(cfg, targets), "version": 1}
            if not pargs.no_timestamp:
                info["started"] = utc_now()
            sink.write_header(info)
        summary = search(cfg, targets, sink, pargs.checkpoint, pargs.resume, known)

    report(summary)
    return EXIT_OK


def report(summary: RunSummary) -> None:
    counters = summary.counters()
    counters["distinct_d"] = len(summary.distinct_d)
    logger.info(f"search finished: {json.dumps(counters)}")
    print(json.dumps(counters, sort_keys=True), file=sys.stderr)


def rows(stream: IO[str], c: int) -> Iterator[tuple[int, Solution]]:
    """(line number, claimed solution) for each result line or 'd x y z' row."""
    for n, text in enumerate(stream, start=1):
        if not (text := text.strip()) or text.startswith("#"):
            continue
        if text.startswith("{"):
            try:
                rec = parse_solution(text)
            except (ValueError, KeyError, TypeError) as e:
                raise ParseError(n, f"bad result line: {e}") from None
            if rec:
                yield n, rec.solution
            continue
        try:
            d, x, y, z = (int(p) for p in text.split())
        except ValueError:
            raise ParseError(n, f"expected 'd x y z', got {text!r}") from None
        yield n, Solution(c, d, x, y, z)


def run_verify(pargs: argparse.Namespace) -> int:
    checked = failed = 0
    with contextlib.nullcontext(sys.stdin) if pargs.path == "-" else open(pargs.path) as stream:
        for n, s in rows(stream, pargs.c):
            checked += 1
            if (computed := eval_report_form(s.c, s.x, s.y, s.z)) != s.d:
                failed += 1
                print(f"FAIL line {n}: c={s.c} d={s.d} x={s.x} y={s.y} z={s.z} computed d={computed}")
    print(f"verified {checked} rows, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_CONFIG


def run_oracle(pargs: argparse.Namespace) -> int:
    found = brute_force_oracle(pargs.c, pargs.box_bound, pargs.d_max)
    with output(pargs.out, "w") as stream, JsonlSink(stream, timestamp=not pargs.no_timestamp) as sink:
        for solutions in found.values():
            for s in solutions:
                sink.emit(SolutionRecord(s, None, None, -1))
    logger.info(f"oracle found {sum(len(v) for v in found.values())} triples for {len(found)} values of d")
    return EXIT_OK


def fmt(m: Sequence[Sequence[object]], width: int = 12) -> str:
    def cell(x: object) -> str:
        return f"{x:>{width}}" if isinstance(x, int) else f"{float(x):>{width}.4f}"  # pyright: ignore[reportArgumentType]

    return "\n".join("  " + " ".join(cell(x) for x in row) for row in m)


def run_example(pargs: argparse.Namespace) -> int:
    window = example_window(pargs.c)
    cfg = DriverConfig(c=pargs.c)
    targets = TargetSet(frozenset(), d_max=1000, min_yz=10)
    red = lll_reduce(build_basis(window), cfg.delta)
    _, records = run_trial(window, targets, cfg)

    X0, h, K, L = window.summary()
    print(f"c={window.c} X0={X0} h={h} K={K} L={L} region={window.region.value}")
    print(f"Y0={float(window.Y0):.6f} A={float(window.A):.6f} B={float(window.B):.6f}")
    print(f"F =\n{fmt(red.F.matrix)}")
    print(f"M =\n{fmt(red.M)}")
    print(f"H = F·M =\n{fmt(red.H)}")
    print("solutions with d <= 1000 and min(|y|,|z|) > 10:")
    for rec in records:
        s = rec.solution
        print(f"  d={s.d} x={s.x} y={s.y} z={s.z}")
    return EXIT_OK


COMMANDS = {"search": run_search, "verify": run_verify, "oracle": run_oracle, "example": run_example}


def main(args: Sequence[str] = sys.argv[1:]) -> int:
    parser = arg_parser()
    try:
        pargs = parser.parse_args(args)
    except SystemExit as e:
        # argparse exits 2 on usage errors; here 2 means I/O
        return EXIT_OK if e.code in (0, None) else EXIT_CONFIG

    logging.basicConfig(
        format="%(asctime)s %(levelname)s %(name)s %(message)s",
        level=[logging.WARNING, logging.INFO, logging.DEBUG][min(pargs.verbose, 2)],
    )

    if not (command := COMMANDS.get(pargs.command)):
        parser.print_usage()
        return EXIT_CONFIG

    try:
        return command(pargs)
    except FlagstoneError as e:
        logger.error(e.msg)
        print(f"error: {e.msg}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error(f"I/O error: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_IO
