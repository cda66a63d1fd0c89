"""Exact checks on candidate triples.

Two sign conventions are in play. The lattice produces the search form
d = c·x³ + y³ − z_s³; results are reported as d = c·x³ + y³ + z³ with z = −z_s,
and with the whole triple negated if needed so that d > 0.
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import lru_cache

from flagstone.errors import BoxTooLarge
from flagstone.pyramid import CandidateVector

ORACLE_CAP = 10**8
RESIDUE_MODULI = tuple(range(2, 17))


@dataclass(frozen=True, order=True)
class Solution:
    """d = c·x³ + y³ + z³ with d > 0. Ordered by (c, d, x, y, z)."""

    c: int
    d: int
    x: int
    y: int
    z: int

    def key(self) -> str:
        return f"{self.c}:{self.d}:{self.x}:{self.y}:{self.z}"


@dataclass(frozen=True)
class SolutionRecord:
    solution: Solution
    # X0, h, K, L of the window it came from; None for oracle rows
    window: tuple[float, float, float, float] | None = None
    seed: int | None = None
    trial: int = -1


@dataclass(frozen=True)
class TargetSet:
    wanted: frozenset[int] = field(default_factory=frozenset)
    d_max: int = 10000
    min_yz: int = 100


def eval_search_form(c: int, x: int, y: int, z_s: int) -> int:
    return c * x**3 + y**3 - z_s**3


def eval_report_form(c: int, x: int, y: int, z: int) -> int:
    return c * x**3 + y**3 + z**3


def verify_row(c: int, d: int, x: int, y: int, z: int) -> bool:
    return eval_report_form(c, x, y, z) == d


def canonicalize(c: int, cand: CandidateVector) -> Solution | None:
    """Reporting form with d > 0, or None when d = 0."""
    x, y, z = cand.x, cand.y, -cand.z_s
    d = eval_report_form(c, x, y, z)
    if d == 0:
        return None
    if d < 0:
        d, x, y, z = -d, -x, -y, -z
    return Solution(c, d, x, y, z)


@lru_cache(maxsize=None)
def residue_table(c: int, m: int) -> frozenset[int]:
    """Residues mod m attained by c·a³ + b³ + e³."""
    cubes = {pow(a, 3, m) for a in range(m)}
    return frozenset((c * a + b + e) % m for a, b, e in itertools.product(cubes, repeat=3))


def residue_admissible(c: int, d: int) -> bool:
    """False when a congruence rules out every solution of c·x³ + y³ + z³ = d."""
    if c == 1:
        return d % 9 not in (4, 5)
    if c == 2:
        return True
    return all(d % m in residue_table(c, m) for m in RESIDUE_MODULI)


def admissible_solution(rec: SolutionRecord, targets: TargetSet) -> bool:
    s = rec.solution
    return (
        s.d <= targets.d_max
        and min(abs(s.y), abs(s.z)) > targets.min_yz
        and (not targets.wanted or s.d in targets.wanted)
    )


def brute_force_oracle(c: int, box_bound: int, d_max: int, cap: int = ORACLE_CAP) -> dict[int, list[Solution]]:
    """Every (x, y, z) with |x|, |y|, |z| <= box_bound and 0 < c·x³ + y³ + z³ <= d_max.

    Keys are sorted by d, and each list is sorted by (x, y, z).

    Raises:
        BoxTooLarge: if the box holds more than `cap` triples.
    """
    if (n := (2 * box_bound + 1) ** 3) > cap:
        raise BoxTooLarge(n, cap)
    if box_bound <= 0:
        return {}

    r = range(-box_bound, box_bound + 1)
    cubes = {a: a**3 for a in r}
    found: defaultdict[int, list[Solution]] = defaultdict(list)
    for x in r:
        cx = c * cubes[x]
        for y in r:
            cxy = cx + cubes[y]
            for z in r:
                if 0 < (d := cxy + cubes[z]) <= d_max:
                    found[d].append(Solution(c, d, x, y, z))
    return {d: sorted(found[d]) for d in sorted(found)}
