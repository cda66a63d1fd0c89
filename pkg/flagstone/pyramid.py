"""Integer points of the feasible pyramid, in reduced (primed) coordinates.

With u = H·v′ the pyramid is {u : |u₁| ≤ u₃, |u₂| ≤ u₃, 0 ≤ u₃ ≤ 1}: the hull of the
origin and the four solutions of H·v′ = (±1, ±1, 1). Points are found by scanning
the outward-rounded bounding box of those five vertices with an exact membership
test, which treats the z′ = 0 plane like any other.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction

from flagstone.errors import BoxTooLarge
from flagstone.lattice import ReducedLattice
from flagstone.linalg import IntMatrix, Matrix, Scalar, Vector, det, int_matvec, inverse, matvec, sub

DEFAULT_EPS = Fraction(1, 10**9)
DEFAULT_BOX_CAP = 10**7

Point = tuple[int, int, int]

# ±e₁, ±e₂, ±e₃ and ±e₁±e₂. The first reduced column is very often the shortest
# lattice vector and must be tested even when it falls just outside the pyramid.
NEIGHBOURS: tuple[Point, ...] = (
    (1, 0, 0),
    (-1, 0, 0),
    (0, 1, 0),
    (0, -1, 0),
    (0, 0, 1),
    (0, 0, -1),
    (1, 1, 0),
    (1, -1, 0),
    (-1, 1, 0),
    (-1, -1, 0),
)


@dataclass(frozen=True)
class Pyramid:
    apex: Vector
    base_vertices: tuple[Vector, Vector, Vector, Vector]

    @property
    def vertices(self) -> tuple[Vector, ...]:
        return (self.apex, *self.base_vertices)

    def bounding_box(self) -> tuple[tuple[int, int], ...]:
        """Per-axis integer (lo, hi), rounded outward."""
        return tuple(
            (math.floor(min(v[i] for v in self.vertices)), math.ceil(max(v[i] for v in self.vertices)))
            for i in range(3)
        )

    def box_points(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.bounding_box())


@dataclass(frozen=True)
class CandidateVector:
    """Search-form triple: d = c·x³ + y³ − z_s³."""

    x: int
    y: int
    z_s: int


def pyramid_vertices(H: Sequence[Sequence[Scalar]]) -> Pyramid:
    """Raises DegenerateBasis if H is singular."""
    Hinv = inverse(H)
    base = tuple(matvec(Hinv, (Fraction(s1), Fraction(s2), Fraction(1))) for s1 in (1, -1) for s2 in (1, -1))
    apex = (Fraction(0),) * 3
    return Pyramid(apex, base)  # pyright: ignore[reportArgumentType]


def contains(H: Sequence[Sequence[Scalar]], v: Sequence[int], eps: Fraction = DEFAULT_EPS) -> bool:
    u1, u2, u3 = matvec(H, v)
    return abs(u1) <= u3 + eps and abs(u2) <= u3 + eps and -eps <= u3 <= 1 + eps


def cone_points(H: Matrix, eps: Fraction = DEFAULT_EPS, box_cap: int = DEFAULT_BOX_CAP) -> Iterator[Point]:
    """Every non-zero integer v′ in the vertex bounding box with H·v′ in the pyramid.

    Raises:
        BoxTooLarge: if the box holds more than `box_cap` integer points.
    """
    pyr = pyramid_vertices(H)
    if (n := pyr.box_points()) > box_cap:
        raise BoxTooLarge(n, box_cap)
    ranges = [range(lo, hi + 1) for lo, hi in pyr.bounding_box()]
    for v in itertools.product(*ranges):
        if any(v) and contains(H, v, eps):
            yield v  # pyright: ignore[reportReturnType]


def neighbour_points(H: Matrix, eps: Fraction = DEFAULT_EPS) -> Iterator[Point]:
    """The neighbour vectors that `cone_points` would not already yield."""
    box = pyramid_vertices(H).bounding_box()
    for p in NEIGHBOURS:
        in_box = all(lo <= x <= hi for x, (lo, hi) in zip(p, box))
        if not (in_box and contains(H, p, eps)):
            yield p


def enumerate_candidates(
    red: ReducedLattice, eps: Fraction = DEFAULT_EPS, neighbours: bool = True, box_cap: int = DEFAULT_BOX_CAP
) -> Iterator[Point]:
    """Cone points then, if `neighbours`, the neighbour vectors; never the origin and never a repeat."""
    yield from cone_points(red.H, eps, box_cap)
    if neighbours:
        yield from neighbour_points(red.H, eps)


def map_candidate(M: IntMatrix, v: Sequence[int]) -> CandidateVector:
    x, y, z_s = int_matvec(M, v)
    return CandidateVector(x, y, z_s)


def volume(H: Sequence[Sequence[Scalar]]) -> Fraction:
    """Pyramid volume in primed coordinates: (4/3)/|det H|."""
    return Fraction(4, 3) / abs(det(H))


def surface_area(pyr: Pyramid) -> float:
    def tri(a: Vector, b: Vector, c: Vector) -> float:
        ab, ac = sub(b, a), sub(c, a)
        cross = (
            ab[1] * ac[2] - ab[2] * ac[1],
            ab[2] * ac[0] - ab[0] * ac[2],
            ab[0] * ac[1] - ab[1] * ac[0],
        )
        return math.sqrt(sum(float(x) ** 2 for x in cross)) / 2

    # base vertices are ordered (+,+), (+,−), (−,+), (−,−); the base quad goes round as 0, 1, 3, 2
    q = [pyr.base_vertices[i] for i in (0, 1, 3, 2)]
    sides = sum(tri(pyr.apex, q[i], q[(i + 1) % 4]) for i in range(4))
    return sides + tri(q[0], q[1], q[2]) + tri(q[0], q[2], q[3])


def count_is_plausible(H: Matrix, count: int) -> bool:
    """Cone point count against volume ± twice the surface area. A heuristic, not a bound."""
    v = float(volume(H))
    s = 2 * surface_area(pyramid_vertices(H))
    return v - s <= count <= v + s
