"""The curve Y³ = 1 − cX³ and the flagstone window around one of its points.

Solutions of d = c·x³ + y³ − z³ with large z are rational points (x/z, y/z)
close to this curve. A window is a short interval I = [X0 − h/2, X0 + h/2]
together with a thin band of half-thickness K around the line Y = A·X + B that
cuts through the curve over I. Every real quantity is computed with mpmath at a
configurable precision and only then rounded to exact rationals for the lattice.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import mpmath
from mpmath import mpf

from flagstone.errors import InvalidParams, SingularPoint
from flagstone.linalg import Matrix, Vector, det, from_columns

Real = Union[int, float, str, Fraction, mpf]

MIN_PRECISION = 64


class Region(str, enum.Enum):
    A = "a"  # 0 <= X < (1/c)^(1/3), Y > 0
    B = "b"  # X > (1/c)^(1/3), Y < 0
    C = "c_region"  # X < 0, Y > 0


@dataclass(frozen=True)
class CurveParams:
    c: int = 2
    precision_bits: int = 128
    singular_margin: float = 1e-6

    def __post_init__(self) -> None:
        if self.c < 1:
            raise InvalidParams(f"c must be >= 1, got {self.c}")
        if self.precision_bits < MIN_PRECISION:
            raise InvalidParams(f"precision_bits must be >= {MIN_PRECISION}, got {self.precision_bits}")
        if self.singular_margin <= 0:
            raise InvalidParams(f"singular_margin must be positive, got {self.singular_margin}")


@dataclass(frozen=True)
class SearchWindow:
    c: int
    X0: mpf
    h: mpf
    K: mpf
    L: mpf
    Y0: mpf
    A: mpf
    B: mpf
    region: Region
    precision_bits: int

    def summary(self) -> tuple[float, float, float, float]:
        return float(self.X0), float(self.h), float(self.K), float(self.L)


@dataclass(frozen=True)
class Basis:
    """Column basis F of the window lattice.

    f1 = (2/(hL), −A/(KL), 0), f2 = (0, 1/(KL), 0), f3 = (−2X0/(hL), −B/(KL), 1/L).
    A lattice vector x·f1 + y·f2 + z·f3 lies in the unit pyramid exactly when x/z is
    within h/2 of X0 and y/z is within K of the midline.
    """

    columns: tuple[Vector, Vector, Vector]
    window: SearchWindow | None = None

    @property
    def matrix(self) -> Matrix:
        return from_columns(self.columns)

    def det(self) -> Fraction:
        return det(self.matrix)


def required_precision(L: Real) -> int:
    """Bits needed so rounding the basis cannot swamp the 1/L scale of the lattice."""
    log2_l = math.log2(float(L)) if float(L) > 1 else 0.0
    return max(MIN_PRECISION, math.ceil(2 * log2_l) + MIN_PRECISION)


def to_fraction(x: mpf) -> Fraction:
    """Exact value of a binary mpf, at whatever precision it was computed."""
    sign, man, exp, _ = x._mpf_
    man, exp = int(man), int(exp)
    if man == 0:
        return Fraction(0)
    if sign:
        man = -man
    return Fraction(man * 2**exp) if exp >= 0 else Fraction(man, 2**-exp)


def real_cbrt(t: Real) -> mpf:
    """Sign-preserving real cube root. mpmath.cbrt returns the principal (complex) root for t < 0."""
    t = mpf(t)
    if t < 0:
        return -mpmath.cbrt(-t)
    return mpmath.cbrt(t)


def singular_x(params: CurveParams) -> mpf:
    return real_cbrt(mpf(1) / params.c)


def _check_singular(params: CurveParams, X0: mpf, margin: float) -> None:
    if abs(X0 - singular_x(params)) < margin:
        raise SingularPoint(f"X0={mpmath.nstr(X0, 12)} is within {margin} of the singular point (1/{params.c})^(1/3)")


def curve_y(params: CurveParams, X0: Real) -> mpf:
    with mpmath.workprec(params.precision_bits):
        X0 = mpf(X0)
        _check_singular(params, X0, params.singular_margin)
        return real_cbrt(1 - params.c * X0**3)


def curve_slope(params: CurveParams, X0: Real, Y0: Real) -> mpf:
    """Tangent slope A = −c·X0²/Y0²."""
    with mpmath.workprec(params.precision_bits):
        X0, Y0 = mpf(X0), mpf(Y0)
        if abs(Y0) < params.singular_margin:
            raise SingularPoint(f"Y0={mpmath.nstr(Y0, 12)} too close to 0")
        return -params.c * X0**2 / Y0**2


def curve_second(params: CurveParams, X0: Real, Y0: Real) -> mpf:
    """f''(X0) = −2c·X0/Y0⁵."""
    with mpmath.workprec(params.precision_bits):
        X0, Y0 = mpf(X0), mpf(Y0)
        if abs(Y0) < params.singular_margin:
            raise SingularPoint(f"Y0={mpmath.nstr(Y0, 12)} too close to 0")
        return -2 * params.c * X0 / Y0**5


def classify_interval(params: CurveParams, X0: Real) -> Region:
    with mpmath.workprec(params.precision_bits):
        X0 = mpf(X0)
        _check_singular(params, X0, params.singular_margin)
        if X0 < 0:
            return Region.C
        return Region.A if X0 < singular_x(params) else Region.B


def build_window(params: CurveParams, X0: Real, h: Real, K: Real, L: Real) -> SearchWindow:
    """Build the window centred on X0.

    The midline intercept is B = Y0 − A·X0 + h²·f''(X0)/16. The tangent line (no
    correction) stays on one side of the curve and the /8 line sits wholly on the
    other; the /16 line cuts through the curve over I.

    Raises:
        InvalidParams: for non-positive h or K, or L <= 1.
        SingularPoint: if I comes within max(h, margin) of (1/c)^(1/3).
    """
    if not (float(h) > 0 and float(K) > 0):
        raise InvalidParams(f"h and K must be positive, got h={h} K={K}")
    if not float(L) > 1:
        raise InvalidParams(f"L must be > 1, got L={L}")

    bits = max(params.precision_bits, required_precision(L))
    with mpmath.workprec(bits):
        X0, h, K, L = mpf(X0), mpf(h), mpf(K), mpf(L)
        _check_singular(params, X0, max(float(h), params.singular_margin))
        wide = CurveParams(params.c, bits, params.singular_margin)
        Y0 = curve_y(wide, X0)
        A = curve_slope(wide, X0, Y0)
        B = Y0 - A * X0 + h**2 * curve_second(wide, X0, Y0) / 16
        region = classify_interval(wide, X0)

    return SearchWindow(params.c, X0, h, K, L, Y0, A, B, region, bits)


def build_basis(window: SearchWindow) -> Basis:
    """F with every entry rounded once, at the window's working precision, then held exactly."""

    def exact(col: tuple[mpf, mpf, mpf]) -> Vector:
        return tuple(to_fraction(x) for x in col)

    with mpmath.workprec(window.precision_bits):
        hL = window.h * window.L
        KL = window.K * window.L
        f1 = (2 / hL, -window.A / KL, mpf(0))
        f2 = (mpf(0), 1 / KL, mpf(0))
        f3 = (-2 * window.X0 / hL, -window.B / KL, 1 / window.L)
        return Basis((exact(f1), exact(f2), exact(f3)), window)


def check_straddle(window: SearchWindow, shrink: float = 1e-3) -> bool:
    """True if the midline is on one side of the curve at X0 and on the other near both ends of I.

    Only meaningful when h is small enough for the second-order Taylor term to
    dominate; callers flag failures rather than treat them as errors.
    """
    params = CurveParams(window.c, window.precision_bits)
    with mpmath.workprec(window.precision_bits):

        def gap(x: mpf) -> mpf:
            return real_cbrt(1 - window.c * x**3) - (window.A * x + window.B)

        centre = gap(window.X0)
        offset = window.h / 2 * (1 - mpf(shrink))
        ends = [gap(window.X0 - offset), gap(window.X0 + offset)]
        f2 = curve_second(params, window.X0, window.Y0)

    if f2 == 0:
        return centre == 0 and all(e == 0 for e in ends)
    return all(mpmath.sign(centre) != mpmath.sign(e) for e in ends)
