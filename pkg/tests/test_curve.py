from fractions import Fraction

import mpmath
import pytest
from hypothesis import assume, given, strategies as st
from mpmath import mpf

from flagstone.curve import (
    CurveParams,
    Region,
    SearchWindow,
    build_basis,
    build_window,
    check_straddle,
    classify_interval,
    curve_second,
    curve_y,
    real_cbrt,
    required_precision,
    to_fraction,
)
from flagstone.errors import InvalidParams, SingularPoint
from flagstone.linalg import det

SINGULAR_X = 0.5 ** (1 / 3)


def test_real_cbrt() -> None:
    assert real_cbrt(8) == 2
    assert real_cbrt(-27) == -3
    assert real_cbrt(0) == 0


def test_to_fraction_is_exact() -> None:
    assert to_fraction(mpf(0.5)) == Fraction(1, 2)
    assert to_fraction(mpf(3)) == 3
    assert to_fraction(mpf(-0.75)) == Fraction(-3, 4)
    assert to_fraction(mpf(-6)) == -6
    assert to_fraction(mpf(0)) == 0


def test_required_precision() -> None:
    assert required_precision(2) == 66
    assert required_precision(1000) == 84
    assert required_precision(1e30) == 264
    # never below the floor
    assert required_precision(1) == 64


def test_curve_params_validation() -> None:
    with pytest.raises(InvalidParams):
        CurveParams(c=0)
    with pytest.raises(InvalidParams):
        CurveParams(precision_bits=32)


def test_worked_example_window(worked_example: SearchWindow) -> None:
    assert worked_example.region == Region.A
    assert float(worked_example.Y0) == pytest.approx(0.9788884152, abs=1e-8)
    assert float(worked_example.A) == pytest.approx(-0.205986, abs=1e-4)
    assert float(worked_example.B) == pytest.approx(1.043599, abs=1e-4)
    assert worked_example.precision_bits == 128


def test_worked_example_basis(worked_example: SearchWindow) -> None:
    F = build_basis(worked_example).matrix
    expected = [
        [2, 0, -0.6283],
        [20.5986, 100, -104.3599],
        [0, 0, 0.001],
    ]
    for row, want in zip(F, expected):
        assert [float(x) for x in row] == pytest.approx(want, abs=2e-4)


def test_curvature_sign(curve_params: CurveParams) -> None:
    Y0 = curve_y(curve_params, 0.31415)
    assert float(curve_second(curve_params, 0.31415, Y0)) == pytest.approx(-1.398077, abs=1e-5)

    Y0 = curve_y(curve_params, -1)
    assert curve_second(curve_params, -1, Y0) > 0


def test_classify_interval(curve_params: CurveParams) -> None:
    assert classify_interval(curve_params, 0.31415) == Region.A
    assert classify_interval(curve_params, 0) == Region.A
    assert classify_interval(curve_params, 1) == Region.B
    assert classify_interval(curve_params, -1) == Region.C

    # c=1 moves the singular point to X=1
    assert classify_interval(CurveParams(c=1), 0.9) == Region.A
    assert classify_interval(CurveParams(c=1), 1.1) == Region.B


def test_singular_point(curve_params: CurveParams) -> None:
    with pytest.raises(SingularPoint):
        curve_y(curve_params, SINGULAR_X)
    with pytest.raises(SingularPoint):
        classify_interval(curve_params, SINGULAR_X)

    # the whole interval must stay clear of the singular point
    with pytest.raises(SingularPoint):
        build_window(curve_params, SINGULAR_X + 0.0005, 0.01, 1e-3, 100)


def test_build_window_validation(curve_params: CurveParams) -> None:
    with pytest.raises(InvalidParams):
        build_window(curve_params, 0.3, 0, 1e-5, 1000)
    with pytest.raises(InvalidParams):
        build_window(curve_params, 0.3, 0.001, -1e-5, 1000)
    with pytest.raises(InvalidParams):
        build_window(curve_params, 0.3, 0.001, 1e-5, 1)


def test_precision_follows_scale(curve_params: CurveParams) -> None:
    window = build_window(curve_params, 0.3, 1e-40, 1e-80, 1e40)
    assert window.precision_bits == required_precision(1e40)
    assert window.precision_bits > curve_params.precision_bits


@given(st.floats(min_value=-10, max_value=10, allow_nan=False))
def test_cube_identity(X0: float) -> None:
    assume(abs(X0 - SINGULAR_X) > 1e-5)
    params = CurveParams()
    Y0 = curve_y(params, X0)
    with mpmath.workprec(params.precision_bits):
        assert abs(Y0**3 + 2 * mpf(X0) ** 3 - 1) < mpf(10) ** -25 * (1 + abs(X0) ** 3)


def test_straddle(curve_params: CurveParams) -> None:
    assert check_straddle(build_window(curve_params, 0.5, 0.01, 1e-3, 100))
    assert check_straddle(build_window(curve_params, -2, 0.001, 1e-5, 1000))
    assert check_straddle(build_window(curve_params, 3, 0.001, 1e-5, 1000))


def test_basis_determinant(worked_example: SearchWindow) -> None:
    w = worked_example
    want = 2 / (w.h * w.K * w.L**3)
    assert float(build_basis(w).det()) == pytest.approx(float(want), rel=1e-12)


@pytest.mark.parametrize("X0", [0.31415, 2.5, -3.0])
def test_basis_pattern(curve_params: CurveParams, X0: float) -> None:
    window = build_window(curve_params, X0, 0.001, 1e-5, 1000)
    (f11, f12, f13), (f21, f22, f23), (f31, f32, f33) = build_basis(window).matrix
    assert f12 == 0
    assert f31 == 0
    assert f32 == 0
    assert f11 > 0
    assert f22 > 0
    assert f33 > 0
    assert det(build_basis(window).matrix) > 0


def test_build_basis_small() -> None:
    # h=2, K=1, L=1, X0=0 and the midline Y = 1
    window = SearchWindow(2, mpf(0), mpf(2), mpf(1), mpf(1), mpf(1), mpf(0), mpf(1), Region.A, 128)
    assert build_basis(window).matrix == ((1, 0, 0), (0, 1, -1), (0, 0, 1))


def test_basis_keeps_working_precision(worked_example: SearchWindow) -> None:
    F = build_basis(worked_example).matrix
    assert F[1][2].denominator > 2**53

    window = build_window(CurveParams(precision_bits=256), 0.31415, 0.001, 1e-5, 1000)
    assert window.precision_bits == 256
    with mpmath.workprec(256):
        want = to_fraction(-window.B / (window.K * window.L))
    F = build_basis(window).matrix
    assert F[1][2] == want
    assert F[1][2].denominator > 2**128


@pytest.mark.parametrize(
    ("X0", "region"),
    [(0.31415, Region.A), (2.0, Region.B), (-1.0, Region.C)],
)
def test_tangent_side(curve_params: CurveParams, X0: float, region: Region) -> None:
    # the tangent at X0 lies above the curve where f'' < 0 and below it where f'' > 0
    w = build_window(curve_params, X0, 0.001, 1e-5, 1000)
    assert w.region == region
    bend = mpmath.sign(curve_second(curve_params, w.X0, w.Y0))
    with mpmath.workprec(w.precision_bits):
        for k in (-5, -3, -1, 1, 3, 5):
            X = w.X0 + w.h * k / 10
            gap = real_cbrt(1 - w.c * X**3) - (w.Y0 + w.A * (X - w.X0))
            assert mpmath.sign(gap) == bend, k
