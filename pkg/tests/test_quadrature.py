import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from igdiff.quadrature import AccuracyError, QuadratureSpec, curvature_width, find_peak, integrate_log


@settings(max_examples=60, deadline=None)
@given(m=st.floats(-50, 50), s=st.floats(1e-3, 1e3), shift=st.floats(-5000, 5000))
def test_gaussian_in_log_domain(m, s, shift):
    # int exp(shift - (u-m)^2 / (2 s^2)) du = exp(shift) sqrt(2 pi) s, even when exp(shift) underflows
    logf = lambda u: shift - 0.5 * ((u - m) / s) ** 2  # noqa: E731
    lv, err = integrate_log(logf, -math.inf, math.inf, m, s)
    assert lv == pytest.approx(shift + math.log(math.sqrt(2 * math.pi) * s), abs=1e-9, rel=1e-12)
    assert 0 <= err < 1e-9


def test_half_line_with_misplaced_peak():
    # exponential density on (1, inf) with a poor peak guess still integrates
    lv, _ = integrate_log(lambda u: -u, 1.0, math.inf, 1.0, 10.0)
    assert lv == pytest.approx(-1.0, abs=1e-10)


def test_truncated_gaussian_tail():
    z = 12.0
    lv, _ = integrate_log(lambda u: -0.5 * u * u, z, math.inf, z, 1.0 / z)
    assert lv == pytest.approx(math.log(math.sqrt(2 * math.pi)) + special.log_ndtr(-z), rel=1e-10)


def test_empty_interval():
    assert integrate_log(lambda u: 0.0, 1.0, 1.0, 1.0, 1.0) == (-math.inf, 0.0)


def test_nonfinite_reference_raises():
    with pytest.raises(AccuracyError):
        integrate_log(lambda u: math.nan, 0.0, 1.0, 0.5, 0.1)


def test_unreachable_tolerance_raises():
    # a wildly oscillating integrand with only one refinement allowed
    q = QuadratureSpec(abs_tol=0.0, rel_tol=1e-14, max_refinements=1)
    with pytest.raises(AccuracyError):
        integrate_log(lambda u: math.log(2 + math.sin(200 * u)), 0.0, 10.0, 5.0, 50.0, q)


def test_find_peak_and_width():
    dlog = lambda u: -(u - 3.0) / 4.0  # noqa: E731  (normal, mean 3, sd 2)
    assert find_peak(dlog, -math.inf, -100.0, 1.0) == pytest.approx(3.0)
    assert curvature_width(dlog, 3.0, -math.inf, 1.0) == pytest.approx(2.0)
    # monotone decreasing on (5, inf): peak sits on the boundary
    assert find_peak(dlog, 5.0, 10.0, 1.0) == 5.0


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(abs_tol=0.0, rel_tol=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_refinements=0)
