#!/usr/bin/env python3
"""
Tests for the special functions: Gamma, Pochhammer, pFq, Bessel functions,
their zeros and the Bessel zeta function.
"""

import cmath
import importlib
import math
import sys
from fractions import Fraction
from pathlib import Path

import mpmath
import pytest
import structlog
from scipy import integrate, special

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

import src.config
from src.config.logconfig import configure_logging
from src.core.errors import DivergenceError, ModeError, PoleError, PreconditionError
from src.core.specfun import (
    HypSeriesSpec, bessel_j, bessel_j_integral, bessel_j_series, bessel_j_tail_integral,
    bessel_zero, bessel_zeros, bessel_zeta, gamma_ratio, hyp_pfq, log_gamma, mellin_bessel_pair,
    nonpositive_order, pochhammer
)


def test_log_gamma_known_values():
    """log Gamma at half-integer and integer points"""
    assert log_gamma(0.5).real == pytest.approx(0.5723649429247001, rel=1e-13)
    assert cmath.exp(log_gamma(5)).real == pytest.approx(24.0, rel=1e-13)


@pytest.mark.parametrize("z", [0.3, 7.2, 2.5 + 1j, -1.5 + 0.5j, 1 + 1j])
def test_log_gamma_functional_equation(z):
    lhs = cmath.exp(log_gamma(z + 1))
    rhs = z * cmath.exp(log_gamma(z))
    assert abs(lhs - rhs) <= 1e-12 * abs(rhs)


@pytest.mark.parametrize("z", [0, -2, Fraction(-3)])
def test_log_gamma_poles(z):
    with pytest.raises(PoleError):
        log_gamma(z)


def test_gamma_ratio_zero_at_denominator_pole():
    assert gamma_ratio([2.5], [-1.0]) == 0.0


def test_pochhammer_values():
    assert pochhammer(3, 2) == 12
    assert pochhammer(Fraction(7, 3), 0) == 1
    assert pochhammer(5, -2) == Fraction(1, 12)
    assert isinstance(pochhammer(5, -2), Fraction)
    assert pochhammer(2.5, 3) == pytest.approx(2.5 * 3.5 * 4.5)


def test_pochhammer_zero_divisor():
    with pytest.raises(PoleError):
        pochhammer(2, -2)


@pytest.mark.parametrize("m,n", [(2, 3), (3, -2), (0, 4), (4, -1)])
def test_pochhammer_splice(m, n):
    x = Fraction(7, 3)
    assert pochhammer(x, m + n) == pochhammer(x, m) * pochhammer(x + m, n)


def test_hyp_pfq_logarithm():
    value = hyp_pfq(HypSeriesSpec((1, 1), (2,), 0.5))
    assert value == pytest.approx(2 * math.log(2), rel=1e-14)


def test_hyp_pfq_terminates_at_first_term():
    value = hyp_pfq(HypSeriesSpec((1, 2, 0), (3, 4), 1))
    assert value == 1
    assert isinstance(value, Fraction)


def test_hyp_pfq_terminating_series_is_exact():
    """Hand sum: 1 - 2/5 + 1/15 - 4/945"""
    value = hyp_pfq(HypSeriesSpec((-3, 2), (5,), Fraction(1, 3)), rational=True)
    assert value == Fraction(626, 945)


def test_hyp_pfq_gauss_summation():
    a, b, c = 0.3, 0.4, 2.1
    value = hyp_pfq(HypSeriesSpec((a, b), (c,), 1))
    expected = gamma_ratio([c, c - a - b], [c - a, c - b])
    assert value == pytest.approx(expected, rel=1e-11)


def test_hyp_pfq_gauss_summation_complex_parameters():
    a, b, c = 0.3 + 0.2j, 0.4, 2.1 - 0.5j
    value = hyp_pfq(HypSeriesSpec((a, b), (c,), 1))
    expected = gamma_ratio([c, c - a - b], [c - a, c - b])
    assert isinstance(value, complex)
    assert abs(value - expected) < 1e-11 * abs(expected)


def test_hyp_pfq_gauss_summation_small_margin():
    a, b, c = 0.5, 0.5, 1.12
    value = hyp_pfq(HypSeriesSpec((a, b), (c,), 1))
    expected = gamma_ratio([c, c - a - b], [c - a, c - b])
    assert value == pytest.approx(expected, rel=1e-9)


def test_hyp_pfq_three_f_two_unit_argument():
    a, b, c = 0.7, 1.3, 3.9
    value = hyp_pfq(HypSeriesSpec((a, b, 1.0), (c, 2.5), 1))
    reference = float(mpmath.hyp3f2(a, b, 1.0, c, 2.5, 1))
    assert value == pytest.approx(reference, rel=1e-11)


def test_hyp_pfq_unit_circle_off_one():
    value = hyp_pfq(HypSeriesSpec((0.5, 0.5), (1.5,), -1.0))
    # 2F1(1/2, 1/2; 3/2; -1) = asinh(1)
    assert value == pytest.approx(math.asinh(1.0), rel=1e-13)


def test_hyp_pfq_unit_argument_without_margin():
    with pytest.raises(DivergenceError):
        hyp_pfq(HypSeriesSpec((1, 1), (2,), 1))


def test_hyp_pfq_rational_mode_needs_termination():
    with pytest.raises(ModeError):
        hyp_pfq(HypSeriesSpec((1, 1), (3,), Fraction(1, 2)), rational=True)


def test_hyp_pfq_denominator_pole():
    with pytest.raises(PoleError):
        hyp_pfq(HypSeriesSpec((1,), (-2,), 0.5))


def test_hyp_pfq_zero_denominator_is_a_pole():
    with pytest.raises(PoleError):
        hyp_pfq(HypSeriesSpec((0, 1), (0,), 1))
    with pytest.raises(PoleError):
        hyp_pfq(HypSeriesSpec((0.5,), (0.0,), 0.25))


def test_nonpositive_order():
    assert nonpositive_order(-1 + 0j) == 1
    assert nonpositive_order(Fraction(-3)) == 3
    assert nonpositive_order(0.0) == 0
    assert nonpositive_order(-1 + 1e-3j) is None
    assert nonpositive_order(2) is None


def test_complex_integer_numerator_terminates():
    spec = HypSeriesSpec((-1 + 0j, 2), (3,), 1)
    assert spec.terminating_order == 1
    # 1 + (-1)(2)/3
    assert hyp_pfq(spec) == pytest.approx(1 / 3, rel=1e-14)


def test_library_logging_is_quiet_by_default(capsys):
    importlib.reload(src.config)
    try:
        hyp_pfq(HypSeriesSpec((0.3, 0.4), (2.1,), 1))
        captured = capsys.readouterr()
        assert captured.out == ""
        assert captured.err == ""
        assert structlog.is_configured()

        structlog.get_logger().warning("visible")
        captured = capsys.readouterr()
        assert captured.out == ""
        assert "visible" in captured.err
    finally:
        # later tests must not write into this test's captured stream
        with capsys.disabled():
            configure_logging()


def test_bessel_j_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(0.5, 2.0) == pytest.approx(math.sqrt(1 / math.pi) * math.sin(2.0), rel=1e-12)


def test_bessel_j_series_matches_library_branch():
    assert bessel_j_series(1, 5.0) == pytest.approx(bessel_j(1, 5.0), rel=1e-10)
    assert bessel_j_series(2.3, 10.5) == pytest.approx(bessel_j(2.3, 10.5), rel=1e-9)


def test_bessel_j_precondition():
    with pytest.raises(PreconditionError):
        bessel_j(-2.5, 1.0)


def test_bessel_j_integral_values():
    assert bessel_j_integral(1.3, 0.0) == 0.0
    reference, _ = integrate.quad(special.j0, 0.0, 50.0, limit=200)
    assert bessel_j_integral(0, 50.0) == pytest.approx(reference, abs=1e-9)
    # the approach to 1 is slow: about 0.901 at u = 50
    assert bessel_j_integral(0, 50.0) == pytest.approx(0.9014121226, abs=1e-8)
    # J_1 = -J_0'
    assert bessel_j_integral(1, 3.0) == pytest.approx(1 - special.j0(3.0), rel=1e-9)


@pytest.mark.parametrize("u", [11.9, 12.5, 30.0])
def test_bessel_j_integral_across_series_switch(u):
    expected, _ = integrate.quad(lambda t: special.jv(0.7, t), 0, u, limit=200)
    assert bessel_j_integral(0.7, u) == pytest.approx(expected, abs=1e-8)


def test_bessel_j_tail_integral_complements():
    assert bessel_j_tail_integral(0.5, 4.0) + bessel_j_integral(0.5, 4.0) == pytest.approx(1.0)


def test_bessel_j_tail_integral_negative_order():
    """J_{-3/2}(t) = sqrt(2/pi) (-t^-3/2 cos t - t^-1/2 sin t), integrated by Fourier quadrature"""
    x = 4.0
    cos_part, _ = integrate.quad(lambda t: t ** -1.5, x, math.inf, weight="cos", wvar=1.0)
    sin_part, _ = integrate.quad(lambda t: t ** -0.5, x, math.inf, weight="sin", wvar=1.0)
    expected = math.sqrt(2 / math.pi) * (-cos_part - sin_part)
    assert bessel_j_tail_integral(-1.5, x) == pytest.approx(expected, rel=1e-7)


def test_bessel_zero_values():
    assert bessel_zero(0, 1) == pytest.approx(2.404825557695773, rel=1e-12)
    for n in range(1, 6):
        assert bessel_zero(0.5, n) == pytest.approx(n * math.pi, rel=1e-12)


def test_bessel_zeros_increasing():
    zeros = bessel_zeros(2.7, 3)
    assert zeros[0] < zeros[1] < zeros[2]


@pytest.mark.parametrize("nu", [-0.4, 0.3, 1.5])
def test_bessel_zeros_interlace(nu):
    lower = bessel_zeros(nu, 11)
    upper = bessel_zeros(nu + 1, 10)
    for n in range(10):
        assert lower[n] < upper[n] < lower[n + 1]


def test_mellin_bessel_pair_symmetric():
    assert mellin_bessel_pair(1.2, 0.4, 0.3) == pytest.approx(mellin_bessel_pair(0.4, 1.2, 0.3), rel=1e-13)


def test_mellin_bessel_pair_half_order():
    """J_{1/2}^2 = 2 sin^2(u) / (pi u), whose Mellin transform at 1/2 is 2/sqrt(pi)"""
    value = mellin_bessel_pair(0.5, 0.5, 0.5)
    assert value.real == pytest.approx(2 / math.sqrt(math.pi), rel=1e-12)
    assert abs(value.imag) < 1e-14


def test_mellin_bessel_pair_validity_region():
    with pytest.raises(PreconditionError):
        mellin_bessel_pair(1.0, 1.0, 1.2)


def test_bessel_zeta_rayleigh_values():
    assert bessel_zeta(3, 2) == Fraction(1, 16)
    assert bessel_zeta(Fraction(1, 2), 2) == Fraction(1, 6)
    assert bessel_zeta(1, 8) == Fraction(16, 256 * 16 * 9 * 20)
    assert bessel_zeta(0.0, 2) == pytest.approx(0.25)


@pytest.mark.slow
@pytest.mark.parametrize("nu,two_k", [(0.0, 2), (1.0, 4), (-0.4, 6), (3.0, 10)])
def test_bessel_zeta_zero_sum_agrees(nu, two_k):
    assert bessel_zeta(nu, two_k, "zero_sum") == pytest.approx(float(bessel_zeta(nu, two_k)), rel=1e-8)


def test_bessel_zeta_preconditions():
    with pytest.raises(PreconditionError):
        bessel_zeta(0, 3)
    with pytest.raises(PreconditionError):
        bessel_zeta(-1, 2)
    with pytest.raises(ValueError):
        bessel_zeta(0, 2, "series")
