#!/usr/bin/env python3
"""
Tests for the bidiagonal beta-Laguerre sampler, the Monte Carlo estimator and
the frozen (beta -> infinity) spectrum.
"""

import math
import sys
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest
from pydantic import ValidationError
from scipy import stats

# Add src to path
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.core import ensemble, moments
from src.core.errors import PreconditionError
from src.core.specfun import bessel_zeros, bessel_zeta
from src.models.spectral import EnsembleConfig


def test_chi_second_moment():
    draws = ensemble.sample_chi(np.full(100_000, 5.0), ensemble.sample_rng(0, 0))
    squares = draws ** 2
    stderr = squares.std(ddof=1) / math.sqrt(squares.size)
    assert abs(squares.mean() - 5.0) <= 5 * stderr


def test_chi_one_is_half_normal():
    draws = ensemble.sample_chi(np.ones(10_000), ensemble.sample_rng(3, 0))
    assert stats.kstest(draws, "halfnorm").pvalue > 0.01


def test_chi_scalar_and_validation():
    assert isinstance(ensemble.sample_chi(2.0, ensemble.sample_rng(0, 1)), float)
    with pytest.raises(PreconditionError):
        ensemble.sample_chi(0.0, ensemble.sample_rng(0, 1))


def test_streams_are_deterministic_and_independent():
    first = ensemble.sample_rng(7, 3).standard_normal(5)
    again = ensemble.sample_rng(7, 3).standard_normal(5)
    other = ensemble.sample_rng(7, 4).standard_normal(5)
    assert np.array_equal(first, again)
    assert not np.array_equal(first, other)


def test_single_cell_is_gamma():
    """N=1: lambda = chi^2_{2(alpha+1)} / 2 with mean alpha+1"""
    config = EnsembleConfig(n_size=1, beta=2.0, alpha=1.5, samples=1)
    draws = np.array([ensemble.sample_spectrum(config, ensemble.sample_rng(2, i))[0] for i in range(20_000)])
    stderr = draws.std(ddof=1) / math.sqrt(draws.size)
    assert abs(draws.mean() - 2.5) <= 5 * stderr


def test_spectrum_positive_and_sorted():
    config = EnsembleConfig(n_size=8, beta=2.5, alpha=1.2, samples=1)
    for index in range(1000):
        values = ensemble.sample_spectrum(config, ensemble.sample_rng(9, index))
        assert values.shape == (8,)
        assert np.all(values > 0)
        assert np.all(np.diff(values) >= 0)


def test_config_validation():
    with pytest.raises(ValidationError):
        EnsembleConfig(n_size=0, beta=2.0, alpha=1.0, samples=10)
    with pytest.raises(ValidationError):
        EnsembleConfig(n_size=3, beta=-1.0, alpha=1.0, samples=10)
    with pytest.raises(ValidationError):
        EnsembleConfig(n_size=3, beta=2.0, alpha=1.0, samples=10, seed=-1)


def test_monte_carlo_preconditions():
    config = EnsembleConfig(n_size=3, beta=2.0, alpha=1.5, samples=10)
    with pytest.raises(PreconditionError):
        ensemble.mc_inverse_moment(config, 0)
    with pytest.raises(PreconditionError):
        ensemble.mc_inverse_moment(config, 3)


def test_monte_carlo_independent_of_workers():
    config = EnsembleConfig(n_size=4, beta=1.0, alpha=4.0, samples=1200, seed=5)
    serial = ensemble.mc_inverse_moment(config, 1, workers=1)
    parallel = ensemble.mc_inverse_moment(config, 1, workers=2)
    assert serial == parallel
    assert serial.samples == 1200


@pytest.mark.slow
@pytest.mark.parametrize("n,beta,alpha,k,seed", [
    (5, 2.0, 3.0, 1, 7),
    (3, 1.0, 4.0, 2, 12),
    (4, 4.0, 6.0, 3, 13),
    (4, 3.7, 6.0, 2, 1),
])
def test_monte_carlo_calibration(n, beta, alpha, k, seed):
    config = EnsembleConfig(n_size=n, beta=beta, alpha=alpha, samples=20_000, seed=seed)
    estimate = ensemble.mc_inverse_moment(config, k, workers=1)
    exact = moments.moment_finite_N(k, beta, alpha, n)
    assert abs(estimate.mean - exact) <= 4 * estimate.stderr


def test_monte_carlo_tabulated_targets():
    assert moments.moment_finite_N(1, 2, 3, 5, "rational") == Fraction(5, 3)
    assert moments.moment_finite_N(2, 1, 4, 3, "rational") == Fraction(11, 36)


def test_laguerre_zeros_small_cases():
    assert ensemble.laguerre_zeros(1, 0.7) == pytest.approx([1.7])
    assert ensemble.laguerre_zeros(2, 0.0) == pytest.approx([2 - math.sqrt(2), 2 + math.sqrt(2)])


def test_laguerre_zeros_above_bessel_bound():
    n, nu = 50, 1.0
    zeros = ensemble.laguerre_zeros(n, nu)
    bound = bessel_zeros(nu, n) ** 2 / (4 * n + 2 * nu + 2)
    assert np.all(zeros > bound)


def test_lowtemp_moment_sum():
    assert ensemble.lowtemp_moment_sum(1, 0.0, 1) == pytest.approx(2.0)
    value = ensemble.lowtemp_moment_sum(3, 0.5, 2) / 3 ** 2
    expected = float(moments.moment_lowtemp_finite_N(2, Fraction(1, 2), 3, "rational"))
    assert value == pytest.approx(expected, rel=1e-10)


def test_spectrum_statistics_matches_marchenko_pastur():
    config = EnsembleConfig(n_size=100, beta=2.0, alpha=1.0, samples=300, seed=5)
    assert ensemble.spectrum_statistics(config) < 0.05


def test_frozen_spectrum_scales_to_bessel_zeros():
    n, nu = 400, 1.0
    scaled = 4 * n * ensemble.laguerre_zeros(n, nu)[:3]
    np.testing.assert_allclose(scaled, bessel_zeros(nu, 3) ** 2, rtol=1e-2)


def test_lowtemp_sum_approaches_bessel_zeta():
    nu, k = 1.0, 2
    target = float(bessel_zeta(nu, 2 * k))
    gaps = []
    for n in (100, 400):
        scaled = 4 * n * ensemble.laguerre_zeros(n, nu)
        gaps.append(abs(float(np.sum(scaled ** (-float(k)))) - target))
    assert gaps[1] < gaps[0]
    assert gaps[1] <= 1e-2 * target


def test_finite_moment_scales_to_hard_edge_limit():
    """E[sum lambda^-k] / N^k decreases towards the hard-edge value"""
    limit = moments.moment_limit(2, 2, 4)
    scaled = [moments.moment_finite_N(2, 2, 4, n) / n ** 2 for n in (8, 16, 32)]
    assert scaled[0] > scaled[1] > scaled[2] > limit
    assert scaled[2] < 1.3 * limit


@pytest.mark.slow
@pytest.mark.parametrize("n,seed", [(8, 3), (16, 4), (32, 5)])
def test_monte_carlo_scaling_in_n(n, seed):
    config = EnsembleConfig(n_size=n, beta=2.0, alpha=4.0, samples=4000, seed=seed)
    estimate = ensemble.mc_inverse_moment(config, 2, workers=1)
    exact = moments.moment_finite_N(2, 2, 4, n)
    assert abs(estimate.mean - exact) <= 4 * estimate.stderr
    assert 0.01 < estimate.mean / n ** 2 < 0.05


@pytest.mark.parametrize("beta", [Fraction(4, 5), Fraction(2), Fraction(4)])
def test_first_moment_independent_of_beta(beta):
    assert moments.moment_finite_N(1, beta, 4, 4, "rational") == 1


@pytest.mark.slow
@pytest.mark.parametrize("beta,seed", [(0.8, 21), (2.0, 22), (4.0, 23)])
def test_monte_carlo_first_moment_independent_of_beta(beta, seed):
    config = EnsembleConfig(n_size=4, beta=beta, alpha=4.0, samples=20_000, seed=seed)
    estimate = ensemble.mc_inverse_moment(config, 1, workers=1)
    assert abs(estimate.mean - 1.0) <= 4 * estimate.stderr
