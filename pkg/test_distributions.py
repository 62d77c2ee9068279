"""Tests for the benchmark joint distributions and their samplers."""

import math

import numpy as np
import pytest
from scipy import stats

from distributions import (
    BenchmarkDistribution,
    exponential_pair,
    gaussian_pair,
    make_distribution,
    sample,
    uniform_pair,
)
from errors import ConfigError
from quadrature import integrate
from settings import STREAM_SAMPLE


def test_joint_density_values():
    assert gaussian_pair().joint_density(1, 0.0) == pytest.approx(0.132981, abs=1e-6)
    assert uniform_pair(0.0, 1.0).joint_density(2, 0.0) == pytest.approx(0.666667, abs=1e-6)
    assert exponential_pair().joint_density(2, 2.0) == pytest.approx(0.122626, abs=1e-6)


def test_invalid_label_is_rejected():
    with pytest.raises(ConfigError, match='invalid label 0'):
        gaussian_pair().joint_density(0, 0.0)


def test_uniform_second_component_is_centred_at_minus_offset():
    dist = uniform_pair(2.0, 1.0)
    assert dist.support(1) == pytest.approx((-2.5, -1.5))
    assert dist.joint_density(2, -2.0) == pytest.approx(2 / 3)
    assert dist.joint_density(2, 2.0) == 0.0
    assert dist.breakpoints() == pytest.approx([-2.5, -1.5, -0.5, 0.5])


def test_parameter_validation():
    with pytest.raises(ConfigError):
        gaussian_pair(1.0, 0.0)
    with pytest.raises(ConfigError):
        uniform_pair(0.0, -1.0)
    with pytest.raises(ConfigError):
        gaussian_pair(math.inf, 1.0)
    with pytest.raises(ConfigError):
        BenchmarkDistribution('gaussian_pair', weights=(0.5, 0.6))
    with pytest.raises(ConfigError, match='unknown distribution family'):
        make_distribution('cauchy')


def test_exponential_pair_takes_no_parameters():
    with pytest.raises(ConfigError, match='no parameters'):
        exponential_pair(rate=2.0)
    with pytest.raises(ConfigError, match='has no parameter'):
        make_distribution('exponential', a=1.0)


def test_make_distribution_accepts_aliases_and_defaults():
    dist = make_distribution('gaussian', y_m=2.0)
    assert dist.family == 'gaussian_pair'
    assert dist.params == {'y_m': 2.0, 'sigma_g': 1.0}
    assert make_distribution('exponential_pair').params == {}


@pytest.mark.parametrize('dist', [
    gaussian_pair(0.0, 1.0),
    gaussian_pair(1.0, 0.25),
    gaussian_pair(5.0, 4.0),
    uniform_pair(0.0, 1.0),
    uniform_pair(0.3, 0.5),
    uniform_pair(1.0, 4.0),
    uniform_pair(3.0, 1.0),
    exponential_pair(),
], ids=repr)
def test_marginal_integrates_to_one(dist):
    mass = integrate(dist.marginal_density, dist.supports(), dist.breakpoints())
    assert mass == pytest.approx(1.0, abs=1e-9)


def test_label_fraction_converges():
    ds = sample(gaussian_pair(1.0, 1.0), 100_000, seed=11)
    assert ds.tokens == (1, 2)
    assert ds.counts[0] / ds.n == pytest.approx(1 / 3, abs=0.005)


def test_exponential_second_label_mean():
    ds = sample(exponential_pair(), 100_000, seed=12)
    assert ds.values[ds.labels == 1].mean() == pytest.approx(2.0, abs=0.03)
    assert ds.values.min() >= 0.0


def test_sampling_is_deterministic():
    dist = uniform_pair(0.5, 2.0)
    first = sample(dist, 500, seed=42)
    second = sample(dist, 500, seed=42)
    assert first.pairs == second.pairs
    assert sample(dist, 500, seed=42, key=(STREAM_SAMPLE, 0, 1)).pairs != first.pairs
    assert sample(dist, 500, seed=43).pairs != first.pairs


def test_sample_size_must_be_positive():
    with pytest.raises(ConfigError):
        sample(gaussian_pair(), 0, seed=0)


@pytest.mark.slow
@pytest.mark.parametrize('dist', [
    gaussian_pair(1.0, 2.0),
    uniform_pair(1.0, 3.0),
    exponential_pair(),
], ids=repr)
def test_samples_follow_the_conditional_laws(dist):
    failures = [0, 0]
    for seed in range(10):
        ds = sample(dist, 30_000, seed=seed)
        for index in range(2):
            values = ds.values[ds.labels == index]
            result = stats.kstest(values, dist.components[index].cdf)
            failures[index] += result.pvalue < 0.01
    assert max(failures) <= 2
