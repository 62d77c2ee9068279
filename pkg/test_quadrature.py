"""Tests for adaptive and dense quadrature."""

import math

import numpy as np
import pytest
from scipy import stats

from errors import ConfigError, QuadratureError
from quadrature import (
    QuadratureSpec,
    adaptive_simpson,
    check_covers,
    dense_trapezoid,
    integrate,
    merge_intervals,
    pieces,
)


def test_simpson_is_exact_on_cubics():
    value, error = adaptive_simpson(lambda y: y**3 - 2 * y + 1, -1.0, 2.0)
    assert value == pytest.approx(3.75 - 3.0 + 3.0, abs=1e-12)
    assert error < 1e-12


def test_simpson_converges_on_smooth_integrand():
    value, _ = adaptive_simpson(np.sin, 0.0, math.pi)
    assert value == pytest.approx(2.0, abs=1e-9)


def test_gaussian_mass_over_ten_sigma():
    density = stats.norm(loc=3.0, scale=0.2).pdf
    assert integrate(density, [(1.0, 5.0)]) == pytest.approx(1.0, abs=1e-9)


def test_steps_are_exact_with_breakpoints():
    def box(y):
        return np.where((y >= 0.0) & (y <= 1.0), 2.0, 0.5)

    value = integrate(box, [(-1.0, 2.0)], breakpoints=[0.0, 1.0])
    assert value == pytest.approx(0.5 + 2.0 + 0.5, abs=1e-12)


def test_budget_exhaustion_raises():
    spec = QuadratureSpec(initial_panels=4, max_evaluations=100)
    with pytest.raises(QuadratureError, match='no convergence'):
        adaptive_simpson(lambda y: np.sin(200.0 * y), 0.0, 10.0, spec)


@pytest.mark.parametrize('kwargs', [
    {'rel_tol': -1.0},
    {'abs_tol': 0.0},
    {'initial_panels': 0},
    {'max_evaluations': 10},
    {'edge_inset': 0.5},
    {'interval': (1.0, 0.0)},
])
def test_invalid_spec_is_rejected(kwargs):
    with pytest.raises(ConfigError):
        QuadratureSpec(**kwargs)


def test_decreasing_bounds_are_rejected():
    with pytest.raises(ConfigError):
        adaptive_simpson(np.sin, 1.0, 0.0)


def test_intervals_merge_and_split():
    assert merge_intervals([(2, 3), (0, 1), (0.5, 1.5), (4, 4)]) == [(0.0, 1.5), (2.0, 3.0)]
    assert pieces([(0, 2), (3, 4)], [1, 3, 5]) == [(0.0, 1.0), (1.0, 2.0), (3.0, 4.0)]


def test_dense_trapezoid_agrees_with_adaptive_rule():
    def integrand(y):
        return np.exp(-y) * np.log1p(y)

    adaptive = integrate(integrand, [(0.0, 50.0)])
    dense = dense_trapezoid(integrand, [(0.0, 50.0)])
    assert dense == pytest.approx(adaptive, abs=1e-6)


def test_explicit_interval_must_cover_supports():
    spec = QuadratureSpec(interval=(-1.0, 1.0))
    assert check_covers(spec, [(-0.5, 0.5)]) == [(-0.5, 0.5)]
    with pytest.raises(ConfigError, match='does not cover'):
        check_covers(spec, [(-0.5, 2.0)])
