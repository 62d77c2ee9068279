"""Tests for bandwidth selection and the per-label kernel density model."""

import math

import numpy as np
import pytest
from scipy import stats

from dataset import LabeledDataset
from distributions import gaussian_pair
from errors import ConfigError, DatasetError, InsufficientSampleError, ZeroVarianceError
from kde import (
    Bandwidth,
    conditional_density,
    conditional_mass,
    fit,
    kde_eval,
    kde_grid,
    log_kde_eval,
    marginal_density,
    silverman_bandwidth,
)


def test_silverman_rule():
    values = np.array([0.0, 1.0, 2.0, 3.0, 4.0])
    bandwidth = silverman_bandwidth(values, 1.06)
    assert bandwidth.h == pytest.approx(1.06 * math.sqrt(2.5) * 5 ** -0.2, rel=1e-12)
    assert bandwidth.factor == 1.06


def test_bandwidth_rejects_degenerate_samples():
    with pytest.raises(InsufficientSampleError, match='insufficient sample'):
        silverman_bandwidth(np.array([1.0]))
    with pytest.raises(ZeroVarianceError, match='zero variance'):
        silverman_bandwidth(np.array([2.0, 2.0, 2.0]))
    with pytest.raises(ConfigError):
        silverman_bandwidth(np.array([0.0, 1.0]), factor=0.0)


def test_single_kernel_is_the_normal_density():
    assert kde_eval(np.array([0.0]), 1.0, 0.0) == pytest.approx(1.0 / math.sqrt(2 * math.pi))
    assert isinstance(kde_eval(np.array([0.0]), 1.0, 0.5), float)


def test_matches_scipy_gaussian_kde():
    rng = np.random.default_rng(3)
    values = rng.normal(size=200)
    h = silverman_bandwidth(values)
    reference = stats.gaussian_kde(values, bw_method=h.h / np.std(values, ddof=1))
    grid = np.linspace(-4.0, 4.0, 81)
    np.testing.assert_allclose(kde_eval(values, h, grid), reference(grid), rtol=1e-10)


def test_log_density_stays_finite_far_from_data():
    log_density = log_kde_eval(np.array([0.0, 0.1]), Bandwidth(0.1), np.array([1e3, -1e4]))
    assert np.all(np.isfinite(log_density))
    assert np.all(log_density < -1e6)


def test_fit_errors_name_the_label():
    ds = LabeledDataset.from_pairs([1, 1, 1, 9], [0.0, 1.0, 2.0, 3.0])
    with pytest.raises(InsufficientSampleError, match='label 9') as info:
        fit(ds)
    assert info.value.label == 9

    ds = LabeledDataset.from_pairs([1, 1, 4, 4], [0.0, 1.0, 2.0, 2.0])
    with pytest.raises(ZeroVarianceError, match='label 4'):
        fit(ds)


def test_fit_uses_per_label_counts(overlapping_gaussian):
    model = fit(overlapping_gaussian)
    for comp in model.components:
        assert comp.bandwidth.h == pytest.approx(silverman_bandwidth(comp.values).h)
        assert comp.weight == pytest.approx(comp.count / overlapping_gaussian.n)
    assert model.n == overlapping_gaussian.n
    assert model.weights.sum() == pytest.approx(1.0)


def test_pooled_mode_shares_one_bandwidth(overlapping_gaussian):
    model = fit(overlapping_gaussian, mode='pooled')
    widths = {c.bandwidth.h for c in model.components}
    assert widths == {silverman_bandwidth(overlapping_gaussian.values).h}
    with pytest.raises(ConfigError):
        fit(overlapping_gaussian, mode='adaptive')


def test_marginal_dominates_each_weighted_conditional(overlapping_gaussian):
    model = fit(overlapping_gaussian)
    grid = np.linspace(-8.0, 9.0, 200)
    marginal = marginal_density(model, grid)
    assert np.all(marginal > 0)
    for comp in model.components:
        joint = comp.weight * conditional_density(model, comp.token, grid)
        assert np.all(marginal >= joint * (1 - 1e-12))


def test_unknown_label_is_rejected(overlapping_gaussian):
    model = fit(overlapping_gaussian)
    with pytest.raises(DatasetError, match='unknown label 3'):
        conditional_density(model, 3, 0.0)


def test_fitted_conditionals_integrate_to_one(overlapping_gaussian):
    model = fit(overlapping_gaussian)
    for token in model.tokens:
        assert conditional_mass(model, token) == pytest.approx(1.0, abs=1e-6)


def test_grid_export_layout(overlapping_gaussian):
    model = fit(overlapping_gaussian)
    grid = np.linspace(-3.0, 4.0, 15)

    frame = kde_grid(model, grid)

    assert list(frame.columns) == ['y', 'label', 'conditional', 'marginal']
    assert len(frame) == 2 * len(grid)
    assert frame['y'].is_monotonic_increasing
    assert frame.groupby('y')['label'].apply(list).tolist()[0] == [1, 2]


@pytest.mark.slow
def test_fitted_joint_tracks_exact_densities(overlapping_gaussian):
    dist = gaussian_pair(1.0, 1.0)
    model = fit(overlapping_gaussian)
    grid = np.linspace(-5.0, 6.0, 221)

    frame = kde_grid(model, grid, dist)

    joint_error = (frame['joint'] - frame['true_joint']).abs()
    marginal_error = (frame['marginal'] - frame['true_marginal']).abs()
    assert joint_error.mean() < 0.02
    assert joint_error.max() < 0.05
    assert marginal_error.mean() < 0.02
    assert marginal_error.max() < 0.05
    for token, rows in frame.groupby('label'):
        exact = dist.conditional_density(token, rows['y'].to_numpy())
        assert np.max(np.abs(rows['conditional'].to_numpy() - exact)) < 0.05


@pytest.mark.parametrize('shift', [-40.0, 0.5, 1e3])
def test_density_moves_with_a_shift(shift):
    values = np.random.default_rng(4).normal(size=200)
    y = np.linspace(-3.0, 3.0, 13)
    h = silverman_bandwidth(values).h

    assert silverman_bandwidth(values + shift).h == pytest.approx(h, rel=1e-9)
    np.testing.assert_allclose(kde_eval(values + shift, h, y + shift), kde_eval(values, h, y),
                               rtol=1e-7)


@pytest.mark.parametrize('scale', [0.01, 3.0, 250.0])
def test_density_scales_with_the_values(scale):
    values = np.random.default_rng(5).exponential(size=200)
    y = np.linspace(0.0, 4.0, 9)
    h = silverman_bandwidth(values).h

    assert silverman_bandwidth(scale * values).h == pytest.approx(scale * h, rel=1e-9)
    np.testing.assert_allclose(scale * kde_eval(scale * values, scale * h, scale * y),
                               kde_eval(values, h, y), rtol=1e-9)


def test_fitted_conditionals_follow_an_affine_map(overlapping_gaussian):
    moved = LabeledDataset(labels=overlapping_gaussian.labels,
                           values=2.0 * overlapping_gaussian.values - 7.0,
                           tokens=overlapping_gaussian.tokens)
    y = np.linspace(-2.0, 3.0, 11)
    original, mapped = fit(overlapping_gaussian), fit(moved)
    for token in overlapping_gaussian.tokens:
        np.testing.assert_allclose(2.0 * conditional_density(mapped, token, 2.0 * y - 7.0),
                                   conditional_density(original, token, y), rtol=1e-7)


def test_unit_spread_thousand_values():
    values = np.random.default_rng(0).normal(size=1000)
    values = (values - values.mean()) / np.std(values, ddof=1)
    assert silverman_bandwidth(values).h == pytest.approx(0.266255, abs=1e-6)


def test_standard_normal_draws_recover_peak():
    values = np.random.default_rng(5).normal(size=1000)
    assert kde_eval(values, silverman_bandwidth(values), 0.0) == pytest.approx(0.398942, abs=0.05)
    assert kde_eval(np.array([0.0]), 1.0, 1.0) == pytest.approx(0.241971, abs=1e-6)


def test_identical_value_lists_give_identical_components():
    values = [0.3, -1.2, 2.5, 0.9]
    ds = LabeledDataset.from_pairs([1] * 4 + [2] * 4, values + values)
    model = fit(ds)
    first, second = model.components
    assert first.bandwidth == second.bandwidth
    grid = np.linspace(-3.0, 4.0, 9)
    np.testing.assert_array_equal(conditional_density(model, 1, grid),
                                  conditional_density(model, 2, grid))


def test_single_label_marginal_is_the_conditional():
    ds = LabeledDataset.from_pairs([4, 4, 4], [0.0, 0.5, 2.0])
    model = fit(ds)
    grid = np.linspace(-2.0, 4.0, 13)
    np.testing.assert_allclose(marginal_density(model, grid),
                               conditional_density(model, 4, grid), rtol=1e-14)
