"""
Gaussian kernel density approximation for labeled samples.

This module provides bandwidth selection, per-label conditional densities and
their label-weighted mixture. Every density is computed in log space with a
max-shifted exponential sum, so evaluations far from the data stay finite.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy.special import logsumexp

from dataset import LabeledDataset, label_frequencies, partition
from errors import (
    ConfigError,
    DatasetError,
    InsufficientSampleError,
    ZeroVarianceError,
)
from quadrature import QuadratureSpec, integrate
from settings import (
    BANDWIDTH_MODES,
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_BANDWIDTH_MODE,
    KDE_EVAL_CELLS,
    KDE_GRID_COLUMNS,
    KDE_SUPPORT_PADDING,
)

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _check_factor(factor: float) -> float:
    factor = float(factor)
    if not (math.isfinite(factor) and factor > 0):
        raise ConfigError(f"bandwidth factor must be positive, got {factor}")
    return factor


@dataclass(frozen=True)
class Bandwidth:
    """Kernel width h and the multiplier it was computed with."""

    h: float
    factor: float = DEFAULT_BANDWIDTH_FACTOR

    def __post_init__(self) -> None:
        if not (math.isfinite(self.h) and self.h > 0):
            raise ConfigError(f"bandwidth must be positive, got {self.h}")
        _check_factor(self.factor)


def silverman_bandwidth(values: np.ndarray,
                        factor: float = DEFAULT_BANDWIDTH_FACTOR) -> Bandwidth:
    """
    Rule-of-thumb bandwidth h = factor * s * m^(-1/5).

    Args:
        values: Sample of m reals
        factor: Multiplier, 1.06 for the normal-reference rule

    Returns:
        Bandwidth with s the sample standard deviation (divisor m - 1)

    Raises:
        InsufficientSampleError: Fewer than two values
        ZeroVarianceError: All values identical
    """
    factor = _check_factor(factor)
    values = np.asarray(values, dtype=np.float64).ravel()
    m = values.size
    if m < 2:
        raise InsufficientSampleError(f"insufficient sample: {m} value(s), need at least 2")
    if values.max() == values.min():
        raise ZeroVarianceError("zero variance: all values are identical")

    s = float(np.std(values, ddof=1))
    return Bandwidth(h=factor * s * m ** -0.2, factor=factor)


def log_kde_eval(values: np.ndarray, h: Union[Bandwidth, float], y: ArrayLike) -> np.ndarray:
    """
    Logarithm of the Gaussian kernel density estimate at y.

    Query points are processed in blocks of at most KDE_EVAL_CELLS kernel terms.

    Args:
        values: Nonempty sample the kernels are centred on
        h: Bandwidth
        y: Evaluation point(s)

    Returns:
        Array shaped like y with log densities (always finite)
    """
    width = h.h if isinstance(h, Bandwidth) else float(h)
    if not width > 0:
        raise ConfigError(f"bandwidth must be positive, got {width}")
    centres = np.asarray(values, dtype=np.float64).ravel()
    if centres.size == 0:
        raise InsufficientSampleError("kernel sum over an empty sample")

    points = np.asarray(y, dtype=np.float64)
    flat = points.ravel()
    out = np.empty(flat.shape, dtype=np.float64)
    log_norm = math.log(centres.size * width) + _LOG_SQRT_2PI
    block = max(1, KDE_EVAL_CELLS // centres.size)

    for start in range(0, flat.size, block):
        z = (flat[start:start + block, None] - centres[None, :]) / width
        out[start:start + block] = logsumexp(-0.5 * z * z, axis=1) - log_norm

    return out.reshape(points.shape)


def kde_eval(values: np.ndarray, h: Union[Bandwidth, float], y: ArrayLike) -> ArrayLike:
    """
    Gaussian kernel density estimate (1/(m h sqrt(2 pi))) sum_j exp(-(y - y_j)^2 / 2h^2).

    Returns a float for scalar y, otherwise an array shaped like y.
    """
    density = np.exp(log_kde_eval(values, h, y))
    return float(density) if np.ndim(y) == 0 else density


@dataclass(frozen=True, eq=False)
class KernelComponent:
    """The fitted density of one label: its values, bandwidth and frequency."""

    index: int
    token: int
    values: np.ndarray = field(repr=False)
    bandwidth: Bandwidth
    weight: float

    @property
    def count(self) -> int:
        """Number of values carrying this label."""
        return int(self.values.size)

    @property
    def log_weight(self) -> float:
        """Logarithm of the label frequency."""
        return math.log(self.weight)

    def log_density(self, y: ArrayLike) -> np.ndarray:
        """Log of the conditional density estimate."""
        return log_kde_eval(self.values, self.bandwidth, y)

    def padded_support(self, padding: float = KDE_SUPPORT_PADDING) -> Tuple[float, float]:
        """Interval [min - padding*h, max + padding*h] holding all but a negligible tail."""
        reach = padding * self.bandwidth.h
        return float(self.values.min()) - reach, float(self.values.max()) + reach


@dataclass(frozen=True, eq=False)
class ConditionalKde:
    """
    Per-label kernel density model fitted to a labeled dataset.

    Labels in the public methods are original tokens; components are stored in
    dense label order.
    """

    components: Tuple[KernelComponent, ...]
    factor: float = DEFAULT_BANDWIDTH_FACTOR
    mode: str = DEFAULT_BANDWIDTH_MODE

    @property
    def tokens(self) -> Tuple[int, ...]:
        """Label tokens in dense order."""
        return tuple(c.token for c in self.components)

    @property
    def weights(self) -> np.ndarray:
        """Label frequencies p_a(x) in dense order."""
        return np.array([c.weight for c in self.components])

    @property
    def n(self) -> int:
        """Size of the sample the model was fitted on."""
        return sum(c.count for c in self.components)

    def component(self, label: int) -> KernelComponent:
        """
        Get the component for a label token.

        Raises:
            DatasetError: The label is not part of the model
        """
        for comp in self.components:
            if comp.token == label:
                return comp
        raise DatasetError(f"unknown label {label}")

    def log_components(self, y: ArrayLike) -> np.ndarray:
        """Log conditional densities of every label, shape (K, *y.shape)."""
        return np.stack([c.log_density(y) for c in self.components])

    def log_marginal(self, y: ArrayLike, log_components: Optional[np.ndarray] = None) -> np.ndarray:
        """Log of the mixture sum_x p_a(x) mu_x(y)."""
        if log_components is None:
            log_components = self.log_components(y)
        log_w = np.array([c.log_weight for c in self.components])
        log_w = log_w.reshape((-1,) + (1,) * (log_components.ndim - 1))
        return logsumexp(log_components + log_w, axis=0)

    def supports(self, padding: float = KDE_SUPPORT_PADDING) -> List[Tuple[float, float]]:
        """Padded support of every component."""
        return [c.padded_support(padding) for c in self.components]


def fit(ds: LabeledDataset, factor: float = DEFAULT_BANDWIDTH_FACTOR,
        mode: str = DEFAULT_BANDWIDTH_MODE) -> ConditionalKde:
    """
    Fit one kernel density per label.

    Args:
        ds: Labeled dataset
        factor: Bandwidth multiplier
        mode: 'per_label' computes each bandwidth from that label's own values
            and count; 'pooled' uses one bandwidth from the whole sample

    Returns:
        ConditionalKde with label frequencies n_x / n

    Raises:
        InsufficientSampleError, ZeroVarianceError: A label (or, pooled, the
            whole sample) cannot carry a bandwidth; the message names the label
    """
    factor = _check_factor(factor)
    if mode not in BANDWIDTH_MODES:
        raise ConfigError(f"bandwidth mode must be one of {BANDWIDTH_MODES}, got {mode!r}")

    pooled = silverman_bandwidth(ds.values, factor) if mode == 'pooled' else None
    components = []
    for part, weight in zip(partition(ds), label_frequencies(ds)):
        if pooled is not None:
            bandwidth = pooled
        else:
            try:
                bandwidth = silverman_bandwidth(part.values, factor)
            except InsufficientSampleError as exc:
                raise InsufficientSampleError(f"label {part.token}: {exc}",
                                              label=part.token) from exc
            except ZeroVarianceError as exc:
                raise ZeroVarianceError(f"label {part.token}: {exc}",
                                        label=part.token) from exc
        components.append(KernelComponent(index=part.label, token=part.token,
                                          values=part.values, bandwidth=bandwidth,
                                          weight=weight))
        logger.debug("label %d: n_x=%d h=%.6g p=%.6g", part.token, part.count,
                     bandwidth.h, weight)

    return ConditionalKde(components=tuple(components), factor=factor, mode=mode)


def conditional_density(model: ConditionalKde, label: int, y: ArrayLike) -> ArrayLike:
    """Conditional density estimate mu_a(y | x) for a label token."""
    density = np.exp(model.component(label).log_density(y))
    return float(density) if np.ndim(y) == 0 else density


def marginal_density(model: ConditionalKde, y: ArrayLike) -> ArrayLike:
    """Mixture density phi_a(y) = sum_x p_a(x) mu_a(y | x)."""
    density = np.exp(model.log_marginal(y))
    return float(density) if np.ndim(y) == 0 else density


def conditional_mass(model: ConditionalKde, label: int,
                     spec: QuadratureSpec = QuadratureSpec()) -> float:
    """Quadrature of one fitted conditional density over its padded support."""
    comp = model.component(label)
    return integrate(lambda y: np.exp(comp.log_density(y)), [comp.padded_support()], spec=spec)


def kde_grid(model: ConditionalKde, grid: np.ndarray, dist=None) -> pd.DataFrame:
    """
    Tabulate fitted densities on a grid, one row per (y, label).

    Args:
        model: Fitted model
        grid: Evaluation points
        dist: Optional BenchmarkDistribution; adds the fitted joint
            p_a(x) mu_a(y|x) and the exact joint and marginal for comparison

    Returns:
        DataFrame with columns y, label, conditional, marginal (plus joint,
        true_joint, true_marginal when dist is given)
    """
    grid = np.asarray(grid, dtype=np.float64).ravel()
    log_comp = model.log_components(grid)
    marginal = np.exp(model.log_marginal(grid, log_comp))

    frames = []
    for comp, log_c in zip(model.components, log_comp):
        frame = pd.DataFrame({
            KDE_GRID_COLUMNS[0]: grid,
            KDE_GRID_COLUMNS[1]: comp.token,
            KDE_GRID_COLUMNS[2]: np.exp(log_c),
            KDE_GRID_COLUMNS[3]: marginal,
        })
        if dist is not None:
            frame['joint'] = comp.weight * frame[KDE_GRID_COLUMNS[2]]
            frame['true_joint'] = dist.joint_density(comp.token, grid)
            frame['true_marginal'] = dist.marginal_density(grid)
        frames.append(frame)

    table = pd.concat(frames, ignore_index=True)
    return table.sort_values([KDE_GRID_COLUMNS[0], KDE_GRID_COLUMNS[1]],
                             kind='stable').reset_index(drop=True)
