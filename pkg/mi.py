"""
Mutual information between a discrete label and a continuous value.

This module provides the sample-average estimator built on the per-label
kernel densities, the weighted Jensen-Shannon cross-check computed by
quadrature of differential entropies, and the exact-density oracles used to
judge both.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence, Tuple

import numpy as np

from dataset import LabeledDataset, label_frequencies
from distributions import BenchmarkDistribution
from kde import ConditionalKde, fit
from quadrature import (
    QuadratureSpec,
    check_covers,
    dense_trapezoid,
    integrate,
)
from settings import (
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_BANDWIDTH_MODE,
    DENSE_TRAPEZOID_POINTS,
    QUADRATURE,
)

logger = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray], np.ndarray]


@dataclass(frozen=True)
class MiEstimate:
    """
    Result of estimate_mi.

    Attributes:
        mi_nats: Estimated mutual information in nats (may be slightly negative)
        per_label_terms: Token -> (1/n) sum over that label's points of
            ln(mu_x(y) / phi(y)); the terms sum to mi_nats
        n: Sample size
        label_entropy: H(p_a) in nats, an upper bound on mi_nats
        factor: Bandwidth multiplier used
        bandwidths: Token -> kernel width
        mode: Bandwidth mode
    """

    mi_nats: float
    per_label_terms: Dict[int, float]
    n: int
    label_entropy: float
    factor: float = DEFAULT_BANDWIDTH_FACTOR
    bandwidths: Dict[int, float] = field(default_factory=dict)
    mode: str = DEFAULT_BANDWIDTH_MODE

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view; label keys become strings."""
        return {
            'mi_nats': self.mi_nats,
            'n': self.n,
            'label_entropy': self.label_entropy,
            'per_label_terms': {str(k): v for k, v in self.per_label_terms.items()},
            'factor': self.factor,
            'mode': self.mode,
            'bandwidths': {str(k): v for k, v in self.bandwidths.items()},
        }


@dataclass(frozen=True)
class JsdEstimate:
    """Weighted Jensen-Shannon divergence of the fitted conditionals."""

    jsd_nats: float
    mixture_entropy: float
    component_entropies: Dict[int, float]
    weights: Dict[int, float]

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view; label keys become strings."""
        return {
            'jsd_nats': self.jsd_nats,
            'mixture_entropy': self.mixture_entropy,
            'component_entropies': {str(k): v for k, v in self.component_entropies.items()},
            'weights': {str(k): v for k, v in self.weights.items()},
        }


def label_entropy(weights: Sequence[float]) -> float:
    """Shannon entropy -sum p ln p of a label distribution, in nats."""
    return -math.fsum(p * math.log(p) for p in weights if p > 0)


def estimate_mi(ds: LabeledDataset, factor: float = DEFAULT_BANDWIDTH_FACTOR,
                mode: str = DEFAULT_BANDWIDTH_MODE) -> MiEstimate:
    """
    Estimate I(X, Y) by averaging log density ratios over the sample.

    Each point contributes ln mu_x(y_j) - ln phi(y_j) for its own label x,
    with the mixture in the denominator formed by log-sum-exp over the same
    log conditionals. The per-point log ratio is therefore at most
    -ln p_a(x) and the estimate never exceeds H(p_a).

    Args:
        ds: Labeled dataset; every label needs two distinct values
        factor: Bandwidth multiplier
        mode: 'per_label' or 'pooled' bandwidths

    Returns:
        MiEstimate in nats, not clamped at zero

    Raises:
        InsufficientSampleError, ZeroVarianceError: From fitting
    """
    model = fit(ds, factor, mode)
    n = ds.n

    terms: Dict[int, float] = {}
    for comp in model.components:
        log_comp = model.log_components(comp.values)
        log_ratio = log_comp[comp.index] - model.log_marginal(comp.values, log_comp)
        terms[comp.token] = math.fsum(log_ratio.tolist()) / n

    mi_nats = math.fsum(terms.values())
    estimate = MiEstimate(
        mi_nats=mi_nats,
        per_label_terms=terms,
        n=n,
        label_entropy=label_entropy(label_frequencies(ds)),
        factor=model.factor,
        bandwidths={c.token: c.bandwidth.h for c in model.components},
        mode=model.mode,
    )
    logger.debug("estimate_mi: n=%d K=%d mi=%.6g nats", n, ds.num_labels, mi_nats)
    return estimate


def _entropy_integrand(log_density: Integrand) -> Integrand:
    """Build y -> -f(y) ln f(y) from a log density; zero where f vanishes."""

    def integrand(y: np.ndarray) -> np.ndarray:
        log_f = log_density(y)
        with np.errstate(invalid='ignore'):
            return np.where(np.isfinite(log_f), -np.exp(log_f) * log_f, 0.0)

    return integrand


def estimate_jsd(model: ConditionalKde, quad: QuadratureSpec = QuadratureSpec()) -> JsdEstimate:
    """
    Weighted JSD of the fitted conditionals with weights p_a(x).

    Computes H[phi] - sum_x p_a(x) H[mu_x], each differential entropy by
    adaptive quadrature of -f ln f over padded supports.

    Args:
        model: Fitted model
        quad: Quadrature settings; an explicit interval must cover every
            padded support

    Returns:
        JsdEstimate; exactly zero for a single-label model

    Raises:
        QuadratureError: Tolerance not met within the evaluation budget
        ConfigError: quad.interval does not cover the supports
    """
    supports = check_covers(quad, model.supports())

    entropies: Dict[int, float] = {}
    for comp, support in zip(model.components, supports):
        entropies[comp.token] = integrate(_entropy_integrand(comp.log_density), [support],
                                          spec=quad)

    weights = {c.token: c.weight for c in model.components}
    if len(model.components) == 1:
        mixture = next(iter(entropies.values()))
    else:
        mixture = integrate(_entropy_integrand(model.log_marginal), supports, spec=quad)

    jsd = mixture - math.fsum(weights[t] * h for t, h in entropies.items())
    return JsdEstimate(jsd_nats=jsd, mixture_entropy=mixture,
                       component_entropies=entropies, weights=weights)


def _mi_integrands(dist: BenchmarkDistribution
                   ) -> List[Tuple[Integrand, Tuple[float, float]]]:
    """One integrand p(x) mu(y|x) ln(mu(y|x) / phi(y)) per label with its support."""
    parts = []
    for index, weight in enumerate(dist.weights):

        def integrand(y: np.ndarray, index: int = index, weight: float = weight) -> np.ndarray:
            log_c = dist.log_conditional(index, y)
            with np.errstate(invalid='ignore'):
                value = weight * np.exp(log_c) * (log_c - dist.log_marginal(y))
            return np.where(np.isfinite(log_c), value, 0.0)

        parts.append((integrand, dist.support(index)))
    return parts


def analytic_mi_quadrature(dist: BenchmarkDistribution,
                           quad: QuadratureSpec = QuadratureSpec()) -> float:
    """
    Exact mutual information of a benchmark distribution by adaptive quadrature.

    Integrates sum_x p(x) mu(y|x) ln(mu(y|x)/phi(y)) against the exact
    densities, piece by piece between the density breakpoints.

    Args:
        dist: Benchmark distribution
        quad: Quadrature settings

    Returns:
        I(X, Y) in nats

    Raises:
        QuadratureError: Tolerance not met within the evaluation budget
    """
    check_covers(quad, dist.supports())
    breakpoints = dist.breakpoints()
    return math.fsum(integrate(func, [support], breakpoints, spec=quad)
                     for func, support in _mi_integrands(dist))


def analytic_mi_trapezoid(dist: BenchmarkDistribution,
                          points: int = DENSE_TRAPEZOID_POINTS,
                          edge_inset: float = QUADRATURE['edge_inset']) -> float:
    """The same integral as analytic_mi_quadrature on a dense trapezoid grid."""
    breakpoints = dist.breakpoints()
    return math.fsum(dense_trapezoid(func, [support], breakpoints, points, edge_inset)
                     for func, support in _mi_integrands(dist))


def analytic_jsd_quadrature(dist: BenchmarkDistribution,
                            quad: QuadratureSpec = QuadratureSpec()) -> float:
    """
    Weighted JSD of the exact conditionals, H[phi] - sum_x p(x) H[mu_x].

    With weights equal to the label marginals this equals the mutual
    information, which makes it an independent route to the same number.
    """
    supports = check_covers(quad, dist.supports())
    breakpoints = dist.breakpoints()

    mixture = integrate(_entropy_integrand(dist.log_marginal), supports, breakpoints, quad)
    components = [
        integrate(_entropy_integrand(lambda y, i=index: dist.log_conditional(i, y)),
                  [supports[index]], breakpoints, quad)
        for index in range(len(dist.weights))
    ]
    return mixture - math.fsum(w * h for w, h in zip(dist.weights, components))
