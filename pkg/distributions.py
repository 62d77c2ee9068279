"""
Benchmark joint distributions with known densities.

This module provides the three two-label families used to test the
estimator: a Gaussian pair, a uniform pair and an exponential pair, all with
label weights (1/3, 2/3). Each supports exact density evaluation and seeded
sampling.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats
from scipy.special import logsumexp

from dataset import LabeledDataset
from errors import ConfigError
from rng import stream
from settings import (
    EXPONENTIAL_SUPPORT_SCALES,
    FAMILIES,
    FAMILY_ALIASES,
    FAMILY_DEFAULTS,
    GAUSSIAN_SUPPORT_SIGMAS,
    LABEL_TOKENS,
    LABEL_WEIGHTS,
    STREAM_SAMPLE,
)

logger = logging.getLogger(__name__)


def resolve_family(family: str) -> str:
    """Map a family name or its short alias to the canonical family name."""
    name = FAMILY_ALIASES.get(family, family)
    if name not in FAMILIES:
        raise ConfigError(f"unknown distribution family {family!r}")
    return name


@dataclass(frozen=True)
class BenchmarkDistribution:
    """
    Two-label joint distribution mu(x, y) with exact densities.

    gaussian_pair: label 1 ~ N(0, 1), label 2 ~ N(y_m, sigma_g^2).
    uniform_pair: label 1 ~ U(-1/2, 1/2), label 2 ~ U(-y_m - a/2, -y_m + a/2);
        the second component is centred at -y_m exactly as its step-function
        definition reads.
    exponential_pair: label 1 ~ Exp(rate 1), label 2 ~ Exp(rate 1/2).

    Labels are the tokens 1 and 2; index 0 and 1 address the same components.
    """

    family: str
    y_m: float = 0.0
    sigma_g: float = 1.0
    a: float = 1.0
    weights: Tuple[float, float] = LABEL_WEIGHTS

    def __post_init__(self) -> None:
        object.__setattr__(self, 'family', resolve_family(self.family))
        for name in ('y_m', 'sigma_g', 'a'):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.sigma_g <= 0:
            raise ConfigError(f"sigma_g must be positive, got {self.sigma_g}")
        if self.a <= 0:
            raise ConfigError(f"a must be positive, got {self.a}")
        if len(self.weights) != 2 or min(self.weights) <= 0 or \
                not math.isclose(sum(self.weights), 1.0, rel_tol=0, abs_tol=1e-12):
            raise ConfigError(
                f"weights must be two positive numbers summing to 1, got {self.weights}"
            )

    @property
    def params(self) -> Dict[str, float]:
        """The free parameters of this family."""
        return {name: getattr(self, name) for name in FAMILY_DEFAULTS[self.family]}

    @property
    def tokens(self) -> Tuple[int, int]:
        """Label tokens in index order."""
        return LABEL_TOKENS

    @cached_property
    def components(self) -> Tuple[stats.rv_continuous, ...]:
        """Frozen scipy distributions of the two conditionals."""
        if self.family == 'gaussian_pair':
            return stats.norm(loc=0.0, scale=1.0), stats.norm(loc=self.y_m, scale=self.sigma_g)
        if self.family == 'uniform_pair':
            return (stats.uniform(loc=-0.5, scale=1.0),
                    stats.uniform(loc=-self.y_m - 0.5 * self.a, scale=self.a))
        return stats.expon(scale=1.0), stats.expon(scale=2.0)

    def index_of(self, label: int) -> int:
        """
        Map a label token (1 or 2) to its component index.

        Raises:
            ConfigError: Any other label
        """
        if label not in LABEL_TOKENS:
            raise ConfigError(f"invalid label {label}; expected one of {LABEL_TOKENS}")
        return LABEL_TOKENS.index(label)

    def log_conditional(self, index: int, y: np.ndarray) -> np.ndarray:
        """Log of mu(y | x) for component index 0 or 1."""
        return self.components[index].logpdf(y)

    def conditional_density(self, label: int, y: np.ndarray) -> np.ndarray:
        """Exact conditional density mu(y | x) for a label token."""
        return self.components[self.index_of(label)].pdf(y)

    def joint_density(self, label: int, y: np.ndarray) -> np.ndarray:
        """Exact joint density mu(x, y) = p(x) mu(y | x) for a label token."""
        index = self.index_of(label)
        return self.weights[index] * self.components[index].pdf(y)

    def log_marginal(self, y: np.ndarray) -> np.ndarray:
        """Log of phi(y) = sum_x mu(x, y); -inf outside both supports."""
        log_terms = np.stack([math.log(w) + self.log_conditional(i, y)
                              for i, w in enumerate(self.weights)])
        with np.errstate(divide='ignore'):
            return logsumexp(log_terms, axis=0)

    def marginal_density(self, y: np.ndarray) -> np.ndarray:
        """Exact marginal density phi(y)."""
        return sum(w * comp.pdf(y) for w, comp in zip(self.weights, self.components))

    def cdf(self, index: int, y: np.ndarray) -> np.ndarray:
        """Conditional CDF of component index 0 or 1."""
        return self.components[index].cdf(y)

    def support(self, index: int) -> Tuple[float, float]:
        """
        Integration interval of one conditional.

        Gaussians extend GAUSSIAN_SUPPORT_SIGMAS deviations around the mean,
        uniforms use their exact support, exponentials [0, 50 * scale].
        """
        comp = self.components[index]
        if self.family == 'gaussian_pair':
            mean, std = comp.mean(), comp.std()
            return mean - GAUSSIAN_SUPPORT_SIGMAS * std, mean + GAUSSIAN_SUPPORT_SIGMAS * std
        if self.family == 'uniform_pair':
            lo, hi = comp.support()
            return float(lo), float(hi)
        return 0.0, EXPONENTIAL_SUPPORT_SCALES * float(comp.mean())

    def supports(self) -> List[Tuple[float, float]]:
        """Integration intervals of both conditionals."""
        return [self.support(i) for i in range(len(self.weights))]

    def breakpoints(self) -> List[float]:
        """Points where a conditional density jumps."""
        if self.family == 'uniform_pair':
            return sorted({edge for lo_hi in self.supports() for edge in lo_hi})
        if self.family == 'exponential_pair':
            return [0.0]
        return []


def gaussian_pair(y_m: float = FAMILY_DEFAULTS['gaussian_pair']['y_m'],
                  sigma_g: float = FAMILY_DEFAULTS['gaussian_pair']['sigma_g']
                  ) -> BenchmarkDistribution:
    """Gaussian pair: N(0, 1) with weight 1/3 against N(y_m, sigma_g^2) with weight 2/3."""
    return BenchmarkDistribution('gaussian_pair', y_m=float(y_m), sigma_g=float(sigma_g))


def uniform_pair(y_m: float = FAMILY_DEFAULTS['uniform_pair']['y_m'],
                 a: float = FAMILY_DEFAULTS['uniform_pair']['a']) -> BenchmarkDistribution:
    """Uniform pair: U(-1/2, 1/2) against a width-a uniform centred at -y_m."""
    return BenchmarkDistribution('uniform_pair', y_m=float(y_m), a=float(a))


def exponential_pair(**overrides: float) -> BenchmarkDistribution:
    """
    Exponential pair with rates 1 and 1/2.

    Raises:
        ConfigError: Any parameter is passed; the family has none
    """
    if overrides:
        raise ConfigError(f"exponential_pair takes no parameters, got {sorted(overrides)}")
    return BenchmarkDistribution('exponential_pair')


def make_distribution(family: str, **params: float) -> BenchmarkDistribution:
    """
    Build a benchmark distribution by family name.

    Args:
        family: 'gaussian_pair', 'uniform_pair', 'exponential_pair' or the
            short aliases 'gaussian', 'uniform', 'exponential'
        **params: Family parameters (y_m, sigma_g, a); missing ones take the
            family defaults

    Raises:
        ConfigError: Unknown family or a parameter the family does not have
    """
    family = resolve_family(family)
    unknown = set(params) - set(FAMILY_DEFAULTS[family])
    if unknown:
        raise ConfigError(f"{family} has no parameter(s) {sorted(unknown)}")
    if family == 'gaussian_pair':
        return gaussian_pair(**params)
    if family == 'uniform_pair':
        return uniform_pair(**params)
    return exponential_pair(**params)


def sample(dist: BenchmarkDistribution, n: int, seed: int,
           key: Optional[Sequence[int]] = None) -> LabeledDataset:
    """
    Draw n i.i.d. labeled pairs.

    Labels are drawn first (n uniforms against the cumulative weights), then
    values: a standard normal transform for Gaussians and the inverse CDF for
    uniforms and exponentials.

    Args:
        dist: Distribution to sample
        n: Number of pairs (>= 1)
        seed: Base seed
        key: Stream key; defaults to (STREAM_SAMPLE,)

    Returns:
        LabeledDataset with tokens 1 and 2 (a token absent from a tiny sample
        is absent from the dataset)
    """
    if int(n) != n or n < 1:
        raise ConfigError(f"sample size must be a positive integer, got {n}")
    n = int(n)
    rng = stream(seed, *(key if key is not None else (STREAM_SAMPLE,)))

    cumulative = np.cumsum(dist.weights)[:-1]
    index = np.searchsorted(cumulative, rng.random(n), side='right')

    if dist.family == 'gaussian_pair':
        loc = np.array([c.mean() for c in dist.components])
        scale = np.array([c.std() for c in dist.components])
        values = loc[index] + scale[index] * rng.standard_normal(n)
    else:
        u = rng.random(n)
        values = np.empty(n)
        for i, comp in enumerate(dist.components):
            mask = index == i
            values[mask] = comp.ppf(u[mask])

    tokens = np.asarray(LABEL_TOKENS)[index]
    return LabeledDataset.from_pairs(tokens, values)
