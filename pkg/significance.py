"""
Surrogate significance testing for an observed MI estimate.

A surrogate keeps the label frequencies and the overall mean and spread of
the values but breaks any dependence between them. The spread of MI over an
ensemble of surrogates is the yardstick an observed estimate is compared to.
"""

import concurrent.futures
import logging
import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from dataset import LabeledDataset, label_frequencies
from errors import ConfigError, InsufficientSampleError, SurrogateError, ZeroVarianceError
from mi import estimate_mi
from rng import stream
from settings import (
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_BANDWIDTH_MODE,
    DEFAULT_NULL_MODEL,
    DEFAULT_SEED,
    DEFAULT_SURROGATES,
    NULL_MODELS,
    STREAM_SURROGATE,
)

logger = logging.getLogger(__name__)

T = TypeVar('T')
R = TypeVar('R')


def ordered_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Apply func to every item, optionally on a thread pool.

    Results come back in input order whatever the scheduling, so reductions
    over them are reproducible.
    """
    if workers < 1:
        raise ConfigError(f"workers must be at least 1, got {workers}")
    if workers == 1:
        return [func(item) for item in items]
    with concurrent.futures.ThreadPoolExecutor(workers, thread_name_prefix='dcmi') as executor:
        return list(executor.map(func, items))


def make_surrogate(ds: LabeledDataset, seed: int,
                   key: Optional[Sequence[int]] = None) -> LabeledDataset:
    """
    Draw an independent surrogate of a dataset.

    Labels are drawn i.i.d. from the empirical frequencies n_x / n; values
    are drawn i.i.d. from one Gaussian with the overall sample mean and
    standard deviation (divisor n - 1), regardless of the label.

    Args:
        ds: Original dataset
        seed: Base seed
        key: Stream key; defaults to (STREAM_SURROGATE, 0)

    Returns:
        Dataset of the same size and tokens (a rare label may be absent)

    Raises:
        ZeroVarianceError: All values identical or a single pair
    """
    if ds.n < 2 or ds.values.max() == ds.values.min():
        raise ZeroVarianceError("zero variance: cannot fit the surrogate Gaussian")
    rng = stream(seed, *(key if key is not None else (STREAM_SURROGATE, 0)))

    cumulative = np.cumsum(label_frequencies(ds))[:-1]
    index = np.searchsorted(cumulative, rng.random(ds.n), side='right')
    mean = float(np.mean(ds.values))
    std = float(np.std(ds.values, ddof=1))
    values = mean + std * rng.standard_normal(ds.n)

    tokens = np.asarray(ds.tokens)[index]
    return LabeledDataset.from_pairs(tokens, values)


def make_permutation_surrogate(ds: LabeledDataset, seed: int,
                               key: Optional[Sequence[int]] = None) -> LabeledDataset:
    """Shuffle labels against values; label counts and the value set stay exact."""
    rng = stream(seed, *(key if key is not None else (STREAM_SURROGATE, 0)))
    return LabeledDataset(labels=rng.permutation(ds.labels), values=ds.values,
                          tokens=ds.tokens)


SURROGATE_MAKERS: Dict[str, Callable[..., LabeledDataset]] = {
    'gaussian': make_surrogate,
    'permutation': make_permutation_surrogate,
}


def surrogate_maker(null: str) -> Callable[..., LabeledDataset]:
    """Look up the surrogate generator for a null model name."""
    if null not in NULL_MODELS:
        raise ConfigError(f"null model must be one of {NULL_MODELS}, got {null!r}")
    return SURROGATE_MAKERS[null]


def z_score(observed: float, mean: float, std: float) -> float:
    """(observed - mean) / std; infinite with the sign of the gap when std is 0."""
    if std > 0:
        return (observed - mean) / std
    if observed == mean:
        return 0.0
    return math.copysign(math.inf, observed - mean)


@dataclass(frozen=True)
class SignificanceReport:
    """Observed MI against its surrogate ensemble."""

    observed_mi: float
    surrogate_mean: float
    surrogate_std: float
    surrogate_count: int
    z_score: float
    surrogate_values: Tuple[float, ...]
    seed: int = DEFAULT_SEED
    factor: float = DEFAULT_BANDWIDTH_FACTOR
    null: str = DEFAULT_NULL_MODEL

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view."""
        return {
            'observed_mi': self.observed_mi,
            'null_mean': self.surrogate_mean,
            'null_std': self.surrogate_std,
            'z': self.z_score,
            'surrogates': list(self.surrogate_values),
            'surrogate_count': self.surrogate_count,
            'seed': self.seed,
            'factor': self.factor,
            'null': self.null,
        }


def significance(ds: LabeledDataset, surrogates: int = DEFAULT_SURROGATES,
                 seed: int = DEFAULT_SEED, factor: float = DEFAULT_BANDWIDTH_FACTOR,
                 null: str = DEFAULT_NULL_MODEL, workers: int = 1,
                 mode: str = DEFAULT_BANDWIDTH_MODE,
                 stream_prefix: Sequence[int] = ()) -> SignificanceReport:
    """
    Compare the MI of a dataset with the MI of independent surrogates.

    Surrogate i is drawn from stream (STREAM_SURROGATE, *stream_prefix, i) and
    estimated with the same bandwidth factor and mode as the observation.

    Args:
        ds: Observed dataset
        surrogates: Ensemble size (>= 2)
        seed: Base seed
        factor: Bandwidth multiplier
        null: 'gaussian' (fitted Gaussian values) or 'permutation'
        workers: Threads for surrogate estimation
        mode: Bandwidth mode
        stream_prefix: Extra key words that keep several reports under one
            base seed on disjoint streams

    Returns:
        SignificanceReport; std uses divisor count - 1

    Raises:
        ConfigError: Fewer than two surrogates or unknown null model
        SurrogateError: A surrogate could not be estimated, typically because
            the Gaussian null drew fewer than two pairs for a rare label; the
            permutation null keeps label counts and avoids this
    """
    if int(surrogates) != surrogates or surrogates < 2:
        raise ConfigError(f"insufficient surrogates: {surrogates} (need at least 2)")
    surrogates = int(surrogates)
    maker = surrogate_maker(null)
    prefix = tuple(int(k) for k in stream_prefix)

    observed = estimate_mi(ds, factor, mode).mi_nats

    def surrogate_mi(i: int) -> float:
        surrogate = maker(ds, seed, (STREAM_SURROGATE, *prefix, i))
        try:
            return estimate_mi(surrogate, factor, mode).mi_nats
        except (InsufficientSampleError, ZeroVarianceError) as exc:
            raise SurrogateError(exc, i) from exc

    values = ordered_map(surrogate_mi, range(surrogates), workers)
    mean = float(np.mean(values))
    std = float(np.std(values, ddof=1))
    report = SignificanceReport(
        observed_mi=observed,
        surrogate_mean=mean,
        surrogate_std=std,
        surrogate_count=surrogates,
        z_score=z_score(observed, mean, std),
        surrogate_values=tuple(values),
        seed=seed,
        factor=factor,
        null=null,
    )
    logger.info("significance: observed=%.6g null=%.4g+-%.4g z=%.3g (%s, %d surrogates)",
                observed, mean, std, report.z_score, null, surrogates)
    return report
