"""
Replicate sweeps: sample, estimate and aggregate against the exact oracle.

This module provides the parameter sweeps, the dataset-size study and the
three-row MI/significance table. Every dataset is drawn from its own seeded
stream, so a rerun with the same spec reproduces every number.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from distributions import (
    BenchmarkDistribution,
    exponential_pair,
    gaussian_pair,
    make_distribution,
    resolve_family,
    sample,
    uniform_pair,
)
from errors import ConfigError, EstimationError, ExperimentError
from mi import analytic_mi_quadrature, estimate_mi, label_entropy
from quadrature import QuadratureSpec
from rng import check_seed
from settings import (
    DEFAULT_BANDWIDTH_FACTOR,
    DEFAULT_NULL_MODEL,
    DEFAULT_PAIRS,
    DEFAULT_REPLICATES,
    DEFAULT_SEED,
    DEFAULT_SURROGATES,
    LABEL_WEIGHTS,
    MIN_SIZE_STUDY_PAIRS,
    PARAMETER_ALIASES,
    SIZE_STUDY_N_GRID,
    SIZE_STUDY_PARAMETER_SETS,
    STREAM_NULL,
    STREAM_SAMPLE,
    STREAM_TABLE1,
    SUMMARY_CSV_COLUMNS,
    SWEEP_FIXED_YM,
    SWEPT_PARAMETERS,
    TABLE1_GAUSSIAN,
    TABLE1_REFERENCE,
    TABLE1_UNIFORM_TARGET_MI,
    TABLE1_UNIFORM_WIDTH,
)
from significance import ordered_map, significance, surrogate_maker

logger = logging.getLogger(__name__)


def resolve_parameter(family: str, name: str) -> str:
    """Map a CLI spelling (ym, sigma, ...) to the canonical swept parameter."""
    canonical = PARAMETER_ALIASES.get(name, name)
    if canonical not in SWEPT_PARAMETERS[family]:
        raise ConfigError(
            f"{family} cannot sweep {name!r}; choose from {', '.join(SWEPT_PARAMETERS[family])}"
        )
    return canonical


@dataclass(frozen=True)
class SweepSpec:
    """
    One replicate sweep over a single parameter.

    Attributes:
        family: Benchmark family (aliases accepted)
        parameter: Swept parameter: y_m, sigma_g, a or n
        grid: Strictly increasing parameter values
        replicates: Datasets per grid point
        pairs: Pairs per dataset (ignored when sweeping n)
        seed: Base seed of every stream
        factor: Bandwidth multiplier
        fixed: Values of the non-swept family parameters
        null: Null model for the matched independent samples
        with_null: Whether to estimate the matched nulls at all
    """

    family: str
    parameter: str
    grid: Tuple[float, ...]
    replicates: int = DEFAULT_REPLICATES
    pairs: int = DEFAULT_PAIRS
    seed: int = DEFAULT_SEED
    factor: float = DEFAULT_BANDWIDTH_FACTOR
    fixed: Mapping[str, float] = field(default_factory=dict)
    null: str = DEFAULT_NULL_MODEL
    with_null: bool = True

    def __post_init__(self) -> None:
        family = resolve_family(self.family)
        object.__setattr__(self, 'family', family)
        object.__setattr__(self, 'parameter', resolve_parameter(family, self.parameter))
        object.__setattr__(self, 'fixed', {PARAMETER_ALIASES.get(k, k): float(v)
                                           for k, v in dict(self.fixed).items()})
        object.__setattr__(self, 'seed', check_seed(self.seed))
        surrogate_maker(self.null)

        grid = tuple(float(v) for v in self.grid)
        if not grid:
            raise ConfigError("grid must not be empty")
        if not all(math.isfinite(v) for v in grid):
            raise ConfigError("grid values must be finite")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("grid must be strictly increasing")
        object.__setattr__(self, 'grid', grid)

        if int(self.replicates) != self.replicates or self.replicates < 1:
            raise ConfigError(f"replicates must be a positive integer, got {self.replicates}")
        if int(self.pairs) != self.pairs or self.pairs < 2:
            raise ConfigError(f"pairs must be an integer >= 2, got {self.pairs}")
        if not (math.isfinite(self.factor) and self.factor > 0):
            raise ConfigError(f"bandwidth factor must be positive, got {self.factor}")
        if self.parameter in self.fixed:
            raise ConfigError(f"{self.parameter} is swept and cannot also be fixed")
        if self.parameter == 'n':
            for value in grid:
                if value != int(value) or value < MIN_SIZE_STUDY_PAIRS:
                    raise ConfigError(
                        f"dataset sizes must be integers >= {MIN_SIZE_STUDY_PAIRS}, got {value:g}"
                    )

        for value in grid:
            self.distribution(value)

    def distribution(self, value: float) -> BenchmarkDistribution:
        """The distribution at one grid value."""
        params = dict(self.fixed)
        if self.parameter != 'n':
            params[self.parameter] = value
        return make_distribution(self.family, **params)

    def pairs_at(self, value: float) -> int:
        """Dataset size at one grid value."""
        return int(value) if self.parameter == 'n' else int(self.pairs)

    def to_dict(self) -> Dict[str, Any]:
        """Echo of every field that determines the output."""
        return {
            'family': self.family,
            'parameter': self.parameter,
            'grid': list(self.grid),
            'replicates': self.replicates,
            'pairs': self.pairs,
            'seed': self.seed,
            'factor': self.factor,
            'fixed': dict(self.fixed),
            'null': self.null if self.with_null else None,
        }


@dataclass(frozen=True, eq=False)
class SweepResult:
    """
    Per-grid-point aggregates of a sweep.

    replicate_mi and null_mi hold every individual estimate, shape
    (grid points, replicates); null arrays are NaN when nulls were skipped.
    """

    spec: SweepSpec
    param: np.ndarray
    mean_mi: np.ndarray
    std_mi: np.ndarray
    analytic_mi: np.ndarray
    null_mean: np.ndarray
    null_std: np.ndarray
    replicate_mi: np.ndarray = field(repr=False)
    null_mi: np.ndarray = field(repr=False)

    @property
    def bias_z(self) -> np.ndarray:
        """(mean - analytic) / (std / sqrt(replicates)); NaN where std is 0."""
        stderr = self.std_mi / math.sqrt(self.spec.replicates)
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(stderr > 0, (self.mean_mi - self.analytic_mi) / stderr, np.nan)

    def to_frame(self) -> pd.DataFrame:
        """Summary table: param, mean_mi, std_mi, analytic_mi, null_mean, null_std, bias_z."""
        columns = (self.param, self.mean_mi, self.std_mi, self.analytic_mi,
                   self.null_mean, self.null_std)
        frame = pd.DataFrame(dict(zip(SUMMARY_CSV_COLUMNS, columns)))
        frame['bias_z'] = self.bias_z
        return frame

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready view with the spec echo and every replicate estimate."""
        summary = self.to_frame()
        frame = summary.astype(object).where(summary.notna(), None)
        return {
            'spec': self.spec.to_dict(),
            'rows': frame.to_dict(orient='records'),
            'replicate_mi': self.replicate_mi.tolist(),
            'null_mi': np.where(np.isnan(self.null_mi), None, self.null_mi).tolist(),
        }


def _mean_std(values: np.ndarray) -> Tuple[float, float]:
    if np.all(np.isnan(values)):
        return math.nan, math.nan
    std = float(np.std(values, ddof=1)) if values.size > 1 else 0.0
    return float(np.mean(values)), std


def run_sweep(spec: SweepSpec, workers: int = 1,
              quad: QuadratureSpec = QuadratureSpec()) -> SweepResult:
    """
    Estimate MI on `replicates` fresh datasets at every grid value.

    Dataset (g, r) is drawn from stream (STREAM_SAMPLE, g, r); its matched
    independent sample comes from (STREAM_NULL, g, r) through the spec's null
    model applied to that dataset.

    Args:
        spec: Sweep definition
        workers: Threads for replicate estimation
        quad: Quadrature settings of the exact oracle

    Returns:
        SweepResult aligned with spec.grid

    Raises:
        ExperimentError: An estimate failed; tagged with grid value and replicate
        QuadratureError: The oracle did not converge
    """
    maker = surrogate_maker(spec.null)
    dists = [spec.distribution(value) for value in spec.grid]

    def replicate(item: Tuple[int, int]) -> Tuple[float, float]:
        g, r = item
        value = spec.grid[g]
        try:
            ds = sample(dists[g], spec.pairs_at(value), spec.seed, (STREAM_SAMPLE, g, r))
            mi = estimate_mi(ds, spec.factor).mi_nats
            null = math.nan
            if spec.with_null:
                null = estimate_mi(maker(ds, spec.seed, (STREAM_NULL, g, r)), spec.factor).mi_nats
        except EstimationError as exc:
            raise ExperimentError(exc, value, r) from exc
        return mi, null

    items = [(g, r) for g in range(len(spec.grid)) for r in range(spec.replicates)]
    results = np.array(ordered_map(replicate, items, workers), dtype=np.float64)
    results = results.reshape(len(spec.grid), spec.replicates, 2)
    replicate_mi, null_mi = results[..., 0], results[..., 1]

    rows = []
    for g, (value, dist) in enumerate(zip(spec.grid, dists)):
        mean, std = _mean_std(replicate_mi[g])
        null_mean, null_std = _mean_std(null_mi[g])
        analytic = analytic_mi_quadrature(dist, quad)
        rows.append((mean, std, analytic, null_mean, null_std))
        logger.info("%s %s=%g: mean=%.6g std=%.3g analytic=%.6g", spec.family,
                    spec.parameter, value, mean, std, analytic)

    mean_mi, std_mi, analytic_mi, null_mean, null_std = (np.array(col) for col in zip(*rows))
    return SweepResult(spec=spec, param=np.array(spec.grid), mean_mi=mean_mi, std_mi=std_mi,
                       analytic_mi=analytic_mi, null_mean=null_mean, null_std=null_std,
                       replicate_mi=replicate_mi, null_mi=null_mi)


def run_size_study(spec: SweepSpec, workers: int = 1,
                   quad: QuadratureSpec = QuadratureSpec()) -> SweepResult:
    """
    Sweep dataset size at fixed distribution parameters.

    Raises:
        ConfigError: The spec does not sweep n
    """
    if spec.parameter != 'n':
        raise ConfigError(f"a size study sweeps n, not {spec.parameter}")
    return run_sweep(spec, workers, quad)


def size_study_specs(grid: Sequence[int] = SIZE_STUDY_N_GRID,
                     parameter_sets: Sequence[Mapping[str, float]] = SIZE_STUDY_PARAMETER_SETS,
                     replicates: int = DEFAULT_REPLICATES, seed: int = DEFAULT_SEED,
                     factor: float = DEFAULT_BANDWIDTH_FACTOR,
                     with_null: bool = True) -> List[SweepSpec]:
    """One Gaussian n-sweep per parameter set."""
    return [
        SweepSpec(family='gaussian_pair', parameter='n', grid=tuple(grid),
                  replicates=replicates, seed=seed, factor=factor, fixed=dict(params),
                  with_null=with_null)
        for params in parameter_sets
    ]


def run_size_studies(specs: Sequence[SweepSpec], workers: int = 1,
                     quad: QuadratureSpec = QuadratureSpec()) -> pd.DataFrame:
    """Run several size studies and stack them, the fixed parameters leading each row."""
    frames = []
    for spec in specs:
        frame = run_size_study(spec, workers, quad).to_frame()
        for position, (name, value) in enumerate(sorted(spec.fixed.items())):
            frame.insert(position, name, value)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def find_uniform_offset(target: float = TABLE1_UNIFORM_TARGET_MI,
                        a: float = TABLE1_UNIFORM_WIDTH,
                        quad: QuadratureSpec = QuadratureSpec()) -> float:
    """
    Offset y_m >= 0 at which the uniform pair has exact MI equal to target.

    The root is bracketed between y_m = 0 and the offset where the supports
    separate and MI saturates at H(X).

    Raises:
        ConfigError: Target unreachable for this width
    """
    saturation = label_entropy(LABEL_WEIGHTS)

    def gap(y_m: float) -> float:
        return analytic_mi_quadrature(uniform_pair(y_m, a), quad) - target

    upper = 0.5 * (1.0 + a)
    if not 0 < target < saturation or gap(0.0) > 0:
        raise ConfigError(f"uniform pair with a={a:g} cannot reach MI {target:g}")
    return float(brentq(gap, 0.0, upper, xtol=1e-12, rtol=1e-12))


def table1_distributions(quad: QuadratureSpec = QuadratureSpec()
                         ) -> List[BenchmarkDistribution]:
    """The three table rows: separated Gaussians, calibrated uniforms, exponentials."""
    offset = find_uniform_offset(quad=quad)
    return [
        gaussian_pair(**TABLE1_GAUSSIAN),
        uniform_pair(y_m=offset, a=TABLE1_UNIFORM_WIDTH),
        exponential_pair(),
    ]


def run_table1(seed: int = DEFAULT_SEED, surrogates: int = DEFAULT_SURROGATES,
               pairs: int = DEFAULT_PAIRS, factor: float = DEFAULT_BANDWIDTH_FACTOR,
               workers: int = 1, null: str = DEFAULT_NULL_MODEL,
               quad: QuadratureSpec = QuadratureSpec()) -> pd.DataFrame:
    """
    One dataset per benchmark family with its MI and surrogate significance.

    Row r samples from stream (STREAM_TABLE1, r) and draws its surrogates
    under the prefix (r,). The Gaussian and uniform parameters are
    reconstructions; they are listed in the `params` column and in
    frame.attrs['metadata'].

    Returns:
        DataFrame with columns distribution, params, mi, analytic_mi,
        reference_mi, null_mean, null_std, z
    """
    seed = check_seed(seed)
    rows = []
    for r, dist in enumerate(table1_distributions(quad)):
        ds = sample(dist, pairs, seed, (STREAM_TABLE1, r))
        report = significance(ds, surrogates, seed, factor, null=null, workers=workers,
                              stream_prefix=(r,))
        rows.append({
            'distribution': dist.family,
            'params': ' '.join(f"{k}={v:.12g}" for k, v in dist.params.items()),
            'mi': report.observed_mi,
            'analytic_mi': analytic_mi_quadrature(dist, quad),
            'reference_mi': TABLE1_REFERENCE[dist.family],
            'null_mean': report.surrogate_mean,
            'null_std': report.surrogate_std,
            'z': report.z_score,
        })
        logger.info("table row %s: mi=%.6g z=%.3g", dist.family, report.observed_mi,
                    report.z_score)

    table = pd.DataFrame(rows)
    table.attrs['metadata'] = {
        'seed': seed,
        'factor': factor,
        'pairs': pairs,
        'surrogates': surrogates,
        'null': null,
        'uniform_offset_target_mi': TABLE1_UNIFORM_TARGET_MI,
        'reconstructed': 'gaussian_pair and uniform_pair parameters',
    }
    return table


def default_fixed(family: str, parameter: str,
                  given: Optional[Mapping[str, float]] = None) -> Dict[str, float]:
    """
    Fixed parameters for a one-parameter sweep.

    Sweeps of sigma_g or a hold y_m at 1 unless the caller fixes it.
    """
    fixed = {PARAMETER_ALIASES.get(k, k): v for k, v in dict(given or {}).items()}
    if parameter in ('sigma_g', 'a') and 'y_m' not in fixed:
        fixed['y_m'] = SWEEP_FIXED_YM
    return fixed
