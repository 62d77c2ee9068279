"""
Settings and configuration constants for the dcmi estimator.

This module contains all the configuration including estimator defaults,
quadrature tolerances, benchmark distribution presets, experiment grids,
random stream namespaces and CLI exit codes.
"""

from typing import Dict, Any, Tuple

# Estimator defaults
DEFAULT_BANDWIDTH_FACTOR: float = 1.06
DEFAULT_BANDWIDTH_MODE: str = 'per_label'
BANDWIDTH_MODES: Tuple[str, ...] = ('per_label', 'pooled')
KDE_SUPPORT_PADDING: float = 8.0  # Padded support is [min - 8h, max + 8h]
KDE_EVAL_CELLS: int = 2**22  # Kernel terms per vectorised block (query points x sample)

# Sampling and significance defaults
DEFAULT_SEED: int = 0
MAX_SEED: int = 2**64 - 1
DEFAULT_PAIRS: int = 1000
DEFAULT_SURROGATES: int = 100
DEFAULT_REPLICATES: int = 100
DEFAULT_WORKERS: int = 1
NULL_MODELS: Tuple[str, ...] = ('gaussian', 'permutation')
DEFAULT_NULL_MODEL: str = 'gaussian'

# Random stream namespaces (first word of every SeedSequence spawn key)
STREAM_SAMPLE: int = 0
STREAM_SURROGATE: int = 1
STREAM_NULL: int = 2
STREAM_TABLE1: int = 3

# Quadrature defaults
QUADRATURE: Dict[str, Any] = {
    'rel_tol': 1e-9,
    'abs_tol': 1e-12,
    'initial_panels': 16,
    'max_evaluations': 2_000_000,
    'edge_inset': 1e-9,  # Fraction of a piece width; endpoints are evaluated inside
}
DENSE_TRAPEZOID_POINTS: int = 400_001  # Per piece
GAUSSIAN_SUPPORT_SIGMAS: float = 10.0
EXPONENTIAL_SUPPORT_SCALES: float = 50.0

# Benchmark families. Weights are (1/3, 2/3) for every family.
FAMILIES: Tuple[str, ...] = ('gaussian_pair', 'uniform_pair', 'exponential_pair')
FAMILY_ALIASES: Dict[str, str] = {
    'gaussian': 'gaussian_pair',
    'uniform': 'uniform_pair',
    'exponential': 'exponential_pair',
}
LABEL_WEIGHTS: Tuple[float, float] = (1.0 / 3.0, 2.0 / 3.0)
LABEL_TOKENS: Tuple[int, int] = (1, 2)

GAUSSIAN_PAIR: Dict[str, float] = {
    'y_m': 1.0,
    'sigma_g': 1.0,
}

UNIFORM_PAIR: Dict[str, float] = {
    'y_m': 0.0,
    'a': 1.0,
}

EXPONENTIAL_PAIR: Dict[str, float] = {}  # Rates 1 and 1/2 are fixed

FAMILY_DEFAULTS: Dict[str, Dict[str, float]] = {
    'gaussian_pair': GAUSSIAN_PAIR,
    'uniform_pair': UNIFORM_PAIR,
    'exponential_pair': EXPONENTIAL_PAIR,
}

# CLI spellings of swept parameters
PARAMETER_ALIASES: Dict[str, str] = {
    'ym': 'y_m',
    'y_m': 'y_m',
    'sigma': 'sigma_g',
    'sigma_g': 'sigma_g',
    'sigmag': 'sigma_g',
    'a': 'a',
    'n': 'n',
}
SWEPT_PARAMETERS: Dict[str, Tuple[str, ...]] = {
    'gaussian_pair': ('y_m', 'sigma_g', 'n'),
    'uniform_pair': ('y_m', 'a', 'n'),
    'exponential_pair': ('n',),
}

# Default sweep grids
YM_SWEEP_GRID: Tuple[float, ...] = tuple(0.25 * i for i in range(21))  # 0 .. 5
SIGMA_SWEEP_GRID: Tuple[float, ...] = tuple(0.25 * i for i in range(1, 17))  # .25 .. 4
WIDTH_SWEEP_GRID: Tuple[float, ...] = tuple(0.25 * i for i in range(1, 17))
SWEEP_FIXED_YM: float = 1.0
SIZE_STUDY_N_GRID: Tuple[int, ...] = (100, 250, 500, 1000, 2000, 5000)
SIZE_STUDY_PARAMETER_SETS: Tuple[Dict[str, float], ...] = (
    {'y_m': 1.0, 'sigma_g': 1.0},
    {'y_m': 2.0, 'sigma_g': 1.0},
    {'y_m': 5.0, 'sigma_g': 1.0},
)
MIN_SIZE_STUDY_PAIRS: int = 50
DEFAULT_SWEEP_GRIDS: Dict[str, Tuple[float, ...]] = {
    'y_m': YM_SWEEP_GRID,
    'sigma_g': SIGMA_SWEEP_GRID,
    'a': WIDTH_SWEEP_GRID,
    'n': tuple(float(n) for n in SIZE_STUDY_N_GRID),
}

# Three-row significance table. The Gaussian and uniform parameters are reconstructions.
TABLE1_GAUSSIAN: Dict[str, float] = {'y_m': 5.0, 'sigma_g': 1.0}
TABLE1_UNIFORM_WIDTH: float = 1.0
TABLE1_UNIFORM_TARGET_MI: float = 0.1429
TABLE1_REFERENCE: Dict[str, float] = {
    'gaussian_pair': 0.6359,
    'uniform_pair': 0.1429,
    'exponential_pair': 0.0718,
}

# Output formats
SUMMARY_CSV_COLUMNS: Tuple[str, ...] = (
    'param', 'mean_mi', 'std_mi', 'analytic_mi', 'null_mean', 'null_std',
)
KDE_GRID_COLUMNS: Tuple[str, ...] = ('y', 'label', 'conditional', 'marginal')
DATASET_COLUMNS: Tuple[str, str] = ('label', 'value')
CSV_FLOAT_FORMAT: str = '%.10g'  # At least 6 significant digits

# CLI exit codes
EXIT_OK: int = 0
EXIT_INPUT_ERROR: int = 2
EXIT_ESTIMATION_ERROR: int = 3

# Environment variables
ENV_SEED: str = 'DCMI_SEED'
ENV_WORKERS: str = 'DCMI_WORKERS'
ENV_LOG_LEVEL: str = 'DCMI_LOG_LEVEL'
DEFAULT_LOG_LEVEL: str = 'WARNING'

# Bounds for runtime-adjustable settings
SETTING_BOUNDS: Dict[str, Dict[str, Any]] = {
    'seed': {'min_value': 0, 'max_value': MAX_SEED},
    'factor': {'min_value': 1e-6, 'max_value': 1e6},
    'surrogates': {'min_value': 2, 'max_value': 1_000_000},
    'replicates': {'min_value': 1, 'max_value': 1_000_000},
    'pairs': {'min_value': 1, 'max_value': 100_000_000},
    'workers': {'min_value': 1, 'max_value': 256},
}
