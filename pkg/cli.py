#!/usr/bin/env python3
"""
Command-line interface for the dcmi estimator.

Subcommands: estimate, significance, experiment, kde, oracle, sample.
Exit status is 0 on success, 2 on usage or input errors and 3 when a
computation fails; failures print one `dcmi: error: ...` line on stderr.
"""

import argparse
import json
import logging
import math
import sys
from typing import Any, Dict, List, Mapping, Optional, Sequence, TextIO, Tuple

import numpy as np
import pandas as pd

from dataset import load_csv, write_csv
from distributions import make_distribution, resolve_family, sample
from errors import ConfigError, DcmiError
from experiments import (
    SweepSpec,
    default_fixed,
    resolve_parameter,
    run_size_studies,
    run_sweep,
    run_table1,
    size_study_specs,
)
from kde import fit, kde_grid
from mi import (
    analytic_jsd_quadrature,
    analytic_mi_quadrature,
    analytic_mi_trapezoid,
    estimate_mi,
)
from quadrature import QuadratureSpec
from rng import check_seed
from run_settings import run_settings
from settings import (
    BANDWIDTH_MODES,
    CSV_FLOAT_FORMAT,
    DEFAULT_BANDWIDTH_MODE,
    DEFAULT_NULL_MODEL,
    DEFAULT_SWEEP_GRIDS,
    EXIT_INPUT_ERROR,
    EXIT_OK,
    FAMILIES,
    FAMILY_ALIASES,
    NULL_MODELS,
    PARAMETER_ALIASES,
    SIZE_STUDY_N_GRID,
)
from significance import significance

logger = logging.getLogger(__name__)

PROG = 'dcmi'
FAMILY_CHOICES = tuple(FAMILY_ALIASES) + FAMILIES


def parse_grid(text: str) -> Tuple[float, ...]:
    """
    Parse an inclusive `start:stop:step` grid.

    The point count is round((stop - start) / step) + 1 and values are
    rounded to 12 decimals, so `0:5:0.25` gives exactly 21 points.

    Raises:
        ConfigError: Malformed text, step <= 0 or stop < start
    """
    parts = text.split(':')
    if len(parts) != 3:
        raise ConfigError(f"grid must be start:stop:step, got {text!r}")
    try:
        start, stop, step = (float(p) for p in parts)
    except ValueError as exc:
        raise ConfigError(f"grid must be start:stop:step, got {text!r}") from exc
    if not all(np.isfinite((start, stop, step))):
        raise ConfigError(f"grid values must be finite, got {text!r}")
    if step <= 0:
        raise ConfigError(f"grid step must be positive, got {text!r}")
    if stop < start:
        raise ConfigError(f"grid stop precedes start in {text!r}")

    # the tolerance keeps a stop that is a float multiple of step inside the grid
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(round(start + i * step, 12) for i in range(count))


def parse_assignments(items: Optional[Sequence[str]]) -> Dict[str, float]:
    """Parse repeated `name=value` distribution parameters."""
    params: Dict[str, float] = {}
    for item in items or ():
        name, sep, value = item.partition('=')
        if not sep:
            raise ConfigError(f"expected name=value, got {item!r}")
        try:
            params[PARAMETER_ALIASES.get(name.strip(), name.strip())] = float(value)
        except ValueError as exc:
            raise ConfigError(f"{name}: cannot parse {value!r}") from exc
    return params


def _seed_arg(text: str) -> int:
    try:
        return check_seed(int(text))
    except (ValueError, ConfigError) as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _positive_float(text: str) -> float:
    try:
        value = float(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc
    if not (np.isfinite(value) and value > 0):
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from exc
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {text}")
    return value


def _metadata_lines(metadata: Mapping[str, Any]) -> str:
    """Comment header carried by every CSV artifact; pandas skips it with comment='#'."""
    return ''.join(f"# {key}={json.dumps(value, sort_keys=True)}\n"
                   for key, value in metadata.items())


def _open_output(path: Optional[str]) -> TextIO:
    if path is None or path == '-':
        return sys.stdout
    try:
        return open(path, 'w', encoding='utf-8', newline='')  # pylint: disable=consider-using-with
    except OSError as exc:
        raise ConfigError(f"{path}: cannot write file: {exc}") from exc


def write_frame(frame: pd.DataFrame, metadata: Mapping[str, Any],
                path: Optional[str]) -> None:
    """Write a DataFrame as CSV preceded by its metadata comments."""
    out = _open_output(path)
    try:
        out.write(_metadata_lines(metadata))
        frame.to_csv(out, index=False, float_format=CSV_FLOAT_FORMAT, lineterminator='\n')
    finally:
        if out is not sys.stdout:
            out.close()


def write_json(payload: Mapping[str, Any], path: Optional[str]) -> None:
    """Write a JSON object with full float precision."""
    out = _open_output(path)
    try:
        json.dump(payload, out, indent=2, sort_keys=False)
        out.write('\n')
    finally:
        if out is not sys.stdout:
            out.close()


def _resolve_seed(args: argparse.Namespace) -> int:
    return args.seed if args.seed is not None else run_settings.seed


def _resolve_workers(args: argparse.Namespace) -> int:
    return args.workers if args.workers is not None else run_settings.workers


def _settings_echo(args: argparse.Namespace) -> Dict[str, Any]:
    """Run settings this command accepts, with its command-line values in place."""
    settings = run_settings.get_settings_dict(vars(args))
    return {name: value for name, value in settings.items() if hasattr(args, name)}


def cmd_estimate(args: argparse.Namespace) -> int:
    """Print the MI estimate of a dataset as JSON."""
    ds = load_csv(args.input)
    estimate = estimate_mi(ds, args.factor, args.mode)
    write_json({**estimate.to_dict(), 'settings': _settings_echo(args)}, args.output)
    return EXIT_OK


def cmd_significance(args: argparse.Namespace) -> int:
    """Print the surrogate significance report of a dataset as JSON."""
    ds = load_csv(args.input)
    report = significance(ds, args.surrogates, _resolve_seed(args), args.factor,
                          null=args.null, workers=_resolve_workers(args), mode=args.mode)
    write_json({**report.to_dict(), 'settings': _settings_echo(args)}, args.output)
    return EXIT_OK


def cmd_experiment(args: argparse.Namespace) -> int:
    """Run a sweep, the size study or the significance table."""
    seed = _resolve_seed(args)
    workers = _resolve_workers(args)
    with_null = not args.no_null

    if args.table1:
        table = run_table1(seed, args.surrogates, args.pairs, args.factor, workers, args.null)
        metadata = dict(table.attrs['metadata'])
        payload: Dict[str, Any] = {'metadata': metadata, 'rows': table.to_dict(orient='records')}
    elif args.size_study:
        grid = args.grid or SIZE_STUDY_N_GRID
        specs = size_study_specs(grid, replicates=args.replicates, seed=seed,
                                 factor=args.factor, with_null=with_null)
        table = run_size_studies(specs, workers)
        metadata = {'seed': seed, 'factor': args.factor, 'family': 'gaussian_pair',
                    'parameter': 'n', 'grid': list(specs[0].grid),
                    'replicates': args.replicates,
                    'parameter_sets': [dict(s.fixed) for s in specs]}
        payload = {'metadata': metadata, 'rows': table.to_dict(orient='records')}
    else:
        if args.dist is None or args.param is None:
            raise ConfigError("experiment needs --dist and --param (or --table1 / --size-study)")
        family = resolve_family(args.dist)
        parameter = resolve_parameter(family, args.param)
        grid = args.grid or DEFAULT_SWEEP_GRIDS[parameter]
        spec = SweepSpec(family=family, parameter=parameter, grid=grid,
                         replicates=args.replicates, pairs=args.pairs, seed=seed,
                         factor=args.factor,
                         fixed=default_fixed(family, parameter, parse_assignments(args.set)),
                         null=args.null, with_null=with_null)
        result = run_sweep(spec, workers)
        table = result.to_frame()
        metadata = spec.to_dict()
        payload = result.to_dict()

    metadata['settings'] = payload['settings'] = _settings_echo(args)

    if args.format == 'json':
        write_json(payload, args.output)
    else:
        write_frame(table, metadata, args.output)
    return EXIT_OK


def cmd_kde(args: argparse.Namespace) -> int:
    """Export the fitted densities on a grid as CSV."""
    ds = load_csv(args.input)
    model = fit(ds, args.factor, args.mode)
    dist = make_distribution(args.dist, **parse_assignments(args.set)) if args.dist else None
    frame = kde_grid(model, np.array(args.grid), dist)
    metadata: Dict[str, Any] = {
        'factor': args.factor,
        'mode': args.mode,
        'bandwidths': {str(c.token): c.bandwidth.h for c in model.components},
    }
    if dist is not None:
        metadata['distribution'] = {'family': dist.family, **dist.params}
    metadata['settings'] = _settings_echo(args)
    write_frame(frame, metadata, args.output)
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    """Print the exact MI of a benchmark distribution."""
    dist = make_distribution(args.dist, **parse_assignments(args.set))
    quad = QuadratureSpec()
    payload: Dict[str, Any] = {
        'family': dist.family,
        'params': dist.params,
        'analytic_mi': analytic_mi_quadrature(dist, quad),
        'analytic_jsd': analytic_jsd_quadrature(dist, quad),
    }
    if args.check:
        payload['dense_trapezoid_mi'] = analytic_mi_trapezoid(dist)
    write_json(payload, args.output)
    return EXIT_OK


def cmd_sample(args: argparse.Namespace) -> int:
    """Write a seeded benchmark sample in the dataset CSV format."""
    dist = make_distribution(args.dist, **parse_assignments(args.set))
    ds = sample(dist, args.pairs, _resolve_seed(args))
    out = _open_output(args.output)
    try:
        write_csv(ds, out)
    finally:
        if out is not sys.stdout:
            out.close()
    return EXIT_OK


def _add_common(parser: argparse.ArgumentParser, *, seed: bool = False,
                workers: bool = False, output: bool = True) -> None:
    if seed:
        parser.add_argument('--seed', type=_seed_arg, default=None,
                            help='Base seed (default: $DCMI_SEED or 0)')
    if workers:
        parser.add_argument('--workers', type=_positive_int, default=None,
                            help='Worker threads (default: $DCMI_WORKERS or 1)')
    if output:
        parser.add_argument('--output', '-o', default=None,
                            help='Output file (default: stdout)')


def _add_estimator(parser: argparse.ArgumentParser) -> None:
    parser.add_argument('--factor', type=_positive_float, default=run_settings.factor,
                        help='Bandwidth factor (default: %(default)s)')
    parser.add_argument('--mode', choices=BANDWIDTH_MODES, default=DEFAULT_BANDWIDTH_MODE,
                        help='Bandwidth mode (default: %(default)s)')


def _add_distribution(parser: argparse.ArgumentParser, required: bool) -> None:
    parser.add_argument('--dist', choices=FAMILY_CHOICES, required=required,
                        help='Benchmark family')
    parser.add_argument('--set', action='append', metavar='NAME=VALUE',
                        help='Distribution parameter, e.g. ym=1 or sigma=2 (repeatable)')


def _grid_arg(text: str) -> Tuple[float, ...]:
    try:
        return parse_grid(text)
    except ConfigError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser with every subcommand."""
    parser = argparse.ArgumentParser(
        prog=PROG,
        description='Mutual information between a discrete label and a continuous value.',
    )
    parser.add_argument('--verbose', '-v', action='count', default=0,
                        help='More logging on stderr (-v INFO, -vv DEBUG)')
    commands = parser.add_subparsers(dest='command', required=True, metavar='COMMAND')

    estimate = commands.add_parser('estimate', help='Estimate MI of a label,value CSV')
    estimate.add_argument('--input', '-i', required=True, help='Dataset CSV')
    _add_estimator(estimate)
    _add_common(estimate)
    estimate.set_defaults(handler=cmd_estimate)

    signif = commands.add_parser('significance', help='Compare MI with surrogate datasets')
    signif.add_argument('--input', '-i', required=True, help='Dataset CSV')
    signif.add_argument('--surrogates', type=int, default=run_settings.surrogates,
                        help='Surrogate count (default: %(default)s)')
    signif.add_argument('--null', choices=NULL_MODELS, default=DEFAULT_NULL_MODEL,
                        help='Null model (default: %(default)s)')
    _add_estimator(signif)
    _add_common(signif, seed=True, workers=True)
    signif.set_defaults(handler=cmd_significance)

    experiment = commands.add_parser('experiment', help='Run replicate sweeps')
    _add_distribution(experiment, required=False)
    experiment.add_argument('--param', help='Swept parameter: ym, sigma, a or n')
    experiment.add_argument('--grid', type=_grid_arg,
                            help='start:stop:step (inclusive; default grid per parameter)')
    experiment.add_argument('--table1', action='store_true',
                            help='Three-family MI and significance table')
    experiment.add_argument('--size-study', action='store_true',
                            help='Dataset-size sweeps for the three Gaussian settings')
    experiment.add_argument('--replicates', type=_positive_int,
                            default=run_settings.replicates,
                            help='Datasets per grid point (default: %(default)s)')
    experiment.add_argument('--pairs', type=_positive_int, default=run_settings.pairs,
                            help='Pairs per dataset (default: %(default)s)')
    experiment.add_argument('--surrogates', type=int, default=run_settings.surrogates,
                            help='Surrogates per table row (default: %(default)s)')
    experiment.add_argument('--null', choices=NULL_MODELS, default=DEFAULT_NULL_MODEL,
                            help='Null model (default: %(default)s)')
    experiment.add_argument('--no-null', action='store_true',
                            help='Skip the matched independent samples')
    experiment.add_argument('--factor', type=_positive_float, default=run_settings.factor,
                            help='Bandwidth factor (default: %(default)s)')
    experiment.add_argument('--format', choices=('csv', 'json'), default='csv')
    _add_common(experiment, seed=True, workers=True)
    experiment.set_defaults(handler=cmd_experiment)

    kde = commands.add_parser('kde', help='Export fitted densities on a grid')
    kde.add_argument('--input', '-i', required=True, help='Dataset CSV')
    kde.add_argument('--grid', type=_grid_arg, required=True, help='start:stop:step')
    _add_distribution(kde, required=False)
    _add_estimator(kde)
    _add_common(kde)
    kde.set_defaults(handler=cmd_kde)

    oracle = commands.add_parser('oracle', help='Exact MI of a benchmark distribution')
    _add_distribution(oracle, required=True)
    oracle.add_argument('--check', action='store_true',
                        help='Also evaluate with the dense trapezoid rule')
    _add_common(oracle)
    oracle.set_defaults(handler=cmd_oracle)

    sample_cmd = commands.add_parser('sample', help='Write a benchmark sample as CSV')
    _add_distribution(sample_cmd, required=True)
    sample_cmd.add_argument('--pairs', type=_positive_int, default=run_settings.pairs,
                            help='Pair count (default: %(default)s)')
    _add_common(sample_cmd, seed=True)
    sample_cmd.set_defaults(handler=cmd_sample)

    return parser


def _configure_logging(verbosity: int) -> None:
    if verbosity >= 2:
        level = logging.DEBUG
    elif verbosity == 1:
        level = logging.INFO
    else:
        level = logging.getLevelName(run_settings.log_level)
        if not isinstance(level, int):
            level = logging.WARNING
    logging.basicConfig(level=level, stream=sys.stderr, force=True,
                        format='%(levelname)s %(name)s: %(message)s')


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one subcommand.

    Args:
        argv: Arguments without the program name; defaults to sys.argv[1:]

    Returns:
        Process exit status
    """
    try:
        run_settings.refresh_from_env()
    except ConfigError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    _configure_logging(args.verbose)
    try:
        return args.handler(args)
    except DcmiError as exc:
        print(f"{PROG}: error: {exc}", file=sys.stderr)
        return exc.exit_code
    except BrokenPipeError:
        return EXIT_OK


if __name__ == '__main__':
    sys.exit(main())
