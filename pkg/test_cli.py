"""End-to-end tests of the dcmi command line."""

import io
import json

import pandas as pd
import pytest

import cli
from conftest import LABEL_ENTROPY
from dataset import load_csv, write_csv
from distributions import gaussian_pair, sample
from errors import ConfigError
from mi import estimate_mi
from run_settings import RunSettings


@pytest.fixture(autouse=True)
def fresh_run_settings(monkeypatch):
    """Environment overrides applied by one test must not leak into the next."""
    for name in ('DCMI_SEED', 'DCMI_WORKERS', 'DCMI_LOG_LEVEL'):
        monkeypatch.delenv(name, raising=False)
    monkeypatch.setattr(cli, 'run_settings', RunSettings())


@pytest.fixture
def dataset_file(tmp_path):
    ds = sample(gaussian_pair(1.0, 1.0), 300, seed=8)
    path = tmp_path / 'pairs.csv'
    write_csv(ds, path)
    return path, ds


def _read_csv(text):
    return pd.read_csv(io.StringIO(text), comment='#')


def test_estimate_prints_json(dataset_file, capsys):
    path, ds = dataset_file
    assert cli.main(['estimate', '--input', str(path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload['mi_nats'] == estimate_mi(ds).mi_nats
    assert payload['n'] == 300
    assert payload['factor'] == 1.06
    assert payload['settings'] == {'factor': 1.06}


def test_estimate_missing_file(tmp_path, capsys):
    missing = tmp_path / 'absent.csv'
    assert cli.main(['estimate', '-i', str(missing)]) == 2
    err = capsys.readouterr().err
    assert err.startswith('dcmi: error:')
    assert str(missing) in err


def test_estimate_label_too_wide_for_int64(write_file, capsys):
    path = write_file('wide.csv', 'label,value\n1,0.0\n99999999999999999999,1.0\n')
    assert cli.main(['estimate', '-i', str(path)]) == 2
    assert 'line 3: malformed' in capsys.readouterr().err


def test_estimate_single_point_label(write_file, capsys):
    path = write_file('tiny.csv', 'label,value\n1,0.0\n1,1.0\n1,0.5\n9,2.0\n')
    assert cli.main(['estimate', '-i', str(path)]) == 3
    assert 'label 9' in capsys.readouterr().err


def test_significance_report(dataset_file, capsys):
    path, _ = dataset_file
    assert cli.main(['significance', '-i', str(path), '--surrogates', '5', '--seed', '3']) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload['surrogate_count'] == 5
    assert len(payload['surrogates']) == 5
    assert payload['seed'] == 3
    assert payload['settings'] == {'seed': 3, 'factor': 1.06, 'surrogates': 5}


def test_significance_needs_two_surrogates(dataset_file, capsys):
    path, _ = dataset_file
    assert cli.main(['significance', '-i', str(path), '--surrogates', '1']) == 2
    assert 'insufficient surrogates' in capsys.readouterr().err


def test_experiment_sweep_grid(capsys):
    argv = ['experiment', '--dist', 'gaussian', '--param', 'ym', '--grid', '0:5:0.25',
            '--replicates', '1', '--pairs', '100', '--no-null', '--seed', '7']
    assert cli.main(argv) == 0
    out = capsys.readouterr().out
    assert out.startswith('# ')
    frame = _read_csv(out)
    assert len(frame) == 21
    assert frame['param'].iloc[-1] == 5.0
    assert (frame['std_mi'] == 0).all()
    assert frame['null_mean'].isna().all()


def test_experiment_default_grid(capsys):
    argv = ['experiment', '--dist', 'exponential', '--param', 'n', '--replicates', '1',
            '--no-null', '--seed', '3']
    assert cli.main(argv) == 0
    frame = _read_csv(capsys.readouterr().out)
    assert frame['param'].tolist() == [100.0, 250.0, 500.0, 1000.0, 2000.0, 5000.0]


def test_experiment_json_format(capsys):
    argv = ['experiment', '--dist', 'uniform', '--param', 'a', '--grid', '1:2:1',
            '--replicates', '2', '--pairs', '100', '--seed', '1', '--format', 'json']
    assert cli.main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload['spec']['fixed'] == {'y_m': 1.0}
    assert len(payload['rows']) == 2
    assert len(payload['replicate_mi'][0]) == 2


def test_experiment_rejects_reversed_grid(capsys):
    argv = ['experiment', '--dist', 'gaussian', '--param', 'ym', '--grid', '5:0:1']
    assert cli.main(argv) == 2
    assert 'stop precedes start' in capsys.readouterr().err


def test_experiment_needs_a_target(capsys):
    assert cli.main(['experiment', '--grid', '0:1:1']) == 2
    assert 'dcmi: error:' in capsys.readouterr().err


def test_experiment_table(capsys):
    argv = ['experiment', '--table1', '--pairs', '300', '--surrogates', '3', '--seed', '2']
    assert cli.main(argv) == 0
    frame = _read_csv(capsys.readouterr().out)
    assert frame['distribution'].tolist() == ['gaussian_pair', 'uniform_pair',
                                              'exponential_pair']
    assert list(frame.columns) == ['distribution', 'params', 'mi', 'analytic_mi',
                                   'reference_mi', 'null_mean', 'null_std', 'z']


def test_reruns_are_byte_identical(tmp_path):
    argv = ['experiment', '--dist', 'gaussian', '--param', 'sigma', '--grid', '0.5:1.5:0.5',
            '--replicates', '2', '--pairs', '150', '--seed', '9', '--workers', '2']
    first, second = tmp_path / 'first.csv', tmp_path / 'second.csv'
    assert cli.main(argv + ['-o', str(first)]) == 0
    assert cli.main(argv + ['-o', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_seed_falls_back_to_environment(tmp_path, monkeypatch):
    from_env, explicit, other = (tmp_path / name for name in ('env.csv', 'seed.csv', 'o.csv'))
    base = ['sample', '--dist', 'exponential', '--pairs', '40']

    assert cli.main(base + ['--seed', '5', '-o', str(explicit)]) == 0
    assert cli.main(base + ['--seed', '6', '-o', str(other)]) == 0
    monkeypatch.setenv('DCMI_SEED', '5')
    assert cli.main(base + ['-o', str(from_env)]) == 0

    assert from_env.read_bytes() == explicit.read_bytes()
    assert from_env.read_bytes() != other.read_bytes()


def test_bad_environment_seed(monkeypatch, capsys):
    monkeypatch.setenv('DCMI_SEED', 'abc')
    assert cli.main(['oracle', '--dist', 'exponential']) == 2
    assert 'seed' in capsys.readouterr().err


def test_kde_export_with_exact_columns(dataset_file, capsys):
    path, _ = dataset_file
    argv = ['kde', '-i', str(path), '--grid=-2:2:0.5', '--dist', 'gaussian', '--set', 'ym=1']
    assert cli.main(argv) == 0
    frame = _read_csv(capsys.readouterr().out)
    assert list(frame.columns) == ['y', 'label', 'conditional', 'marginal', 'joint',
                                   'true_joint', 'true_marginal']
    assert len(frame) == 18
    assert (frame['marginal'] > 0).all()


def test_oracle_check(capsys):
    argv = ['oracle', '--dist', 'uniform', '--set', 'ym=0.5', '--set', 'a=1', '--check']
    assert cli.main(argv) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload['analytic_mi'] == pytest.approx(0.5 * LABEL_ENTROPY, abs=1e-9)
    assert payload['dense_trapezoid_mi'] == pytest.approx(payload['analytic_mi'], abs=1e-6)
    assert payload['analytic_jsd'] == pytest.approx(payload['analytic_mi'], abs=1e-8)


def test_oracle_unknown_parameter(capsys):
    assert cli.main(['oracle', '--dist', 'exponential', '--set', 'a=2']) == 2
    assert 'no parameter' in capsys.readouterr().err


def test_sample_output_loads(tmp_path):
    path = tmp_path / 'drawn.csv'
    argv = ['sample', '--dist', 'uniform', '--set', 'ym=0.2', '--pairs', '250',
            '--seed', '4', '-o', str(path)]
    assert cli.main(argv) == 0
    ds = load_csv(path)
    assert ds.n == 250
    assert set(ds.tokens) <= {1, 2}


def test_missing_subcommand_is_a_usage_error(capsys):
    assert cli.main([]) == 2
    assert 'usage' in capsys.readouterr().err


@pytest.mark.parametrize('text, expected', [
    ('0:1:0.25', (0.0, 0.25, 0.5, 0.75, 1.0)),
    ('2:2:1', (2.0,)),
    ('0.1:0.3:0.1', (0.1, 0.2, 0.3)),
    ('100:500:200', (100.0, 300.0, 500.0)),
    ('0:1:0.6', (0.0, 0.6)),
    ('100:1000:600', (100.0, 700.0)),
    ('0:0.95:0.1', (0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)),
])
def test_parse_grid(text, expected):
    assert cli.parse_grid(text) == expected


@pytest.mark.parametrize('text', ['0:1', '0:1:0', '1:0:1', 'a:b:c', '0:inf:1'])
def test_parse_grid_rejects(text):
    with pytest.raises(ConfigError):
        cli.parse_grid(text)


def test_parse_assignments_canonicalises_names():
    assert cli.parse_assignments(['ym=1.5', 'sigma=2']) == {'y_m': 1.5, 'sigma_g': 2.0}
    with pytest.raises(ConfigError):
        cli.parse_assignments(['ym'])


def test_csv_header_echoes_run_settings(monkeypatch, capsys):
    monkeypatch.setenv('DCMI_SEED', '12')
    argv = ['experiment', '--dist', 'gaussian', '--param', 'ym', '--grid', '0:1:1',
            '--replicates', '2', '--pairs', '100', '--no-null']
    assert cli.main(argv) == 0
    header = [line for line in capsys.readouterr().out.splitlines() if line.startswith('#')]
    settings = json.loads(next(line for line in header
                               if line.startswith('# settings='))[len('# settings='):])
    assert settings == {'seed': 12, 'factor': 1.06, 'surrogates': 100, 'replicates': 2,
                        'pairs': 100}
