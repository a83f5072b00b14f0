from argparse import Namespace
from decimal import Decimal
from fractions import Fraction

import pytest

from lib.config import CommandConfig, deep_merge, get_settings, load_document, parse_count, parse_time, parse_weight
from lib.errors import ConfigError, UsageError


def test_settings_from_environment(monkeypatch):
    monkeypatch.setenv('PAIRSURV_LOG_LEVEL', 'debug')
    monkeypatch.setenv('METRICS_ENABLED', 'True')
    monkeypatch.setenv('METRICS_TEXTFILE', '/tmp/pairsurv.prom')
    assert get_settings() == {
        'log_level': 'DEBUG',
        'metrics_enabled': True,
        'metrics_textfile': '/tmp/pairsurv.prom',
    }


def test_settings_defaults(monkeypatch):
    for name in ('PAIRSURV_LOG_LEVEL', 'METRICS_ENABLED', 'METRICS_TEXTFILE'):
        monkeypatch.delenv(name, raising=False)
    assert get_settings() == {'log_level': 'INFO', 'metrics_enabled': False, 'metrics_textfile': ''}


def test_deep_merge_keeps_base_intact():
    base = {'g': {'atoms': [1]}, 'workers': 1}
    merged = deep_merge(base, {'g': {'grid': [2]}, 'workers': 4})
    assert merged == {'g': {'atoms': [1], 'grid': [2]}, 'workers': 4}
    assert base == {'g': {'atoms': [1]}, 'workers': 1}


def test_load_document_reads_yaml_and_json(tmp_path):
    yaml_path = tmp_path / 'scenario.yaml'
    yaml_path.write_text("seed: 3\nsample_sizes: [10, 20]\n")
    assert load_document(yaml_path) == {'seed': 3, 'sample_sizes': [10, 20]}

    json_path = tmp_path / 'prior.json'
    json_path.write_text('{"w": 2}')
    assert load_document(json_path) == {'w': 2}


def test_load_document_errors(tmp_path):
    listing = tmp_path / 'list.yaml'
    listing.write_text("- 1\n- 2\n")
    with pytest.raises(ConfigError):
        load_document(listing)

    broken = tmp_path / 'broken.yaml'
    broken.write_text("seed: [1, 2\n")
    with pytest.raises(ConfigError):
        load_document(broken)

    with pytest.raises(FileNotFoundError):
        load_document(tmp_path / 'absent.json')


def test_parse_time():
    assert parse_time('0.51') == Decimal('0.51')
    assert parse_time(0.1) == Decimal('0.1')
    assert parse_time(3) == Decimal(3)
    for bad in ('-1', 'inf', 'x', None, True):
        with pytest.raises(ConfigError):
            parse_time(bad)


def test_parse_weight():
    assert parse_weight('1/3') == Fraction(1, 3)
    assert parse_weight('0.15') == Fraction(3, 20)
    assert parse_weight(2) == 2
    for bad in ('-1/2', 'half', '1/0', None):
        with pytest.raises(ConfigError):
            parse_weight(bad)


def test_parse_count():
    assert parse_count(3, 'replications') == 3
    assert parse_count(0, 'offset', minimum=0) == 0
    for bad in (0, 2.5, True, '3'):
        with pytest.raises(ConfigError):
            parse_count(bad, 'replications')


def test_command_from_args_ignores_unrelated_attributes():
    args = Namespace(subcommand='estimate', input='in.csv', output='out.json', estimator='dabrowska',
                     prior=None, handler=print)
    cfg = CommandConfig.from_args(args)
    assert cfg.estimator == 'dabrowska'
    assert cfg.replications == 1


@pytest.mark.parametrize('fields', [
    {'subcommand': 'estimate', 'input': 'in.csv'},
    {'subcommand': 'estimate', 'input': 'in.csv', 'output': 'o', 'estimator': 'bayes'},
    {'subcommand': 'estimate', 'input': 'in.csv', 'output': 'o', 'prior': 'p.json'},
    {'subcommand': 'estimate', 'input': 'in.csv', 'output': 'o', 'estimator': 'median'},
    {'subcommand': 'table', 'input': 'in.csv', 'output': 'o'},
    {'subcommand': 'study', 'output': 'o'},
    {'subcommand': 'study', 'config': 'c', 'output': 'o', 'workers': 0},
    {'subcommand': 'pruitt', 'n': 10, 'm_conc': 1.0},
    {'subcommand': 'pruitt', 'n': 0, 'm_conc': 1.0, 'seed': 1},
    {'subcommand': 'pruitt', 'n': 10, 'm_conc': 0.0, 'seed': 1},
    {'subcommand': 'pruitt', 'n': 10, 'm_conc': 1.0, 'seed': 1, 'replications': 0},
    {'subcommand': 'plot'},
])
def test_command_validation_rejects(fields):
    with pytest.raises(UsageError):
        CommandConfig(**fields).validate()


def test_command_validation_accepts_bayes_with_prior():
    CommandConfig('estimate', input='in.csv', output='o', estimator='bayes', prior='p.json').validate()
    CommandConfig('pruitt', n=10, m_conc=1.0, seed=0).validate()
