import csv
import json
from itertools import product

import pytest

import main
from lib.betaproc2d import mass_from_dict, noninformative_estimate
from lib.survdata import compute_counts, load_dataset

QUERY_EXPECTATIONS = {
    ('0', '0'): (1, 1),
    ('0.11', '0'): (0.75, 0.75),
    ('0.24', '0'): (0.75, 0.75),
    ('0.51', '0'): (0.375, 0.5),
    ('0.68', '0'): (0, 0),
    ('0', '0.02'): (0.75, 0.75),
    ('0', '0.24'): (0.75, 0.75),
    ('0', '0.62'): (0.75, 0.5),
    ('0', '0.68'): (0, 0),
    ('0.3', '0.3'): (0.5, 0.5),
}

SMALL_STUDY = {
    'seed': 21,
    'p0': {'atoms': [[1, 1, '1/2'], [2, 2, '1/2']]},
    'g': {'atoms': [['2.5', '2.5', 1]]},
    'sample_sizes': [20, 40],
    'replications': 3,
    'estimators': ['noninformative', 'dabrowska'],
}


@pytest.fixture
def example_csv(data_dir):
    return str(data_dir / 'dabrowska_example.csv')


def read_json(path):
    return json.loads(path.read_text())


def test_table_matches_hand_computed_values(tmp_path, data_dir, example_csv):
    out = tmp_path / 'table.csv'
    status = main.run([
        'table', '--input', example_csv, '--queries', str(data_dir / 'table_queries.csv'), '--output', str(out),
    ])
    assert status == 0

    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == len(QUERY_EXPECTATIONS)
    for row in rows:
        dabrowska, noninformative = QUERY_EXPECTATIONS[(row['s'], row['t'])]
        assert abs(float(row['dabrowska']) - dabrowska) < 1e-9
        assert abs(float(row['noninformative']) - noninformative) < 1e-9


def test_estimate_noninformative(tmp_path, example_csv):
    out = tmp_path / 'estimate.json'
    assert main.run(['estimate', '--input', example_csv, '--output', str(out)]) == 0

    doc = read_json(out)
    assert doc['estimator'] == 'noninformative'
    assert doc['total'] == 1
    assert sorted(doc['exact_masses']) == ['1/2', '1/4']
    assert [d['stratum'] for d in doc['defects']] == ['cond']

    reloaded = mass_from_dict(doc)
    in_process = noninformative_estimate(compute_counts(load_dataset(example_csv)))
    for s, t in product([None, *in_process.grid], repeat=2):
        assert reloaded.survival(s, t) == in_process.survival(s, t)


@pytest.mark.parametrize('estimator', ['dabrowska', 'km-marginal'])
def test_estimate_other_estimators(tmp_path, example_csv, estimator):
    out = tmp_path / 'estimate.json'
    assert main.run(['estimate', '--input', example_csv, '--estimator', estimator, '--output', str(out)]) == 0
    doc = read_json(out)
    assert doc['estimator'] == estimator
    if estimator == 'dabrowska':
        assert doc['values'][0][0] == 1
        assert len(doc['values']) == len(doc['grid']) + 1
    else:
        assert doc['total'] == pytest.approx(1)
        assert len(doc['marginals']) == 2
        for curve in doc['marginals']:
            assert curve['grid'] == doc['grid']
            assert sum(curve['mass']) + curve['defect'] == pytest.approx(1)


def test_estimate_bayes_with_prior(tmp_path, data_dir, example_csv):
    out = tmp_path / 'bayes.json'
    status = main.run([
        'estimate', '--input', example_csv, '--estimator', 'bayes',
        '--prior', str(data_dir / 'prior_uniform.json'), '--output', str(out),
    ])
    assert status == 0
    doc = read_json(out)
    assert doc['total'] == pytest.approx(1)
    assert '0.68' in doc['grid']


def test_bayes_without_prior_is_a_usage_error(tmp_path, example_csv, capsys):
    status = main.run(['estimate', '--input', example_csv, '--estimator', 'bayes', '--output', str(tmp_path / 'o')])
    assert status == 2
    assert '--prior' in capsys.readouterr().err


def test_unknown_estimator_is_a_usage_error(tmp_path, example_csv):
    assert main.run(['estimate', '--input', example_csv, '--estimator', 'median', '--output', str(tmp_path / 'o')]) == 2


def test_missing_input(tmp_path, capsys):
    absent = tmp_path / 'absent.csv'
    status = main.run(['estimate', '--input', str(absent), '--output', str(tmp_path / 'o.json')])
    assert status == 1
    assert f'input not found: {absent}' in capsys.readouterr().err


def test_malformed_input_reports_line(tmp_path, capsys):
    bad = tmp_path / 'bad.csv'
    bad.write_text("z1,d1,z2,d2\n1,1,2,1\n1,3,2,1\n")
    assert main.run(['estimate', '--input', str(bad), '--output', str(tmp_path / 'o.json')]) == 1
    assert 'line 3' in capsys.readouterr().err


def test_unwritable_output_is_not_a_missing_input(tmp_path, example_csv, capsys):
    out = tmp_path / 'nodir' / 'o.json'
    assert main.run(['estimate', '--input', example_csv, '--output', str(out)]) == 1
    err = capsys.readouterr().err
    assert f'cannot write {out}' in err
    assert 'input not found' not in err


def test_malformed_prior_keys(tmp_path, example_csv, capsys):
    prior = tmp_path / 'prior.json'
    prior.write_text(json.dumps({'f0': {'atoms': [[1, 1, 1]]}, 'w_cond': {'a,b': 1}}))
    status = main.run([
        'estimate', '--input', example_csv, '--estimator', 'bayes', '--prior', str(prior),
        '--output', str(tmp_path / 'o.json'),
    ])
    assert status == 1
    assert 'error:' in capsys.readouterr().err


@pytest.mark.parametrize('field, value', [('sample_sizes', 100), ('estimators', 'dabrowska')])
def test_study_rejects_scalar_lists(tmp_path, capsys, field, value):
    scenario = tmp_path / 'scenario.json'
    scenario.write_text(json.dumps({**SMALL_STUDY, field: value}))
    assert main.run(['study', '--config', str(scenario), '--output', str(tmp_path / 'runs.csv')]) == 1
    assert f'Scenario {field} must be a list' in capsys.readouterr().err


def test_audit_reports_negative_cell(tmp_path, example_csv):
    out = tmp_path / 'audit.json'
    assert main.run(['audit', '--input', example_csv, '--output', str(out)]) == 0

    doc = read_json(out)
    negatives = doc['dabrowska']['negatives']
    assert {'s_lo': '0.62', 's_hi': '0.68', 't_lo': 0, 't_hi': '0.02', 'mass': -0.125} in negatives
    assert doc['noninformative']['negative_count'] == 0
    assert len(doc['dataset']['observations']) == 4
    assert doc['dataset']['observations'][0] == {'z1': '0.51', 'd1': 1, 'z2': '0.02', 'd2': 1}


def test_pruitt_large_sample_to_stdout(capsys):
    assert main.run(['pruitt', '--n', '100000', '--M', '1', '--seed', '7']) == 0
    doc = json.loads(capsys.readouterr().out)
    assert abs(doc['estimate'] - 1 / 6) < 0.01
    assert doc['gap_to_truth'] > 0.1


def test_pruitt_replications_to_file(tmp_path):
    out = tmp_path / 'pruitt.json'
    status = main.run([
        'pruitt', '--n', '300', '--M', '2', '--seed', '1', '--replications', '2', '--compare-beta', '--output', str(out),
    ])
    assert status == 0
    reports = read_json(out)['reports']
    assert [r['seed'] for r in reports] == [1, 2]
    assert all(r['noninformative_estimate'] == 0 for r in reports)


def test_pruitt_requires_seed():
    assert main.run(['pruitt', '--n', '10', '--M', '1']) == 2


def test_study_output_is_reproducible(tmp_path):
    scenario = tmp_path / 'scenario.json'
    scenario.write_text(json.dumps(SMALL_STUDY))
    outputs = []
    for name in ('first', 'second'):
        out = tmp_path / f'{name}.csv'
        summary = tmp_path / f'{name}.json'
        status = main.run(['study', '--config', str(scenario), '--output', str(out), '--summary', str(summary)])
        assert status == 0
        outputs.append((out.read_bytes(), summary.read_bytes()))

    assert outputs[0] == outputs[1]
    header, *rows = outputs[0][0].decode().splitlines()
    assert header == 'n,replication,estimator,sup_error,negative_cells'
    assert len(rows) == 2 * 3 * 2


def test_study_seed_override_changes_runs(tmp_path):
    scenario = tmp_path / 'scenario.json'
    scenario.write_text(json.dumps(SMALL_STUDY))
    texts = []
    for seed in ('21', '22'):
        out = tmp_path / f'{seed}.csv'
        assert main.run(['study', '--config', str(scenario), '--output', str(out), '--seed', seed]) == 0
        texts.append(out.read_text())
    assert texts[0] != texts[1]


def test_metrics_textfile_export(tmp_path, monkeypatch, example_csv):
    textfile = tmp_path / 'pairsurv.prom'
    monkeypatch.setitem(main.settings, 'metrics_enabled', True)
    monkeypatch.setitem(main.settings, 'metrics_textfile', str(textfile))

    assert main.run(['audit', '--input', example_csv, '--output', str(tmp_path / 'audit.json')]) == 0
    text = textfile.read_text()
    assert 'pairsurv_estimator_runs_total{estimator="dabrowska",outcome="success"}' in text
    assert 'pairsurv_dabrowska_negative_cells_total' in text
