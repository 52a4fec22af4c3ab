"""Tests for the command-line front-end and its report files."""

import json

import pytest

from app.cli import EXIT_INFINITE, EXIT_OK, EXIT_USAGE, EXIT_VIOLATION, main


def _write_diagonal(path, values):
    n = len(values)
    path.write_text(json.dumps({'dim': n, 're': [[values[i] if i == j else 0.0 for j in range(n)] for i in range(n)]}))


@pytest.fixture
def matrices(tmp_path):
    paths = {}
    for name, values in {'a': [0.3, 0.5], 'b': [0.4, 0.6], 'kernel': [0.0, 0.5]}.items():
        path = tmp_path / f"{name}.json"
        _write_diagonal(path, values)
        paths[name] = str(path)
    return paths


def _stdout_json(capsys):
    return json.loads(capsys.readouterr().out)


def test_entropy_of_identical_files_is_zero(matrices, capsys):
    code = main(['entropy', '--a', matrices['a'], '--b', matrices['a'], '--phi', 'vn'])

    report = _stdout_json(capsys)
    assert code == EXIT_OK
    assert report['results'] == {'kind': 'finite', 'value': 0.0}
    assert report['library']['name'] == 'opentropy'
    assert report['config']['phi'] == 'vn'


def test_entropy_reports_infinite_value(matrices, capsys):
    code = main(['entropy', '--a', matrices['a'], '--b', matrices['kernel']])

    assert code == EXIT_OK
    assert _stdout_json(capsys)['results']['reason'] == 'KernelMismatchAt0'


def test_expect_finite_exits_with_infinite_code(matrices, capsys):
    code = main(['entropy', '--a', matrices['a'], '--b', matrices['kernel'], '--expect-finite'])

    assert code == EXIT_INFINITE


def test_entropy_on_explicit_interval(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    _write_diagonal(a, [2.0, 3.0])
    _write_diagonal(b, [1.0, 4.0])

    code = main(['entropy', '--a', str(a), '--b', str(b), '--phi', 'gaussian', '--interval', '1,4'])

    assert code == EXIT_OK
    assert _stdout_json(capsys)['results']['value'] > 0.0


def test_certify_x4_finds_violation(tmp_path, capsys):
    output = tmp_path / "report.json"

    code = main(['certify', '--phi', 'x4', '--mode', 'lowner', '--trials', '200', '--seed', '7',
                 '--output', str(output)])

    report = json.loads(output.read_text())
    assert code == EXIT_VIOLATION
    assert report['results']['verdict'] == "ViolationFound"
    assert report['results']['lowner']['witness']['points']
    assert capsys.readouterr().out == ""


def test_certify_vn_is_consistent(capsys):
    code = main(['certify', '--phi', 'vn', '--dim', '3', '--trials', '20', '--seed', '1'])

    results = _stdout_json(capsys)['results']
    assert code == EXIT_OK
    assert results['verdict'] == "ConsistentWithMonotone"
    assert set(results) == {'lowner', 'search', 'verdict'}


def test_certify_requires_seed():
    assert main(['certify', '--phi', 'vn']) == EXIT_USAGE


def test_certify_reports_are_reproducible(tmp_path):
    output = tmp_path / "report.json"
    argv = ['certify', '--phi', 'x4', '--dim', '3', '--trials', '50', '--seed', '3', '--output', str(output)]

    main(argv)
    first = json.loads(output.read_text())
    main(argv + ['--workers', '2'])
    second = json.loads(output.read_text())

    for report in (first, second):
        report.pop('timing')
        report['config'].pop('workers')
        report['metadata']['settings'].pop('max_workers')
    assert first == second


def test_klein_survey_subcommand(capsys):
    code = main(['klein', '--phi', 'vn', '--dim', '3', '--trials', '3', '--seed', '1', '--grid', '100'])

    results = _stdout_json(capsys)['results']
    assert code == EXIT_OK
    assert results['verdict'] == "BoundsHold"
    assert results['constants']['derivation_grid'] == 100


def test_converge_with_diagonal_oracles(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    a.write_text(json.dumps({'kind': 'diagonal', 'entries': [0.9, 0.7, 0.6], 'fill': 0.5}))
    b.write_text(json.dumps({'kind': 'diagonal', 'entries': [], 'fill': 0.5}))

    code = main(['converge', '--a-oracle', str(a), '--b-oracle', f"diagonal:{b}", '--schedule', '2,4,8,16'])

    results = _stdout_json(capsys)['results']
    assert code == EXIT_OK
    assert results['verdict'] == "Converged"
    assert results['at_dim'] == 4


def test_catalog_lists_builtin_functions(capsys):
    code = main(['catalog'])

    names = [entry['name'] for entry in _stdout_json(capsys)['results']]
    assert code == EXIT_OK
    assert names[:3] == ['vn', 'car', 'ccr']


def test_config_file_overrides_flags(tmp_path, capsys):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({'trials': 5, 'mode': 'lowner'}))

    code = main(['certify', '--phi', 'vn', '--trials', '500', '--seed', '2', '--config', str(config)])

    report = _stdout_json(capsys)
    assert code == EXIT_OK
    assert report['config']['trials'] == 5
    assert report['results']['lowner']['trials'] == 5


def test_unknown_config_field_is_a_usage_error(tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({'bogus': 1}))

    assert main(['catalog', '--config', str(config)]) == EXIT_USAGE


@pytest.mark.parametrize("argv", [
    [],
    ['entropy', '--a', 'missing.json', '--b', 'missing.json'],
    ['entropy', '--a', 'x.json'],
    ['certify', '--seed', '1', '--phi', 'nonsense'],
    ['certify', '--seed', '1', '--mode', 'sideways'],
    ['converge', '--a-oracle', 'a.json', '--b-oracle', 'b.json', '--schedule', '8,4'],
    ['klein', '--seed', '1', '--eps', '0.7'],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE
