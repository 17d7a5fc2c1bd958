import json
import math

import pytest

from vrshuffle.cli import main, build_parser

pytestmark = pytest.mark.usefixtures('no_user_config')

LDP_ARGS = ['--mechanism', 'general-ldp', '--eps0', '1.0', '--n', '10000']


def run_json(capsys, *argv):
    assert main(['--format', 'json', *argv]) == 0
    return json.loads(capsys.readouterr().out)


def test_parser_builds():
    parser = build_parser()
    args = parser.parse_args(['upper', '--mechanism', 'krr', '--eps0', '1', '--d', '4',
                              '--n', '1e4', '--delta', '1e-6', '--delta', '1e-8'])
    assert args.command == 'upper'
    assert args.mech_eps0 == 1.0 and args.mech_d == 4.0
    assert args.n == 10000
    assert args.delta == [1e-6, 1e-8]


def test_no_command(capsys):
    assert main([]) == 2


def test_bad_count(capsys):
    assert main(['params', 'krr', '--eps0', '1', '--d', '4', '--n', '10.5']) == 2


def test_params_catalog(capsys):
    out = run_json(capsys, 'params', 'krr', '--eps0', '1', '--d', '4')
    assert out['command'] == 'params'
    assert out['mechanism'] == 'krr'
    assert out['p'] == pytest.approx(math.e)
    assert out['beta'] == pytest.approx(math.expm1(1.0)/(math.e + 3))
    assert out['n_blanket'] == 0
    assert 'version' in out


def test_params_list(capsys):
    assert main(['params', '--list']) == 0
    text = capsys.readouterr().out
    for name in ('general-ldp', 'krr', 'cheu', 'balls-into-bins'):
        assert name in text


def test_params_extra_args(capsys):
    out = run_json(capsys, 'params', '--mechanism', 'k-subset', '--eps0', '1',
                   '--d', '8', '--arg', 'k=1', '--n', '100')
    krr = run_json(capsys, 'params', 'krr', '--eps0', '1', '--d', '8', '--n', '100')
    assert out['beta'] == pytest.approx(krr['beta'])
    assert out['n_blanket'] == 99


def test_params_matrix_file(capsys, rr_matrix_file):
    out = run_json(capsys, 'params', '--matrix-file', rr_matrix_file, '--n-blanket', '5')
    assert out['p'] == pytest.approx(2.0)
    assert out['beta'] == pytest.approx(1/3)
    assert out['n_blanket'] == 5


def test_params_errors(capsys):
    assert main(['params', 'no-such-mechanism']) == 2
    assert 'error[parameter-domain]' in capsys.readouterr().err
    assert main(['params', '--p', '3', '--beta', '0.4', '--q', '3', '--mechanism', 'rr2',
                 '--eps0', '1']) == 2
    assert main(['params']) == 2
    assert main(['params', '--p', '3', '--beta', '0.9', '--q', '3']) == 2
    assert main(['params', '--matrix-file', '/no/such/file.json']) == 4


def test_upper_ldp(capsys):
    out = run_json(capsys, 'upper', *LDP_ARGS, '--delta', '1e-6', '--iters', '20')
    assert out['kind'] == 'upper'
    assert out['eps'] == pytest.approx(0.0433, abs=1e-4 + out['resolution'])
    assert out['eps'] == out['eps_high']


def test_upper_several_deltas(capsys):
    out = run_json(capsys, 'upper', *LDP_ARGS, '--delta', '1e-4', '--delta', '1e-6')
    assert [row['delta'] for row in out['rows']] == [1e-4, 1e-6]
    assert out['rows'][0]['eps'] <= out['rows'][1]['eps']


def test_upper_text(capsys):
    assert main(['upper', *LDP_ARGS, '--delta', '1e-6']) == 0
    text = capsys.readouterr().out
    assert 'eps_high' in text and 'resolution' in text


def test_upper_half_r(capsys):
    assert main(['upper', '--mechanism', 'balcer-uniform', '--n', '20',
                 '--delta', '0.01']) == 3
    assert 'error[unsupported-regime]' in capsys.readouterr().err


def test_oracle(capsys):
    out = run_json(capsys, 'oracle', '--mechanism', 'balcer-uniform', '--n', '20',
                   '--delta', '0.01')
    assert out['kind'] == 'upper'
    assert math.isfinite(out['eps'])
    assert main(['oracle', '--mechanism', 'balcer-uniform', '--n', '100',
                 '--delta', '0.01', '--max-n', '50']) == 3
    assert 'error[size-limit]' in capsys.readouterr().err


def test_lower_matches_upper_for_local_hash(capsys):
    args = ['--mechanism', 'local-hash', '--l', '3', '--eps0', '1.0986', '--n', '10000',
            '--delta', '1e-6']
    lower = run_json(capsys, 'lower', *args)
    upper = run_json(capsys, 'upper', *args)
    assert lower['kind'] == 'lower'
    assert abs(upper['eps'] - lower['eps']) <= 2*upper['resolution']
    tight = run_json(capsys, 'lower', *args, '--mode', 'tight-upper')
    assert tight['kind'] == 'tight-upper'


def test_lower_raw_asymmetric(capsys):
    out = run_json(capsys, 'lower', '--p', '3', '--beta', '0.4', '--q0', '3', '--q1', '2',
                   '--n', '1000', '--delta', '1e-6')
    assert out['q0'] == 3.0 and out['q1'] == 2.0
    assert out['eps'] > 0
    assert main(['upper', '--p', '3', '--beta', '0.4', '--q0', '3', '--q1', '2',
                 '--delta', '1e-6']) == 2


def test_closed_form(capsys):
    out = run_json(capsys, 'closed-form', 'asymptotic', *LDP_ARGS, '--delta', '1e-6')
    assert out['form'] == 'asymptotic'
    assert out['eps'] > 0.0433
    failed = run_json(capsys, 'closed-form', 'asymptotic', '--mechanism', 'general-ldp',
                      '--eps0', '1', '--n', '100', '--delta', '1e-6')
    assert failed['eps'] is None
    assert failed['status'].startswith('precondition failed: n >=')


def test_compose(capsys):
    base = ['compose', '--mechanism', 'krr', '--eps0', '1', '--d', '4', '--n', '101',
            '--mesh', '0.01', '--eps-upper', '1.0', '--points', '5']
    out = run_json(capsys, *base)
    assert out['k'] == 1 and out['gamma'] == 1.0
    assert len(out['rows']) == 5
    assert out['rows'][0]['eps'] == 0.0
    single = run_json(capsys, *base, '--k', '3', '--target-delta', '1e-6')
    assert 0 < single['eps'] < 3
    assert single['target_delta'] == 1e-6


def test_compose_gamma_one_is_plain(capsys):
    base = ['compose', '--mechanism', 'krr', '--eps0', '1', '--d', '4', '--n', '101',
            '--k', '2', '--mesh', '0.01', '--eps-upper', '1.0', '--points', '5']
    plain = run_json(capsys, *base)
    sampled = run_json(capsys, *base, '--gamma', '1')
    assert plain == sampled


def test_compose_bad_gamma(capsys):
    assert main(['compose', '--mechanism', 'rr2', '--eps0', '1', '--n', '10',
                 '--gamma', '1.5']) == 2


def test_sweep_csv(capsys, tmp_path):
    fname = tmp_path / 'sweep.csv'
    assert main(['sweep', '--mechanism', 'general-ldp', '--n', '1000', '--vary', 'eps0',
                 '--range', '0.5:1.5:3', '--out', fname.as_posix()]) == 0
    assert 'wrote 3 rows' in capsys.readouterr().out
    lines = fname.read_text().splitlines()
    assert lines[0].startswith('# vrshuffle ')
    assert lines[1] == 'param,eps_numeric,eps_analytic,eps_asymptotic,amplification_ratio,log2_ratio'
    assert len(lines) == 5
    eps = [float(line.split(',')[1]) for line in lines[2:]]
    assert eps == sorted(eps)


def test_sweep_unwritable(capsys, tmp_path):
    fname = tmp_path / 'no_such_dir' / 'sweep.csv'
    assert main(['sweep', '--mechanism', 'general-ldp', '--n', '1000', '--vary', 'eps0',
                 '--range', '1:1:1', '--out', fname.as_posix()]) == 4
    assert 'error[io]' in capsys.readouterr().err


def test_sweep_json_deterministic(capsys):
    argv = ['sweep', '--p', '3', '--beta', '0', '--q', '3', '--n', '500',
            '--vary', 'beta', '--range', '0:0.3:2']
    first = run_json(capsys, *argv)
    second = run_json(capsys, *argv)
    assert first == second
    row = first['rows'][0]
    assert row['eps_numeric'] == 0.0
    assert row['amplification_ratio'] == 'inf'


def test_sweep_range_errors(capsys):
    base = ['sweep', '--mechanism', 'general-ldp', '--eps0', '1', '--vary', 'n']
    assert main([*base, '--range', '100:1000']) == 2
    assert main([*base, '--range', '0:1000:3', '--log']) == 2
    assert main(['sweep', '--mechanism', 'general-ldp', '--eps0', '1', '--n', '100',
                 '--vary', 'beta', '--range', '0:0.3:2']) == 2


def test_missing_config_file(capsys, tmp_path):
    missing = (tmp_path / 'nope.yaml').as_posix()
    assert main(['--config', missing, 'params', 'rr2', '--eps0', '1']) == 4


def test_config_precedence(capsys, tmp_path):
    conf = tmp_path / 'vr.yaml'
    conf.write_text('format: json\niters: 10\n')
    assert main(['--config', conf.as_posix(), 'upper', *LDP_ARGS, '--delta', '1e-6']) == 0
    out = json.loads(capsys.readouterr().out)
    assert out['resolution'] == pytest.approx(1/2**10)

    assert main(['--config', conf.as_posix(), '--format', 'csv', 'params', 'rr2',
                 '--eps0', '1']) == 0
    assert capsys.readouterr().out.startswith('# vrshuffle ')


def test_config_from_environment(capsys, tmp_path, monkeypatch):
    conf = tmp_path / 'env.toml'
    conf.write_text('format = "json"\n')
    monkeypatch.setenv('VRSHUFFLE_CONFIG', conf.as_posix())
    assert main(['params', 'rr2', '--eps0', '1']) == 0
    assert json.loads(capsys.readouterr().out)['command'] == 'params'


def test_bad_format_in_config(capsys, tmp_path):
    conf = tmp_path / 'vr.yaml'
    conf.write_text('format: xml\n')
    assert main(['--config', conf.as_posix(), 'params', 'rr2', '--eps0', '1']) == 2


def test_timing(capsys):
    assert main(['--timing', 'params', 'rr2', '--eps0', '1']) == 0
    err = capsys.readouterr().err
    assert 'Phase' in err and 'output' in err
