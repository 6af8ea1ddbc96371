import json

import numpy as np
import pytest

import main_lab
from storage import read_csv

SMALL_DEVICE = {
    'tunable': {'f_max': 4.475, 'f_min': 4.080, 'anharmonicity': 200.0, 't1': 23.6, 't2_star': 19.45,
                'tunable': True},
    'fixed': {'f_max': 3.826, 'anharmonicity': 200.0, 't1': 15.9, 't2_star': 14.65},
    'g': 5.0,
}


def _write_config(tmp_path, **blocks):
    document = {'device': SMALL_DEVICE, 'dum': {'epsilons': {'start': 0.0, 'stop': 0.8, 'points': 9},
                                                'omega_p': 92.0}}
    document.update(blocks)
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(document))
    return str(path)


def _summary(capsys):
    return json.loads(capsys.readouterr().out.strip().splitlines()[-1])


def test_dum_writes_table(tmp_path, capsys):
    out = tmp_path / 'out'
    code = main_lab.main(['dum', '--config', _write_config(tmp_path), '--out', str(out)])
    summary = _summary(capsys)
    assert code == 0
    assert summary['sucesso'] is True
    assert 0.5 <= summary['sweet_spot_epsilon'] <= 0.7
    assert (out / 'dum.csv').exists()


def test_dum_is_reproducible(tmp_path, capsys):
    config_path = _write_config(tmp_path)
    main_lab.main(['dum', '--config', config_path, '--out', str(tmp_path / 'a')])
    main_lab.main(['dum', '--config', config_path, '--out', str(tmp_path / 'b')])
    capsys.readouterr()
    assert (tmp_path / 'a' / 'dum.csv').read_bytes() == (tmp_path / 'b' / 'dum.csv').read_bytes()


def test_svg_figure(tmp_path, capsys):
    out = tmp_path / 'out'
    assert main_lab.main(['dum', '--config', _write_config(tmp_path), '--out', str(out), '--svg']) == 0
    assert (out / 'dum.svg').exists()


def test_invalid_device_exits_with_config_error(tmp_path, capsys):
    device = {**SMALL_DEVICE, 'tunable': {**SMALL_DEVICE['tunable'], 't2_star': 60.0}}
    config_path = _write_config(tmp_path, device=device)
    code = main_lab.main(['dum', '--config', config_path, '--out', str(tmp_path / 'out')])
    summary = _summary(capsys)
    assert code == 2
    assert summary['sucesso'] is False
    assert 'device.tunable' in summary['mensagem']


def test_unknown_key_rejected(tmp_path, capsys):
    config_path = _write_config(tmp_path, colour='blue')
    assert main_lab.main(['dum', '--config', config_path, '--out', str(tmp_path / 'out')]) == 2
    assert _summary(capsys)['tipo'] == 'ConfigError'


def test_missing_config_file(tmp_path, capsys):
    assert main_lab.main(['dum', '--config', str(tmp_path / 'none.json'), '--out', str(tmp_path / 'out')]) == 2


def test_stochastic_command_needs_seed(tmp_path, capsys):
    assert main_lab.main(['coherence', '--config', _write_config(tmp_path), '--out', str(tmp_path / 'out')]) == 2
    assert 'seed' in _summary(capsys)['mensagem']


def test_psd_summary(tmp_path, capsys):
    psd = tmp_path / 'psd.csv'
    rows = ['frequency_mhz,power_dbm_hz'] + [f'{f},{-110.0 if f == 100 else -140.0}' for f in range(10, 210, 10)]
    psd.write_text('\n'.join(rows) + '\n')
    out = tmp_path / 'out'
    code = main_lab.main(['psd', str(psd), '--config', _write_config(tmp_path), '--out', str(out)])
    assert code == 0
    assert _summary(capsys)['sucesso'] is True
    document = json.loads((out / 'psd_summary.json').read_text())
    assert document['white_floor_dbm_hz'] == pytest.approx(-140.0)
    assert [s['frequency_mhz'] for s in document['spurs']] == [100.0]


def test_psd_needs_input(tmp_path, capsys):
    assert main_lab.main(['psd', '--config', _write_config(tmp_path), '--out', str(tmp_path / 'out')]) == 2


def test_psd_parse_error_reports_line(tmp_path, capsys):
    psd = tmp_path / 'psd.csv'
    psd.write_text('10,-140\n20,-140\n30,abc\n')
    code = main_lab.main(['psd', str(psd), '--config', _write_config(tmp_path), '--out', str(tmp_path / 'out')])
    assert code == 2
    assert 'linha 3' in _summary(capsys)['mensagem']


def test_unknown_command():
    with pytest.raises(SystemExit):
        main_lab.main(['teleport'])


def test_numerical_failure_exits_with_code_3(tmp_path, capsys, monkeypatch):
    def broken(context):
        raise np.linalg.LinAlgError('matriz singular')

    monkeypatch.setitem(main_lab.HANDLERS, 'dum', broken)
    code = main_lab.main(['dum', '--config', _write_config(tmp_path), '--out', str(tmp_path / 'out')])
    summary = _summary(capsys)
    assert code == 3
    assert summary['sucesso'] is False
    assert summary['tipo'] == 'NumericalError'
    assert 'matriz singular' in summary['mensagem']


def test_chevron_small_grid(tmp_path, capsys):
    chevron = {'epsilon': 0.6, 'frequencies': {'start': 88.0, 'stop': 96.0, 'points': 3},
               'durations': {'start': 0.0, 'stop': 150.0, 'points': 6}}
    out = tmp_path / 'out'
    code = main_lab.main(['chevron', '--config', _write_config(tmp_path, chevron=chevron), '--out', str(out)])
    assert code == 0
    assert _summary(capsys)['sucesso'] is True
    frame = read_csv(out / 'chevron.csv')[0]
    assert list(frame.columns) == ['frequency_mhz', 'duration_ns', 'population']
    assert len(frame) == 18
    assert frame['population'].between(-1e-9, 1.0 + 1e-9).all()
    document = json.loads((out / 'chevron.json').read_text())
    assert document['epsilon'] == 0.6
    assert 'resonance_mhz' in document


def test_coherence_writes_table(tmp_path, capsys):
    coherence = {'epsilons': [0.0], 'omega_p': 92.0, 'shots': 150,
                 'ramsey_delays': {'start': 0.0, 'stop': 45000.0, 'points': 41},
                 't1_delays': {'start': 0.0, 'stop': 60000.0, 'points': 16}}
    out = tmp_path / 'out'
    config_path = _write_config(tmp_path, coherence=coherence, seed=4)
    code = main_lab.main(['coherence', '--config', config_path, '--out', str(out)])
    assert code == 0
    frame = read_csv(out / 'coherence.csv')[0]
    assert len(frame) == 1
    assert frame['t1_us'].iloc[0] == pytest.approx(23.6, rel=0.25)
    assert frame['t2_star_us'].iloc[0] == pytest.approx(19.45, rel=0.25)


@pytest.mark.slow
def test_calibrated_gate_commands(tmp_path, capsys):
    out = tmp_path / 'out'
    calibrate_path = _write_config(tmp_path, seed=6)
    assert main_lab.main(['calibrate', '--config', calibrate_path, '--out', str(out)]) == 0
    calibration_file = str(out / 'calibration.json')
    calibration = json.loads((out / 'calibration.json').read_text())
    assert abs(calibration['omega_p'] - 92.0) < 10.0
    assert calibration['met_threshold'] is True

    rb = {'lengths': [1, 4, 8], 'sequences_per_length': 3, 'shots': 200}
    blocks = {
        'irb': {'calibration_file': calibration_file, 'rb': rb, 'replicants': 50},
        'ptm': {'calibration_file': calibration_file},
        'repeat_irb': {'calibration_file': calibration_file, 'rb': rb, 'replicants': 50, 'experiments': 2,
                       'monitors': False},
    }
    config_path = _write_config(tmp_path, seed=6, **blocks)
    capsys.readouterr()

    assert main_lab.main(['irb', '--config', config_path, '--out', str(out)]) == 0
    irb = json.loads((out / 'irb.json').read_text())
    assert irb['calibration']['duration'] == calibration['duration']
    assert 0.9 < irb['avg_fidelity'] < 1.01

    assert main_lab.main(['ptm', '--config', config_path, '--out', str(out)]) == 0
    ptm = read_csv(out / 'ptm.csv')[0]
    assert ptm.shape == (16, 17)
    assert json.loads((out / 'ptm.json').read_text())['avg_fidelity'] > 0.95

    assert main_lab.main(['repeat-irb', '--config', config_path, '--out', str(out)]) == 0
    timeseries = read_csv(out / 'repeat_irb_timeseries.csv')[0]
    assert len(timeseries) == 2
    assert json.loads((out / 'repeat_irb.json').read_text())['experiments'] == 2
