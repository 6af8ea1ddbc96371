import os

import numpy as np
import pandas as pd
import pytest

from benchmarking import RBDataset, ecdf_with_band
from dynamics import depolarizing_channel, pauli_transfer_matrix, ptm_frame, unitary_channel
from errors import ConfigError, ParseError
from storage import (channel_from_csv, channel_to_csv, config_hash, file_lock, plot_ecdf, plot_ptm, read_csv,
                     read_json, run_metadata, write_csv, write_json)


def _frame():
    return pd.DataFrame({'flux': [0.0, 0.25, 0.5], 'frequency_ghz': [4.475, 4.2, 4.08]})


def test_csv_round_trip_with_metadata(tmp_path):
    path = tmp_path / 'dum.csv'
    write_csv(_frame(), path, {'seed': 7, 'config_sha256': 'abc'})
    frame, metadata = read_csv(path)
    assert metadata == {'config_sha256': 'abc', 'seed': '7'}
    assert np.allclose(frame['frequency_ghz'], _frame()['frequency_ghz'])
    assert path.read_text().splitlines()[:2] == ['# config_sha256: abc', '# seed: 7']


def test_csv_rewrite_is_byte_identical(tmp_path):
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    write_csv(_frame(), first, {'seed': 1})
    write_csv(_frame(), second, {'seed': 1})
    assert first.read_bytes() == second.read_bytes()


def test_csv_missing_file():
    with pytest.raises(ConfigError):
        read_csv('/nonexistent/dir/file.csv')


def test_config_hash_ignores_key_order():
    assert config_hash({'a': 1, 'b': [1, 2]}) == config_hash({'b': [1, 2], 'a': 1})
    assert config_hash({'a': 1}) != config_hash({'a': 2})
    assert config_hash({'x': np.float64(0.5)}) == config_hash({'x': 0.5})


def test_run_metadata():
    metadata = run_metadata({'a': 1}, 42)
    assert metadata['seed'] == 42
    assert metadata['config_sha256'] == config_hash({'a': 1})
    assert 'version' in metadata


def test_json_round_trip(tmp_path):
    path = tmp_path / 'out' / 'summary.json'
    write_json({'white_floor_dbm_hz': -140.0, 'spurs': [], 'values': np.arange(3)}, path, {'seed': 3})
    document, metadata = read_json(path)
    assert document == {'white_floor_dbm_hz': -140.0, 'spurs': [], 'values': [0, 1, 2]}
    assert metadata == {'seed': 3}


def test_json_malformed(tmp_path):
    path = tmp_path / 'bad.json'
    path.write_text('{\n  "a": 1,\n  oops\n}\n')
    with pytest.raises(ParseError) as info:
        read_json(path)
    assert info.value.line == 3


def test_channel_csv_round_trip(tmp_path):
    channel = depolarizing_channel(0.97)
    path = tmp_path / 'channel.csv'
    channel_to_csv(channel, str(path), {'seed': 0})
    restored = channel_from_csv(str(path))
    assert np.allclose(restored.matrix, channel.matrix)
    assert os.path.exists(tmp_path / 'channel.json')


def test_rb_dataset_through_csv(tmp_path):
    dataset = RBDataset(lengths=np.array([2, 2, 4, 4]), sequence_index=np.array([0, 1, 0, 1]),
                        successes=np.array([480, 490, 450, 470]), shots=np.full(4, 500))
    path = tmp_path / 'rb.csv'
    write_csv(dataset.to_frame(), path)
    frame, _ = read_csv(path)
    restored = RBDataset.from_frame(frame)
    assert np.array_equal(restored.successes, dataset.successes)


def test_file_lock_excludes_second_run(tmp_path):
    with file_lock(str(tmp_path)):
        with pytest.raises(ConfigError) as info:
            with file_lock(str(tmp_path)):
                pass
        assert info.value.key == 'out'
    with file_lock(str(tmp_path)) as lock_path:
        assert os.path.exists(lock_path)
    assert not os.path.exists(lock_path)


def test_plots_are_reproducible(tmp_path):
    frame = ptm_frame(pauli_transfer_matrix(unitary_channel(np.diag([1, 1, 1, -1]))))
    first, second = tmp_path / 'a.svg', tmp_path / 'b.svg'
    plot_ptm(frame, first)
    plot_ptm(frame, second)
    assert first.read_bytes() == second.read_bytes()
    plot_ecdf(ecdf_with_band([0.01, 0.02, 0.03]).to_frame(), tmp_path / 'ecdf.svg')
    assert (tmp_path / 'ecdf.svg').stat().st_size > 0
