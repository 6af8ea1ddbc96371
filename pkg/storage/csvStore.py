"""
Tabelas CSV com cabeçalho de metadados em linhas de comentário '#'.

Formato:
    # config_sha256: <hash>
    # seed: <semente>
    # version: <versão>
    coluna_a,coluna_b
    ...
"""

import hashlib
import json
import os

import numpy as np
import pandas as pd

import config
from errors import ConfigError, ParseError
from logging_config import get_storage_logger

# Obtém o logger configurado para este módulo
logging = get_storage_logger()

FLOAT_FORMAT = '%.12g'


def _to_builtin(value):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f'tipo não serializável: {type(value).__name__}')


def canonical_json(data):
    return json.dumps(data, sort_keys=True, separators=(',', ':'), default=_to_builtin)


def config_hash(data):
    """sha256 do JSON canônico da configuração."""
    return hashlib.sha256(canonical_json(data).encode('utf-8')).hexdigest()


def run_metadata(config_data, seed):
    return {'config_sha256': config_hash(config_data), 'seed': seed, 'version': config.VERSION}


def write_csv(frame, path, metadata=None):
    """Grava `frame` com o cabeçalho de metadados (chaves ordenadas)."""
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w', encoding='utf-8', newline='') as f:
            for key in sorted(metadata or {}):
                f.write(f'# {key}: {(metadata or {})[key]}\n')
            frame.to_csv(f, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    except OSError as e:
        logging.error('Erro ao gravar %s: %s', path, e)
        raise ConfigError(f'não foi possível gravar {path}: {e}', key='out') from e
    return path


def read_csv(path):
    """Devolve (DataFrame, metadados) de um arquivo escrito por `write_csv`."""
    metadata = {}
    header_lines = 0
    try:
        with open(path, 'r', encoding='utf-8') as f:
            for line in f:
                if not line.startswith('#'):
                    break
                key, _, value = line[1:].strip().partition(':')
                metadata[key.strip()] = value.strip()
                header_lines += 1
        frame = pd.read_csv(path, skiprows=header_lines)
    except OSError as e:
        logging.error('Erro ao ler %s: %s', path, e)
        raise ConfigError(f'não foi possível ler {path}: {e}') from e
    except pd.errors.ParserError as e:
        raise ParseError(f'CSV malformado em {path}: {e}') from e
    return frame, metadata


def channel_to_csv(channel, path, metadata=None):
    """
    Superoperador como tabela (linha, coluna, real, imag) mais um JSON lateral
    com vazamento e metadados do canal.
    """
    matrix = np.asarray(channel.matrix)
    rows, cols = np.indices(matrix.shape)
    frame = pd.DataFrame({'row': rows.ravel(), 'col': cols.ravel(),
                          'real': matrix.real.ravel(), 'imag': matrix.imag.ravel()})
    write_csv(frame, path, metadata)
    sidecar = {'dim': channel.dim, 'leakage': None if channel.leakage is None else np.asarray(channel.leakage),
               'metadata': channel.metadata}
    with open(f'{os.path.splitext(path)[0]}.json', 'w', encoding='utf-8') as f:
        f.write(json.dumps(sidecar, sort_keys=True, indent=2, default=_to_builtin))
    return path


def channel_from_csv(path):
    from dynamics import Superoperator

    frame, _ = read_csv(path)
    size = int(frame['row'].max()) + 1
    matrix = np.zeros((size, size), dtype=complex)
    matrix[frame['row'].to_numpy(), frame['col'].to_numpy()] = frame['real'].to_numpy() + 1j * frame['imag'].to_numpy()
    sidecar_path = f'{os.path.splitext(path)[0]}.json'
    leakage, extra = None, {}
    if os.path.exists(sidecar_path):
        with open(sidecar_path, 'r', encoding='utf-8') as f:
            sidecar = json.load(f)
        leakage = None if sidecar.get('leakage') is None else np.array(sidecar['leakage'])
        extra = sidecar.get('metadata') or {}
    return Superoperator(matrix=matrix, leakage=leakage, metadata=extra)
