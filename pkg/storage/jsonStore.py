import json
import os

from errors import ConfigError, ParseError
from logging_config import get_storage_logger
from .csvStore import _to_builtin

# Obtém o logger configurado para este módulo
logging = get_storage_logger()


def write_json(data, path, metadata=None):
    """Resultado JSON com chaves ordenadas; `metadata` vai na chave '_metadata'."""
    document = dict(data)
    if metadata:
        document['_metadata'] = metadata
    try:
        os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
        with open(path, 'w', encoding='utf-8') as f:
            f.write(json.dumps(document, sort_keys=True, indent=2, default=_to_builtin))
            f.write('\n')
    except OSError as e:
        logging.error('Erro ao gravar %s: %s', path, e)
        raise ConfigError(f'não foi possível gravar {path}: {e}', key='out') from e
    return path


def read_json(path):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            document = json.load(f)
    except OSError as e:
        raise ConfigError(f'não foi possível ler {path}: {e}') from e
    except json.JSONDecodeError as e:
        raise ParseError(f'JSON inválido em {path}: {e.msg}', line=e.lineno) from e
    metadata = document.pop('_metadata', {})
    return document, metadata
