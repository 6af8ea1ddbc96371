import fcntl
import os
from contextlib import contextmanager

from errors import ConfigError
from logging_config import get_storage_logger

# Obtém o logger configurado para este módulo
logging = get_storage_logger()

LOCK_NAME = '.paramlab.lock'


@contextmanager
def file_lock(directory):
    """Lock não bloqueante sobre o diretório de saída; falha se outra execução já o detém."""
    os.makedirs(directory, exist_ok=True)
    lock_path = os.path.join(directory, LOCK_NAME)
    lock_file = open(lock_path, 'w')
    try:
        fcntl.flock(lock_file.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
    except OSError as e:
        lock_file.close()
        logging.warning('Outro processo já está usando %s', directory)
        raise ConfigError(f'diretório de saída em uso: {directory}', key='out') from e

    logging.info('Lock adquirido em %s', directory)
    try:
        yield lock_path
    finally:
        try:
            os.remove(lock_path)
            fcntl.flock(lock_file.fileno(), fcntl.LOCK_UN)
            lock_file.close()
        except OSError as e:
            logging.error('Erro ao liberar lock: %s', str(e))
