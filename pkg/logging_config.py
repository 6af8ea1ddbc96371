"""
Configuração centralizada de logging para o laboratório.

Este módulo centraliza toda a configuração de logging, garantindo que cada pacote
possa ter seu próprio arquivo de log sem conflitos.

Uso:
    from logging_config import get_logger

    logger = get_logger('fluxModel')
    logger.info('Mensagem de log')
"""

import logging
import os
import sys
from logging.handlers import RotatingFileHandler

from config import LOG_DIR

# Formato padrão para todos os logs
LOG_FORMAT = '%(asctime)s %(levelname)s: %(message)s'
DATE_FORMAT = '%Y-%m-%d %H:%M:%S'

# Dicionário de loggers já criados (cache)
_loggers = {}


def get_logger(nome_modulo, nivel=logging.INFO, arquivo_log=None):
    """
    Retorna um logger configurado para o módulo especificado.

    Args:
        nome_modulo: Nome do módulo (ex: 'Device', 'Dynamics')
        nivel: Nível de log (default: logging.INFO)
        arquivo_log: Nome do arquivo de log (se None, usa f'log{nome_modulo}.log')

    Returns:
        logging.Logger: Logger configurado
    """
    # Retorna do cache se já existir
    if nome_modulo in _loggers:
        return _loggers[nome_modulo]

    if arquivo_log is None:
        arquivo_log = f'log{nome_modulo}.log'

    os.makedirs(LOG_DIR, exist_ok=True)
    caminho_completo = os.path.join(LOG_DIR, arquivo_log)

    logger = logging.getLogger(f'paramlab.{nome_modulo}')
    logger.setLevel(nivel)

    # Remove handlers existentes para evitar duplicação
    if logger.handlers:
        logger.handlers.clear()

    # Handler de arquivo com rotação (10MB por arquivo, mantém 5 backups)
    file_handler = RotatingFileHandler(
        caminho_completo,
        maxBytes=10*1024*1024,  # 10 MB
        backupCount=5,
        encoding='utf-8'
    )
    file_handler.setLevel(nivel)
    file_handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    logger.addHandler(file_handler)

    # Evita propagação para o logger raiz
    logger.propagate = False

    _loggers[nome_modulo] = logger
    return logger


def enable_console_echo(nivel=logging.INFO):
    """Replica todos os loggers já criados (e os futuros) no stderr."""
    handler = logging.StreamHandler(sys.stderr)
    handler.setLevel(nivel)
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt=DATE_FORMAT))
    for getter in (get_device_logger, get_pulse_logger, get_dynamics_logger, get_noise_logger,
                   get_calibration_logger, get_benchmarking_logger, get_storage_logger, get_lab_logger):
        logger = getter()
        if not any(isinstance(h, logging.StreamHandler) and not isinstance(h, RotatingFileHandler)
                   for h in logger.handlers):
            logger.addHandler(handler)


def get_device_logger():
    """Retorna logger para o modelo do dispositivo."""
    return get_logger('Device', arquivo_log='logDevice.log')

def get_pulse_logger():
    """Retorna logger para síntese de pulsos."""
    return get_logger('Pulse', arquivo_log='logPulse.log')

def get_dynamics_logger():
    """Retorna logger para a integração temporal e canais."""
    return get_logger('Dynamics', arquivo_log='logDynamics.log')

def get_noise_logger():
    """Retorna logger para ruído de instrumento e experimentos de coerência."""
    return get_logger('Noise', arquivo_log='logNoise.log')

def get_calibration_logger():
    """Retorna logger para a calibração do CZ."""
    return get_logger('Calibration', arquivo_log='logCalibration.log')

def get_benchmarking_logger():
    """Retorna logger para benchmarking aleatorizado."""
    return get_logger('Benchmarking', arquivo_log='logBenchmarking.log')

def get_storage_logger():
    """Retorna logger para erros de persistência de arquivos."""
    return get_logger('Storage', arquivo_log='errosStorage.log', nivel=logging.WARNING)

def get_lab_logger():
    """Retorna logger para o ponto de entrada principal."""
    return get_logger('Lab', arquivo_log='lab.log')
