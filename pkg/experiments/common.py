"""Utilidades compartilhadas pelos handlers: metadados, caminhos e o CZ calibrado."""

import os

from calibration import CZCalibration, calibrate_cz
from dynamics import DecoherenceRates, gate_superoperator
from errors import ConfigError
from logging_config import get_lab_logger
from storage import read_json, run_metadata

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


class RunContext:
    """Configuração validada, documento bruto (para o hash), diretório e opção de SVG."""

    def __init__(self, experiment, raw, out_dir, svg=False):
        self.experiment = experiment
        self.raw = raw
        self.out_dir = out_dir
        self.svg = svg

    def path(self, name):
        return os.path.join(self.out_dir, name)

    def metadata(self, seed=None):
        return run_metadata(self.raw, self.experiment.seed if seed is None else seed)


def calibrated_gate(pair, block):
    """CZCalibration do arquivo indicado no bloco ou de uma calibração sem ruído nova."""
    if block.calibration_file:
        document, _ = read_json(block.calibration_file)
        try:
            return CZCalibration.model_validate(document)
        except ValueError as e:
            raise ConfigError(f'calibração inválida em {block.calibration_file}: {e}',
                              key='calibration_file') from e
    return calibrate_cz(pair, block.epsilon, block.search)


def gate_channels(pair, calibration, decoherence, sample_rate=None):
    """Canal do CZ calibrado e a fábrica de canais com T1 escalado (deriva)."""
    rates = DecoherenceRates.from_pair(pair) if decoherence else None
    pulse = calibration.pulse()
    channel = gate_superoperator(pair, pulse, rates, frame_corrections=calibration, sample_rate=sample_rate)

    def factory(multiplier):
        scaled = (rates or DecoherenceRates()).scaled(t1_factor=multiplier)
        return {'CZ': gate_superoperator(pair, pulse, scaled, frame_corrections=calibration,
                                         sample_rate=sample_rate)}

    return {'CZ': channel}, factory
