"""
Esquema do documento JSON de experimento.

O documento é validado inteiro antes de qualquer execução; erros de esquema
viram ConfigError com o caminho pontuado da primeira chave inválida.
"""

import json

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

import config
from benchmarking import RBConfig
from calibration import SearchConfig
from device import CoupledPair
from errors import ConfigError
from noise import NoiseProfile


class _Block(BaseModel):
    model_config = ConfigDict(extra='forbid')


class Grid(_Block):
    start: float
    stop: float
    points: int = Field(ge=1)

    @model_validator(mode='after')
    def _ordered(self):
        if self.stop < self.start:
            raise ValueError('stop deve ser >= start')
        return self

    def values(self):
        return np.linspace(self.start, self.stop, self.points)


class DumBlock(_Block):
    epsilons: Grid = Field(default_factory=lambda: Grid(start=0.0, stop=1.0, points=101))
    omega_p: float = Field(default=100.0, gt=0, description='MHz; só entra no contorno de ressonância')
    harmonic: int = Field(default=1, ge=1)


class CoherenceBlock(_Block):
    epsilons: list[float] = Field(default_factory=lambda: [0.0, 0.2, 0.4, 0.6, 0.8])
    omega_p: float = Field(default=100.0, gt=0)
    ramsey_delays: Grid = Field(default_factory=lambda: Grid(start=0.0, stop=60000.0, points=61))
    t1_delays: Grid = Field(default_factory=lambda: Grid(start=0.0, stop=100000.0, points=41))
    shots: int = Field(default=200, ge=1)


class ChevronBlock(_Block):
    epsilon: float = Field(default=0.6, gt=0)
    frequencies: Grid = Field(default_factory=lambda: Grid(start=80.0, stop=104.0, points=40))
    durations: Grid = Field(default_factory=lambda: Grid(start=0.0, stop=400.0, points=40))
    edge: float = Field(default=0.0, ge=0)
    decoherence: bool = False


class CalibrateBlock(_Block):
    epsilon: float = Field(default=0.6, gt=0)
    search: SearchConfig = Field(default_factory=SearchConfig)


class IrbBlock(_Block):
    epsilon: float = Field(default=0.6, gt=0)
    search: SearchConfig = Field(default_factory=SearchConfig)
    calibration_file: str | None = None     # JSON do subcomando calibrate; evita recalibrar
    rb: RBConfig = Field(default_factory=RBConfig)
    decoherence: bool = True
    replicants: int = Field(default=config.BOOTSTRAP_REPLICANTS, ge=10)


class RepeatIrbBlock(IrbBlock):
    experiments: int = Field(default=20, ge=1)
    monitors: bool = True
    coherence_ranges: dict[str, tuple[float, float]] | None = None


class PtmBlock(_Block):
    epsilon: float = Field(default=0.6, gt=0)
    search: SearchConfig = Field(default_factory=SearchConfig)
    calibration_file: str | None = None
    decoherence: bool = True


class PsdBlock(_Block):
    one_over_f_amp: float = Field(default=0.0, ge=0)
    psd_to_flux: float = Field(default=config.DEFAULT_PSD_TO_FLUX, ge=0)


class ExperimentConfig(_Block):
    device: CoupledPair | None = None
    noise: NoiseProfile = Field(default_factory=NoiseProfile)
    seed: int | None = Field(default=None, ge=0)
    out: str | None = None
    dum: DumBlock = Field(default_factory=DumBlock)
    coherence: CoherenceBlock = Field(default_factory=CoherenceBlock)
    chevron: ChevronBlock = Field(default_factory=ChevronBlock)
    calibrate: CalibrateBlock = Field(default_factory=CalibrateBlock)
    irb: IrbBlock = Field(default_factory=IrbBlock)
    repeat_irb: RepeatIrbBlock = Field(default_factory=RepeatIrbBlock)
    ptm: PtmBlock = Field(default_factory=PtmBlock)
    psd: PsdBlock = Field(default_factory=PsdBlock)

    def require_device(self):
        if self.device is None:
            raise ConfigError('configuração sem dispositivo', key='device')
        return self.device

    def require_seed(self):
        if self.seed is None:
            raise ConfigError('experimento estocástico exige semente mestre', key='seed')
        return self.seed


def config_from_dict(data, seed=None):
    """Valida o documento; `seed` (da linha de comando) sobrepõe a semente do arquivo."""
    if seed is not None:
        data = {**data, 'seed': seed}
    try:
        return ExperimentConfig.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = '.'.join(str(p) for p in first['loc'])
        raise ConfigError(f"configuração inválida: {first['msg']}", key=key) from e


def load_config(path, seed=None):
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except OSError as e:
        raise ConfigError(f'não foi possível ler {path}: {e}', key='config') from e
    except json.JSONDecodeError as e:
        raise ConfigError(f'JSON inválido em {path} (linha {e.lineno}): {e.msg}', key='config') from e
    return data, config_from_dict(data, seed)
