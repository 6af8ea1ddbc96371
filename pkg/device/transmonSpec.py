"""
Parâmetros estáticos do par transmon sintonizável / transmon fixo.

Convenção de sinal: a anarmonicidade é guardada como magnitude (MHz) e todas as
fórmulas de Hamiltoniano e ressonância usam η_eff = −|η|.
"""

import json
import math

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from errors import ConfigError


class TransmonSpec(BaseModel):
    model_config = ConfigDict(frozen=True)

    f_max: float = Field(gt=0, description='frequência máxima 0→1 (GHz)')
    f_min: float = Field(gt=0, description='frequência mínima 0→1 (GHz)')
    anharmonicity: float = Field(ge=0, description='|η| (MHz)')
    t1: float = Field(default=math.inf, gt=0, description='µs')
    t2_star: float = Field(default=math.inf, gt=0, description='µs')
    levels: int = Field(default=3, ge=2)
    tunable: bool = False

    @model_validator(mode='before')
    @classmethod
    def _fixed_frequency(cls, data):
        # Transmon fixo: f_min ausente equivale a f_max
        if isinstance(data, dict) and data.get('f_min') is None and 'f_max' in data:
            data = {**data, 'f_min': data['f_max']}
        return data

    @model_validator(mode='after')
    def _check_physics(self):
        if self.f_min > self.f_max:
            raise ValueError('f_max deve ser >= f_min')
        if math.isfinite(self.t2_star) and self.t2_star > 2.0 * self.t1 * (1 + 1e-12):
            raise ValueError('t2_star deve ser <= 2*t1 (defasagem pura não física)')
        return self

    @property
    def eta_ghz(self):
        return self.anharmonicity / 1000.0

    @property
    def asymmetry(self):
        """d = ((f_min+|η|)/(f_max+|η|))²."""
        return ((self.f_min + self.eta_ghz) / (self.f_max + self.eta_ghz)) ** 2


class CoupledPair(BaseModel):
    model_config = ConfigDict(frozen=True)

    tunable: TransmonSpec
    fixed: TransmonSpec
    g: float = Field(default=5.0, gt=0, description='acoplamento nu (MHz)')
    dc_bias: float = Field(default=0.0, description='Φ_dc (Φ0)')

    @model_validator(mode='after')
    def _check_roles(self):
        if not self.tunable.tunable:
            raise ValueError('o transmon "tunable" precisa ter tunable=true')
        if self.tunable.levels < 3:
            raise ValueError('o transmon sintonizável precisa de >= 3 níveis para a transição |11>-|02>')
        return self

    @property
    def fixed_frequency(self):
        return self.fixed.f_max

    def with_coherence(self, t1_tunable, t2_tunable, t1_fixed, t2_fixed):
        """Cópia do par com novos tempos de coerência (µs)."""
        return self.model_copy(update={
            'tunable': self.tunable.model_copy(update={'t1': t1_tunable, 't2_star': t2_tunable}),
            'fixed': self.fixed.model_copy(update={'t1': t1_fixed, 't2_star': t2_fixed}),
        })


def pure_dephasing_time(t1, t2_star):
    """
    Tempo de defasagem pura Tφ a partir de T1 e T2*: 1/Tφ = 1/T2* − 1/(2·T1).
    Retorna inf quando não há defasagem pura.
    """
    rate = 1.0 / t2_star - 1.0 / (2.0 * t1)
    if rate <= 1e-15:
        return math.inf
    return 1.0 / rate


def pair_from_dict(data):
    """Valida um dicionário no esquema CoupledPair, traduzindo erros para ConfigError."""
    try:
        return CoupledPair.model_validate(data)
    except ValidationError as e:
        first = e.errors()[0]
        key = '.'.join(str(p) for p in first['loc'])
        raise ConfigError(f"parâmetros do dispositivo inválidos: {first['msg']}", key=key) from e


def load_pair(path):
    """Carrega o par acoplado de um documento JSON."""
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = json.load(f)
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f'não foi possível ler {path}: {e}') from e
    return pair_from_dict(data.get('device', data))
