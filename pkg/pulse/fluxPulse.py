"""
Descrição do pulso de fluxo paramétrico e síntese da forma de onda amostrada.

Envelope: seção constante com ombros simétricos de função erro, largura
σ = edge/4, centrados em t = edge/2 e t = duration − edge/2.
"""

import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import interpolate, special

from errors import InvalidPulseError
from logging_config import get_pulse_logger

# Obtém o logger configurado para este módulo
logging = get_pulse_logger()

MIN_SAMPLES = 16


class FluxPulse(BaseModel):
    model_config = ConfigDict(frozen=True)

    amplitude: float = Field(ge=0, description='ε (Φ0)')
    mod_freq: float = Field(ge=0, description='ω_p/2π (MHz)')
    duration: float = Field(ge=0, description='ns, incluindo as bordas')
    edge: float = Field(default=0.0, ge=0, description='subida/descida (ns)')
    carrier_phase: float = 0.0
    dc_bias: float = 0.0

    @model_validator(mode='after')
    def _check_edges(self):
        if self.duration < 2.0 * self.edge:
            raise InvalidPulseError(f'duração {self.duration} ns menor que 2×borda ({self.edge} ns)')
        return self

    @property
    def sigma(self):
        return self.edge / 4.0


class Waveform(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sample_rate: float      # amostras/ns
    samples: np.ndarray     # Φ0

    @property
    def times(self):
        return np.arange(len(self.samples)) / self.sample_rate

    def interpolator(self):
        """Spline cúbica do fluxo amostrado, para o integrador avaliar entre amostras."""
        return interpolate.CubicSpline(self.times, self.samples, extrapolate=True)

    def to_frame(self):
        return pd.DataFrame({'time_ns': self.times, 'flux_phi0': self.samples})


def envelope(pulse, t):
    """E(t) em Φ0, zero fora de [0, duration]."""
    t = np.asarray(t, dtype=float)
    inside = (t >= 0.0) & (t <= pulse.duration)
    if pulse.edge == 0.0:
        values = np.where(inside, pulse.amplitude, 0.0)
    else:
        scale = math.sqrt(2.0) * pulse.sigma
        rise = special.erf((t - pulse.edge / 2.0) / scale)
        fall = special.erf((t - (pulse.duration - pulse.edge / 2.0)) / scale)
        values = np.where(inside, 0.5 * pulse.amplitude * (rise - fall), 0.0)
    return float(values) if values.ndim == 0 else values


def flux_at(pulse, t):
    """Φ(t) = Φ_dc + E(t)·cos(2π ω_p t + φ), t em ns."""
    t = np.asarray(t, dtype=float)
    carrier = np.cos(2.0 * np.pi * (pulse.mod_freq / 1000.0) * t + pulse.carrier_phase)
    return pulse.dc_bias + envelope(pulse, t) * carrier


def synthesize(pulse, sample_rate):
    """Amostra o pulso: amostra k = dc_bias + E(t_k)·cos(2π ω_p t_k + fase)."""
    n_samples = int(round(pulse.duration * sample_rate))
    if n_samples < MIN_SAMPLES:
        raise InvalidPulseError(f'{n_samples} amostras: são necessárias pelo menos {MIN_SAMPLES}')
    times = np.arange(n_samples) / sample_rate
    logging.debug('Forma de onda sintetizada: %d amostras a %.1f amostras/ns', n_samples, sample_rate)
    return Waveform(sample_rate=sample_rate, samples=flux_at(pulse, times))


def idle_pulse(duration, dc_bias=0.0):
    """Pulso de amplitude nula (evolução livre no ponto de estacionamento)."""
    return FluxPulse(amplitude=0.0, mod_freq=0.0, duration=duration, edge=0.0, dc_bias=dc_bias)
