"""
Ruído dos instrumentos de fluxo: piso branco, ruído 1/f na amplitude,
tons espúrios e deriva de T1 ao longo do experimento.

Conversão de potência para fluxo: S_Φ (Φ0²/Hz) = κ · S_P (mW/Hz), com κ em
`psd_to_flux` (padrão config.DEFAULT_PSD_TO_FLUX).
"""

import math
import re

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from scipy import integrate

import config
from errors import InvalidInputError, ParseError
from logging_config import get_noise_logger

# Obtém o logger configurado para este módulo
logging = get_noise_logger()

SPUR_THRESHOLD_DB = 10.0


def dbm_to_mw(dbm):
    return 10.0 ** (np.asarray(dbm, dtype=float) / 10.0)


def mw_to_dbm(mw):
    return 10.0 * np.log10(mw)


class NoiseProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    white_floor: float | None = Field(default=None, description='dBm/Hz; None desliga o piso branco')
    psd_to_flux: float = Field(default=config.DEFAULT_PSD_TO_FLUX, ge=0, description='Φ0²/Hz por mW/Hz')
    one_over_f_amp: float = Field(default=0.0, ge=0, description='A_Φ em µΦ0/√Hz a 1 Hz')
    spurs: list[tuple[float, float]] = Field(default_factory=list, description='(MHz, dBm)')
    t1_drift: list[tuple[float, float]] = Field(default_factory=list,
                                              description='(índice de relógio inicial, multiplicador de T1)')
    experiment_time_s: float = Field(default=config.DEFAULT_EXPERIMENT_TIME_S, gt=0)

    @field_validator('t1_drift')
    @classmethod
    def _sorted_drift(cls, value):
        starts = [start for start, _ in value]
        if starts != sorted(starts):
            raise InvalidInputError('t1_drift deve estar ordenado pelo índice de experimento')
        if any(multiplier <= 0 for _, multiplier in value):
            raise InvalidInputError('multiplicadores de T1 devem ser positivos')
        return value

    @property
    def white_flux_psd(self):
        """S_Φ do piso branco em Φ0²/Hz (zero sem piso)."""
        if self.white_floor is None:
            return 0.0
        return self.psd_to_flux * float(dbm_to_mw(self.white_floor))

    def raised(self, delta_db):
        """Cópia com o piso branco deslocado de `delta_db`."""
        if self.white_floor is None:
            raise InvalidInputError('perfil sem piso branco não pode ser deslocado')
        return self.model_copy(update={'white_floor': self.white_floor + delta_db})

    def t1_multiplier(self, experiment_index):
        multiplier = 1.0
        for start, value in self.t1_drift:
            if experiment_index >= start:
                multiplier = value
        return multiplier

    def quasi_static_variance(self, duration_ns):
        """Variância (Φ0²) de A_Φ²/f integrado em [1/t_experimento, 1/duração]."""
        if self.one_over_f_amp == 0.0 or duration_ns <= 0.0:
            return 0.0
        f_low = 1.0 / self.experiment_time_s
        f_high = 1.0 / (duration_ns * 1e-9)
        if f_high <= f_low:
            return 0.0
        amplitude = self.one_over_f_amp * 1e-6
        return amplitude ** 2 * math.log(f_high / f_low)


class InstrumentPSD(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    frequencies: np.ndarray     # MHz
    power: np.ndarray           # dBm/Hz

    @model_validator(mode='after')
    def _check_grid(self):
        if self.frequencies.shape != self.power.shape or self.frequencies.ndim != 1:
            raise InvalidInputError('grade de frequência e potência com formatos diferentes')
        if len(self.frequencies) < 2:
            raise InvalidInputError('PSD precisa de pelo menos 2 pontos')
        if np.any(np.diff(self.frequencies) <= 0):
            raise InvalidInputError('grade de frequência não é estritamente crescente')
        return self

    def to_frame(self):
        return pd.DataFrame({'frequency_mhz': self.frequencies, 'power_dbm_hz': self.power})


def _is_number(text):
    try:
        float(text)
    except ValueError:
        return False
    return True


def load_psd(path):
    """
    Lê um CSV de duas colunas (frequência MHz, potência dBm/Hz).

    Aceita um cabeçalho opcional antes dos dados e linhas de comentário '#'.
    Linhas malformadas geram ParseError com o número da linha no arquivo.
    """
    try:
        raw = pd.read_csv(path, header=None, names=['frequency', 'power'], dtype=str, keep_default_na=False,
                          skip_blank_lines=False, skipinitialspace=True)
    except pd.errors.ParserError as e:
        match = re.search(r'line (\d+)', str(e))
        raise ParseError(f'CSV de PSD malformado: {e}', line=int(match.group(1)) if match else None) from e
    except pd.errors.EmptyDataError as e:
        raise ParseError('arquivo de PSD vazio', line=1) from e

    frequencies, power = [], []
    header_seen = False
    for row_index, cells in enumerate(raw.itertuples(index=False, name=None)):
        line = row_index + 1
        # linhas em branco chegam como NaN
        freq_text, power_text = (cell.strip() if isinstance(cell, str) else '' for cell in cells)
        if (not freq_text and not power_text) or freq_text.startswith('#'):
            continue
        if not frequencies and not header_seen and not _is_number(freq_text):
            header_seen = True
            continue
        if not (_is_number(freq_text) and _is_number(power_text)):
            raise ParseError(f'valores não numéricos: {freq_text!r}, {power_text!r}', line=line)
        frequencies.append(float(freq_text))
        power.append(float(power_text))

    psd = InstrumentPSD(frequencies=np.array(frequencies), power=np.array(power))
    logging.info('PSD carregada de %s: %d pontos', path, len(frequencies))
    return psd


def psd_summary(psd, spur_threshold_db=SPUR_THRESHOLD_DB):
    """
    Piso branco (média linear longe dos espúrios), lista de espúrios
    (picos > limiar acima da mediana) e potência integrada na banda.
    """
    median = float(np.median(psd.power))
    spur_mask = psd.power > median + spur_threshold_db
    floor_mw = dbm_to_mw(psd.power[~spur_mask])
    white_floor = float(mw_to_dbm(np.mean(floor_mw)))

    spurs = []
    index = 0
    while index < len(psd.power):
        if not spur_mask[index]:
            index += 1
            continue
        end = index
        while end + 1 < len(psd.power) and spur_mask[end + 1]:
            end += 1
        peak = index + int(np.argmax(psd.power[index:end + 1]))
        spurs.append({'frequency_mhz': float(psd.frequencies[peak]), 'power_dbm_hz': float(psd.power[peak])})
        index = end + 1

    integrated_mw = float(integrate.trapezoid(dbm_to_mw(psd.power), psd.frequencies * 1e6))
    return {
        'white_floor_dbm_hz': white_floor,
        'spurs': spurs,
        'integrated_power_dbm': float(mw_to_dbm(integrated_mw)) if integrated_mw > 0 else None,
        'band_mhz': [float(psd.frequencies[0]), float(psd.frequencies[-1])],
        'points': int(len(psd.frequencies)),
    }


def profile_from_psd(psd, one_over_f_amp=0.0, psd_to_flux=None):
    """NoiseProfile com o piso e os espúrios extraídos da PSD medida."""
    summary = psd_summary(psd)
    return NoiseProfile(white_floor=summary['white_floor_dbm_hz'],
                        psd_to_flux=config.DEFAULT_PSD_TO_FLUX if psd_to_flux is None else psd_to_flux,
                        one_over_f_amp=one_over_f_amp,
                        spurs=[(s['frequency_mhz'], s['power_dbm_hz']) for s in summary['spurs']])


class NoiseRealization(BaseModel):
    """Uma realização por disparo: traço branco + desvios quase estáticos (Φ0)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    sample_rate: float
    white: np.ndarray
    amplitude_offset: float = 0.0
    dc_offset: float = 0.0

    @property
    def times(self):
        return np.arange(len(self.white)) / self.sample_rate

    def flux_offset(self, carrier):
        """δΦ(t_k) = branco_k + δΦ_dc + δε·carrier_k, com carrier = cos(ω_p t_k + φ)."""
        return self.white + self.dc_offset + self.amplitude_offset * np.asarray(carrier)


def noise_realization(profile, duration, sample_rate, seed):
    """
    Gera o ruído de fluxo de um disparo.

    Branco: amostras gaussianas independentes com variância S_Φ·f_s/2.
    1/f: desvio quase estático por disparo em ε e no DC, variância de
    A_Φ²/f integrado em [1/t_experimento, 1/duração]. Espúrios entram como
    tons de fase aleatória somados ao traço branco.
    """
    rng = np.random.default_rng(seed)
    n_samples = int(round(duration * sample_rate))
    times = np.arange(n_samples) / sample_rate

    variance = profile.white_flux_psd * sample_rate * 1e9 / 2.0
    white = rng.normal(0.0, math.sqrt(variance), n_samples) if variance > 0 else np.zeros(n_samples)

    for freq_mhz, power_dbm in profile.spurs:
        amplitude = math.sqrt(2.0 * profile.psd_to_flux * float(dbm_to_mw(power_dbm)))
        white = white + amplitude * np.cos(2 * np.pi * freq_mhz * 1e-3 * times + rng.uniform(0, 2 * np.pi))

    sigma_quasi = math.sqrt(profile.quasi_static_variance(duration))
    amplitude_offset, dc_offset = (rng.normal(0.0, sigma_quasi, 2) if sigma_quasi > 0 else (0.0, 0.0))
    return NoiseRealization(sample_rate=sample_rate, white=white,
                            amplitude_offset=float(amplitude_offset), dc_offset=float(dc_offset))
