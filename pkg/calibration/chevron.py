"""
Aquisição simulada do chevron |11> ↔ |02> e ajuste das fatias de duração.

População registrada: transmon fixo excitado (n_F ≥ 1) após o pulso
partindo de |11>.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, model_validator
from scipy import optimize

from device import effective_coupling
from dynamics import DensityMatrix, FIXED_EXCITED_INDICES, block_propagator, evolve, excitation_blocks, state_index
from errors import InvalidInputError, LowSignalError, FitError
from logging_config import get_calibration_logger
from pulse import FluxPulse

# Obtém o logger configurado para este módulo
logging = get_calibration_logger()

MIN_POINTS_PER_CYCLE = 6
MIN_SLICE_POINTS = 8
MIN_CONTRAST = 0.1


class ChevronDataset(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    epsilon: float
    edge: float = 0.0
    frequencies: np.ndarray     # MHz
    durations: np.ndarray       # ns
    populations: np.ndarray     # (n_freq, n_dur), P1 do transmon fixo
    coarse_grid: bool = False

    @model_validator(mode='after')
    def _check_grid(self):
        if self.populations.shape != (len(self.frequencies), len(self.durations)):
            raise InvalidInputError(f'matriz de populações {self.populations.shape} não corresponde à grade '
                                    f'({len(self.frequencies)}, {len(self.durations)})')
        if np.any(self.populations < -1e-9) or np.any(self.populations > 1 + 1e-9):
            raise InvalidInputError('populações fora de [0, 1]')
        return self

    def slice_at(self, frequency):
        """(durações, populações) da frequência da grade mais próxima."""
        row = int(np.argmin(np.abs(self.frequencies - frequency)))
        return self.durations, self.populations[row]

    def to_frame(self):
        freq, dur = np.meshgrid(self.frequencies, self.durations, indexing='ij')
        return pd.DataFrame({'frequency_mhz': freq.ravel(), 'duration_ns': dur.ravel(),
                             'population': self.populations.ravel()})

    @classmethod
    def from_frame(cls, frame, epsilon, edge=0.0):
        frequencies = np.unique(frame['frequency_mhz'].to_numpy())
        durations = np.unique(frame['duration_ns'].to_numpy())
        table = frame.pivot(index='frequency_mhz', columns='duration_ns', values='population')
        table = table.reindex(index=frequencies, columns=durations)
        return cls(epsilon=epsilon, edge=edge, frequencies=frequencies, durations=durations,
                   populations=table.to_numpy())


class SliceFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    frequency: float        # MHz (ω_p da fatia)
    rabi_freq: float        # MHz
    t_return: float         # ns
    contrast: float
    phase: float
    offset: float


def _fixed_excited_population_block(indices, unitary_block):
    """P(n_F ≥ 1) partindo de |11> a partir do propagador do bloco de 2 excitações."""
    start = list(indices).index(state_index('11'))
    amplitudes = unitary_block[:, start]
    mask = np.isin(indices, FIXED_EXCITED_INDICES)
    return float(np.sum(np.abs(amplitudes[mask]) ** 2))


def _point(pair, epsilon, frequency, duration, edge, rates, sample_rate, indices):
    pulse = FluxPulse(amplitude=epsilon, mod_freq=frequency, duration=duration, edge=min(edge, duration / 2.0),
                      dc_bias=pair.dc_bias)
    if rates is None or rates.is_zero:
        block = block_propagator(pair, pulse, indices, sample_rate)
        return _fixed_excited_population_block(indices, block)
    final = evolve(pair, pulse, DensityMatrix.from_label('11'), rates, sample_rate)
    return float(np.sum(final.populations()[list(FIXED_EXCITED_INDICES)]))


def run_chevron(pair, epsilon, freq_grid, duration_grid, rates=None, edge=0.0, sample_rate=None, max_workers=None):
    """
    Evolui |11> em cada ponto (ω_p, duração) e registra a população excitada do fixo.

    Avisa (e marca `coarse_grid`) quando a grade de duração tem menos de 6 pontos
    por ciclo de Rabi esperado no contorno de ressonância.
    """
    frequencies = np.asarray(freq_grid, dtype=float)
    durations = np.asarray(duration_grid, dtype=float)
    if len(frequencies) == 0 or len(durations) == 0:
        raise InvalidInputError('grade de chevron vazia')

    coarse = False
    if len(durations) > 1:
        g_eff = abs(effective_coupling(pair, epsilon, float(np.median(frequencies)), mode='bessel'))
        if g_eff > 0:
            period = 1000.0 / (2.0 * g_eff)
            points_per_cycle = period / float(np.min(np.diff(np.sort(durations))))
            if points_per_cycle < MIN_POINTS_PER_CYCLE:
                coarse = True
                logging.warning('Grade de duração grossa: %.1f pontos por ciclo de Rabi (mínimo %d)',
                                points_per_cycle, MIN_POINTS_PER_CYCLE)

    indices = excitation_blocks()[2]
    grid = [(f, d) for f in frequencies for d in durations]

    inicio = time.time()
    logging.info('Chevron ε=%.3f Φ0: %d×%d pontos', epsilon, len(frequencies), len(durations))
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        values = list(executor.map(lambda fd: _point(pair, epsilon, fd[0], fd[1], edge, rates, sample_rate, indices),
                                   grid))
    logging.info('Chevron concluído em %.2f s', time.time() - inicio)

    populations = np.clip(np.array(values).reshape(len(frequencies), len(durations)), 0.0, 1.0)
    return ChevronDataset(epsilon=epsilon, edge=edge, frequencies=frequencies, durations=durations,
                          populations=populations, coarse_grid=coarse)


def _cosine(t, amplitude, omega, phase, offset):
    return amplitude * np.cos(omega * t + phase) + offset


def _initial_omega(durations, populations):
    """Frequência angular dominante (rad/ns) por FFT com preenchimento de zeros."""
    step = float(np.median(np.diff(durations)))
    centered = populations - populations.mean()
    n_fft = 16 * len(populations)
    spectrum = np.abs(np.fft.rfft(centered, n=n_fft))
    freqs = np.fft.rfftfreq(n_fft, d=step)
    peak = int(np.argmax(spectrum[1:])) + 1
    return 2.0 * math.pi * freqs[peak]


def fit_cosine(durations, populations):
    """Ajuste de P(t) = A·cos(Ωt + φ0) + C, com A ≥ 0. Devolve (A, Ω, φ0, C)."""
    durations = np.asarray(durations, dtype=float)
    populations = np.asarray(populations, dtype=float)
    omega0 = _initial_omega(durations, populations)

    design = np.column_stack([np.cos(omega0 * durations), np.sin(omega0 * durations), np.ones_like(durations)])
    (a, b, c), *_ = np.linalg.lstsq(design, populations, rcond=None)
    amplitude0 = math.hypot(a, b)
    phase0 = math.atan2(-b, a)

    p0 = [amplitude0, omega0, phase0, c]
    bounds = ([0.0, 0.2 * omega0, phase0 - math.pi, -1.0], [2.0, 5.0 * omega0, phase0 + math.pi, 2.0])
    try:
        params, _ = optimize.curve_fit(_cosine, durations, populations, p0=p0, bounds=bounds, maxfev=20000)
    except (RuntimeError, ValueError) as e:
        raise FitError(f'ajuste de cosseno não convergiu: {e}',
                       residuals=populations - _cosine(durations, *p0)) from e
    return params


def fit_slice(dataset, freq):
    """
    Ajusta a fatia de frequência `freq`: (Rabi em MHz, primeiro retorno completo em ns, contraste).

    O retorno completo é o primeiro t > 0 em que Ωt + φ0 ≡ 0 (mod 2π).
    """
    durations, populations = dataset.slice_at(freq)
    if len(durations) < MIN_SLICE_POINTS:
        raise InvalidInputError(f'fatia com {len(durations)} pontos; mínimo {MIN_SLICE_POINTS}')
    if np.ptp(populations) < MIN_CONTRAST:
        raise LowSignalError(f'contraste {np.ptp(populations):.3f} abaixo de {MIN_CONTRAST}',
                             residuals=populations - populations.mean())

    amplitude, omega, phase, offset = fit_cosine(durations, populations)
    contrast = 2.0 * amplitude
    if contrast < MIN_CONTRAST:
        raise LowSignalError(f'contraste ajustado {contrast:.3f} abaixo de {MIN_CONTRAST}',
                             residuals=populations - _cosine(durations, amplitude, omega, phase, offset))

    t_return = ((-phase) % (2.0 * math.pi)) / omega
    if t_return < 1e-6 * (2.0 * math.pi / omega):
        t_return += 2.0 * math.pi / omega
    row = int(np.argmin(np.abs(dataset.frequencies - freq)))
    return SliceFit(frequency=float(dataset.frequencies[row]), rabi_freq=1000.0 * omega / (2.0 * math.pi),
                    t_return=float(t_return), contrast=float(contrast), phase=float(phase), offset=float(offset))


def resonance_from_chevron(dataset):
    """
    Frequência de ressonância e g_eff a partir das fatias ajustáveis:
    Ω_R² = (2·(ω_p − ω_res))² + 4·g_eff², ajustado como parábola em ω_p.
    """
    freqs, rabi = [], []
    for freq in dataset.frequencies:
        try:
            fit = fit_slice(dataset, freq)
        except (LowSignalError, FitError):
            continue
        freqs.append(freq)
        rabi.append(fit.rabi_freq)
    if len(freqs) < 3:
        raise FitError('menos de 3 fatias ajustáveis para localizar a ressonância')
    a, b, c = np.polyfit(freqs, np.square(rabi), 2)
    if a <= 0:
        raise FitError('parábola de Rabi sem mínimo')
    resonance = -b / (2.0 * a)
    minimum = c - b * b / (4.0 * a)
    return float(resonance), float(math.sqrt(max(minimum, 0.0)) / 2.0)
