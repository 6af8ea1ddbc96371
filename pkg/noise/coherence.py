"""
Experimentos de coerência de Monte Carlo sob modulação de fluxo.

Ramsey: o tempo de evolução livre é substituído por um pulso modulado de
frequência fixa; cada disparo acumula a fase de uma realização de ruído
própria e termina numa medida projetiva. T1: decaimento de |1> com o
multiplicador de deriva do índice de experimento, propagado disparo a disparo
sob o fluxo modulado ruidoso.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize, stats

import config
from device import frequency_at_flux, pure_dephasing_time
from dynamics import DecoherenceRates, excitation_survival
from errors import FitError, InvalidInputError, NoSweetSpotError
from logging_config import get_noise_logger
from .noiseProfile import noise_realization

# Obtém o logger configurado para este módulo
logging = get_noise_logger()

DEFAULT_NOISE_SAMPLE_RATE = 1.0     # amostras/ns
T1_NOISE_SAMPLE_RATE = 0.5          # amostras/ns; acima do dobro de ω_p nas frequências usadas
REFERENCE_SWEET_SPOT = 0.6          # Φ0, mínimo de δω_T usado para escalar a amplitude bruta
MIN_SPAN_FACTOR = 2.0


class CoherenceFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    value_us: float
    ci_low_us: float
    ci_high_us: float
    model: str
    parameters: dict = Field(default_factory=dict)
    residual_rms: float = 0.0


def _ramsey_exponential(t, amplitude, t2, freq, phase, offset):
    return amplitude * np.exp(-t / t2) * np.cos(2 * np.pi * freq * t + phase) + offset


def _ramsey_gaussian(t, amplitude, t2, freq, phase, offset):
    return amplitude * np.exp(-(t / t2) ** 2) * np.cos(2 * np.pi * freq * t + phase) + offset


def _relaxation(t, amplitude, t1, offset):
    return amplitude * np.exp(-t / t1) + offset


def _z_value():
    return float(stats.norm.ppf(0.5 + config.CONFIDENCE_LEVEL / 2.0))


def _curve_fit(model, delays, probabilities, p0, bounds, name):
    try:
        params, covariance = optimize.curve_fit(model, delays, probabilities, p0=p0, bounds=bounds, maxfev=20000)
    except (RuntimeError, ValueError) as e:
        residuals = probabilities - np.mean(probabilities)
        raise FitError(f'ajuste {name} não convergiu: {e}', residuals=residuals) from e
    residuals = probabilities - model(delays, *params)
    if not np.all(np.isfinite(covariance)):
        raise FitError(f'covariância do ajuste {name} indefinida', residuals=residuals)
    return params, covariance, residuals


def fit_ramsey(delays, probabilities, detuning_mhz, model='exponential'):
    """Ajusta A·e^{−t/T2*}·cos(2πft + φ) + B (ou decaimento gaussiano). Tempos em ns."""
    delays = np.asarray(delays, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    function = {'exponential': _ramsey_exponential, 'gaussian': _ramsey_gaussian}.get(model)
    if function is None:
        raise InvalidInputError(f'modelo de decaimento desconhecido: {model}')

    span = delays.max() - delays.min()
    p0 = [0.5, span / 3.0, detuning_mhz * 1e-3, 0.0, 0.5]
    bounds = ([0.0, 1e-3, 0.0, -np.pi, 0.0], [1.0, 100.0 * span, 10.0 * detuning_mhz * 1e-3 + 1e-6, np.pi, 1.0])
    params, covariance, residuals = _curve_fit(function, delays, probabilities, p0, bounds, 'Ramsey')
    t2, sigma = params[1], math.sqrt(covariance[1, 1])
    half_width = _z_value() * sigma
    return CoherenceFit(value_us=t2 / 1000.0, ci_low_us=(t2 - half_width) / 1000.0,
                        ci_high_us=(t2 + half_width) / 1000.0, model=model,
                        parameters={'amplitude': params[0], 'frequency_mhz': params[2] * 1000.0,
                                    'phase': params[3], 'offset': params[4]},
                        residual_rms=float(np.sqrt(np.mean(residuals ** 2))))


def fit_t1(delays, probabilities):
    """Ajusta A·e^{−t/T1} + B. Tempos em ns."""
    delays = np.asarray(delays, dtype=float)
    probabilities = np.asarray(probabilities, dtype=float)
    span = delays.max() - delays.min()
    p0 = [1.0, span / 3.0, 0.0]
    bounds = ([0.0, 1e-3, -0.5], [1.5, 100.0 * span, 0.5])
    params, covariance, residuals = _curve_fit(_relaxation, delays, probabilities, p0, bounds, 'T1')
    t1, sigma = params[1], math.sqrt(covariance[1, 1])
    half_width = _z_value() * sigma
    return CoherenceFit(value_us=t1 / 1000.0, ci_low_us=(t1 - half_width) / 1000.0,
                        ci_high_us=(t1 + half_width) / 1000.0, model='exponential',
                        parameters={'amplitude': params[0], 'offset': params[2]},
                        residual_rms=float(np.sqrt(np.mean(residuals ** 2))))


def _check_span(delays, expected_us, name):
    if math.isfinite(expected_us) and max(delays) < MIN_SPAN_FACTOR * expected_us * 1000.0:
        raise InvalidInputError(f'atrasos até {max(delays):.0f} ns não cobrem {MIN_SPAN_FACTOR}×{name} '
                                f'({expected_us} µs)')


def _ramsey_shot(spec, epsilon, omega_p, dc_bias, profile, sample_rate, max_delay, delay_index,
                 delays, t2_star_ns, detuning_mhz, seed_sequence):
    """Probabilidade de |0> por atraso para uma realização de ruído, seguida da medida projetiva."""
    noise_seed, measure_seed = seed_sequence.spawn(2)
    realization = noise_realization(profile, max_delay, sample_rate, noise_seed)
    times = realization.times
    carrier = np.cos(2 * np.pi * omega_p * 1e-3 * times)
    clean = dc_bias + epsilon * carrier
    noisy = clean + realization.flux_offset(carrier)
    excess_cycles = (frequency_at_flux(spec, noisy) - frequency_at_flux(spec, clean)) / sample_rate
    phase = 2 * np.pi * np.concatenate([[0.0], np.cumsum(excess_cycles)])[delay_index]

    envelope = np.exp(-delays / t2_star_ns) if math.isfinite(t2_star_ns) else np.ones_like(delays)
    probability = 0.5 * (1.0 + envelope * np.cos(2 * np.pi * detuning_mhz * 1e-3 * delays + phase))
    rng = np.random.default_rng(measure_seed)
    return rng.random(len(delays)) < probability


def simulate_ramsey_under_modulation(pair, epsilon, omega_p, profile, delays, shots, seed,
                                     detuning_mhz=None, sample_rate=DEFAULT_NOISE_SAMPLE_RATE,
                                     decay_model='exponential', max_workers=None):
    """
    T2* (µs) do transmon sintonizável modulado em ε a ω_p.

    A fase de cada disparo é 2π·Σ[f(Φ_ruidoso) − f(Φ_limpo)]·Δt; o decaimento
    intrínseco usa o T2* do dispositivo. Uma realização de ruído por disparo,
    lida no prefixo correspondente a cada atraso.
    """
    delays = np.asarray(delays, dtype=float)
    if shots < 1 or len(delays) < 5:
        raise InvalidInputError('são necessários pelo menos 1 disparo e 5 atrasos')
    spec = pair.tunable
    _check_span(delays, spec.t2_star, 'T2*')

    max_delay = float(delays.max())
    if detuning_mhz is None:
        detuning_mhz = 3.0e3 / max_delay
    delay_index = np.rint(delays * sample_rate).astype(int)
    children = np.random.SeedSequence(seed).spawn(shots)

    def run(child):
        return _ramsey_shot(spec, epsilon, omega_p, pair.dc_bias, profile, sample_rate, max_delay,
                            delay_index, delays, spec.t2_star * 1000.0, detuning_mhz, child)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        outcomes = np.array(list(executor.map(run, children)))
    probabilities = outcomes.mean(axis=0)

    fit = fit_ramsey(delays, probabilities, detuning_mhz, model=decay_model)
    logging.info('Ramsey ε=%.3f Φ0: T2*=%.2f µs [%.2f, %.2f]', epsilon, fit.value_us, fit.ci_low_us, fit.ci_high_us)
    return fit


def _t1_shot(pair, epsilon, omega_p, profile, rates, sample_rate, max_delay, delay_index, seed_sequence):
    """Ocupação de |1> do sintonizável por atraso para uma realização de ruído, seguida da medida projetiva."""
    noise_seed, measure_seed = seed_sequence.spawn(2)
    realization = noise_realization(profile, max_delay, sample_rate, noise_seed)
    carrier = np.cos(2 * np.pi * omega_p * 1e-3 * realization.times)
    noisy = pair.dc_bias + epsilon * carrier + realization.flux_offset(carrier)
    survival = excitation_survival(pair, noisy, sample_rate, rates, delay_index)
    rng = np.random.default_rng(measure_seed)
    return rng.random(len(delay_index)) < survival


def simulate_t1_under_modulation(pair, epsilon, omega_p, profile, delays, shots, seed, experiment_index=0,
                                 sample_rate=T1_NOISE_SAMPLE_RATE, max_workers=None):
    """
    T1 (µs) do transmon sintonizável sob modulação.

    Cada disparo prepara |01>, propaga a excitação sob o fluxo modulado com a
    sua realização de ruído e as taxas de relaxação do par (T1 escalado pela
    deriva do índice de experimento) e mede a ocupação em cada atraso.
    """
    delays = np.asarray(delays, dtype=float)
    if shots < 1 or len(delays) < 4:
        raise InvalidInputError('são necessários pelo menos 1 disparo e 4 atrasos')
    if not math.isfinite(pair.tunable.t1):
        raise InvalidInputError('T1 infinito não pode ser ajustado')
    multiplier = profile.t1_multiplier(experiment_index)
    rates = DecoherenceRates.from_pair(pair).scaled(t1_factor=multiplier)
    _check_span(delays, rates.t1_tunable, 'T1')

    max_delay = float(delays.max())
    delay_index = np.rint(delays * sample_rate).astype(int)
    children = np.random.SeedSequence(seed).spawn(shots)

    def run(child):
        return _t1_shot(pair, epsilon, omega_p, profile, rates, sample_rate, max_delay, delay_index, child)

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        outcomes = np.array(list(executor.map(run, children)))
    survivals = outcomes.mean(axis=0)

    fit = fit_t1(delays, survivals)
    logging.info('T1 ε=%.3f Φ0 (ω_p=%.1f MHz, deriva ×%.2f): %.2f µs [%.2f, %.2f]', epsilon, omega_p, multiplier,
                 fit.value_us, fit.ci_low_us, fit.ci_high_us)
    return fit


def coherence_sweep(pair, epsilons, omega_p, profile, ramsey_delays, t1_delays, shots, seed, max_workers=None):
    """Tabela ε, T1, T2*, Tφ com ICs; um fluxo de RNG independente por amplitude."""
    rows = []
    streams = np.random.SeedSequence(seed).spawn(len(epsilons))
    for epsilon, stream in zip(epsilons, streams):
        ramsey_seed, t1_seed = stream.spawn(2)
        t2 = simulate_ramsey_under_modulation(pair, float(epsilon), omega_p, profile, ramsey_delays, shots,
                                              ramsey_seed, max_workers=max_workers)
        t1 = simulate_t1_under_modulation(pair, float(epsilon), omega_p, profile, t1_delays, shots, t1_seed,
                                          max_workers=max_workers)
        rows.append({
            'epsilon': float(epsilon),
            't1_us': t1.value_us, 't1_ci_low': t1.ci_low_us, 't1_ci_high': t1.ci_high_us,
            't2_star_us': t2.value_us, 't2_ci_low': t2.ci_low_us, 't2_ci_high': t2.ci_high_us,
            'tphi_us': pure_dephasing_time(t1.value_us, min(t2.value_us, 2.0 * t1.value_us)),
        })
    return pd.DataFrame(rows)


def amplitude_scale_from_curve(raw_amplitudes, delta_omega_samples, reference=REFERENCE_SWEET_SPOT):
    """
    Fator Φ0/unidade bruta tal que o mínimo de δω_T caia em `reference` Φ0.

    O mínimo é localizado por ajuste quadrático local em torno do menor ponto.
    """
    raw = np.asarray(raw_amplitudes, dtype=float)
    samples = np.asarray(delta_omega_samples, dtype=float)
    order = np.argsort(raw)
    raw, samples = raw[order], samples[order]
    i = int(np.argmin(samples))
    if i == 0 or i == len(raw) - 1:
        raise NoSweetSpotError('curva sem mínimo interior: não é possível escalar a amplitude')

    lo, hi = max(0, i - 2), min(len(raw), i + 3)
    a, b, _ = np.polyfit(raw[lo:hi], samples[lo:hi], 2)
    if a <= 0:
        raise NoSweetSpotError('ajuste quadrático local sem concavidade positiva')
    raw_min = -b / (2.0 * a)
    if not raw[lo] <= raw_min <= raw[hi - 1]:
        raw_min = raw[i]
    return reference / raw_min
