"""
iRB repetido ao longo do tempo e previsão limitada por coerência.

Cada experimento mede dois decaimentos de referência e dois intercalados com
as sequências dos quatro embaralhadas num mesmo relógio; os pares repetidos
passam pelo teste de estabilidade e, quando aceitos, são agrupados por soma
das contagens antes da estimativa de infidelidade.
"""

import itertools
import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

import config
from device import pure_dephasing_time
from dynamics import DecoherenceRates, average_gate_fidelity, gate_superoperator, ideal_cz_unitary
from errors import InvalidInputError
from logging_config import get_benchmarking_logger
from noise import NoiseProfile, simulate_ramsey_under_modulation, simulate_t1_under_modulation
from .rbAnalysis import bootstrap_ci, ecdf_with_band, fit_decay, irb_estimate, stability_test
from .rbSimulation import RBConfig, run_rb

# Obtém o logger configurado para este módulo
logging = get_benchmarking_logger()

MONITOR_POINTS = 41


class IRBProtocol(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    rb: RBConfig = Field(default_factory=RBConfig)
    gate_channels: dict[str, Any]
    channel_factory: Callable[[float], dict] | None = None
    replicants: int = Field(default=config.BOOTSTRAP_REPLICANTS, ge=10)
    alpha: float = Field(default=config.STABILITY_ALPHA, gt=0, lt=1)
    confidence: float = Field(default=config.CONFIDENCE_LEVEL, gt=0, lt=1)
    monitor_pair: Any = None        # CoupledPair para as sondas de T1/T2*; None desliga
    monitor_shots: int = Field(default=100, ge=1)


class ExperimentRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    index: int
    infidelity: float
    ci_low: float
    ci_high: float
    avg_fidelity: float
    p_ref: float
    p_int: float
    reference_p_value: float
    interleaved_p_value: float
    discarded: bool
    t1_multiplier: float = 1.0
    t1_monitor_us: float | None = None
    t2_monitor_us: float | None = None


class RepeatedIRBResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    records: list[ExperimentRecord]
    ecdf_all: Any
    ecdf_kept: Any = None

    @property
    def discard_fraction(self):
        return sum(r.discarded for r in self.records) / len(self.records)

    def count_below(self, threshold, kept_only=True):
        return sum(1 for r in self.records if r.infidelity < threshold and not (kept_only and r.discarded))

    def to_frame(self):
        return pd.DataFrame([r.model_dump() for r in self.records])

    def summary(self):
        return {
            'experiments': len(self.records),
            'discard_fraction': self.discard_fraction,
            'below_1pct': self.count_below(0.01),
            'below_2pct': self.count_below(0.02),
            'below_1pct_all': self.count_below(0.01, kept_only=False),
            'below_2pct_all': self.count_below(0.02, kept_only=False),
        }


def _coherence_monitor(pair, multiplier, shots, seed):
    """T1 e T2* do sintonizável com o T1 escalado pela deriva (Tφ inalterado)."""
    tunable = pair.tunable
    t1 = tunable.t1 * multiplier
    tphi = pure_dephasing_time(tunable.t1, tunable.t2_star)
    t2_star = 1.0 / (1.0 / (2.0 * t1) + (0.0 if math.isinf(tphi) else 1.0 / tphi))
    monitored = pair.with_coherence(t1, t2_star, pair.fixed.t1, pair.fixed.t2_star)
    t1_seed, t2_seed = seed.spawn(2)
    quiet = NoiseProfile()
    t1_fit = simulate_t1_under_modulation(monitored, 0.0, 0.0, quiet, np.linspace(0.0, 5000.0 * t1, MONITOR_POINTS),
                                          shots, t1_seed)
    t2_fit = simulate_ramsey_under_modulation(monitored, 0.0, 0.0, quiet, np.linspace(0.0, 3000.0 * t2_star, MONITOR_POINTS),
                                              shots, t2_seed)
    return t1_fit.value_us, t2_fit.value_us


def _single_experiment(protocol, index, drift, seed, max_workers):
    scramble_seed, ref_a_seed, ref_b_seed, int_a_seed, int_b_seed, stab_seed, boot_seed, monitor_seed = seed.spawn(8)
    reference = protocol.rb.model_copy(update={'interleaved': False})
    interleaved = protocol.rb.model_copy(update={'interleaved': True})

    per_decay = len(reference.lengths) * reference.sequences_per_length
    order = np.random.default_rng(scramble_seed).permutation(4 * per_decay)
    clocks = (index + order / (4.0 * per_decay)).reshape(4, per_decay)

    runs = []
    for decay_config, decay_seed, clock in zip((reference, reference, interleaved, interleaved),
                                               (ref_a_seed, ref_b_seed, int_a_seed, int_b_seed), clocks):
        runs.append(run_rb(decay_config, protocol.gate_channels, decay_seed, drift=drift,
                           channel_factory=protocol.channel_factory, clock=clock, max_workers=max_workers))
    ref_a, ref_b, int_a, int_b = runs

    ref_stab_seed, int_stab_seed = stab_seed.spawn(2)
    ref_stability = stability_test(ref_a, ref_b, protocol.replicants, ref_stab_seed, protocol.alpha)
    int_stability = stability_test(int_a, int_b, protocol.replicants, int_stab_seed, protocol.alpha)
    discarded = not (ref_stability.passed and int_stability.passed)

    pooled_ref, pooled_int = ref_a.pooled(ref_b), int_a.pooled(int_b)
    ref_boot_seed, int_boot_seed = boot_seed.spawn(2)
    ref_boot = bootstrap_ci(pooled_ref, protocol.replicants, ref_boot_seed, protocol.confidence)
    int_boot = bootstrap_ci(pooled_int, protocol.replicants, int_boot_seed, protocol.confidence)
    estimate = irb_estimate(fit_decay(pooled_ref), fit_decay(pooled_int), reference_samples=ref_boot.samples,
                            interleaved_samples=int_boot.samples, confidence=protocol.confidence)

    multiplier = 1.0 if drift is None else drift.t1_multiplier(index)
    t1_monitor = t2_monitor = None
    if protocol.monitor_pair is not None:
        t1_monitor, t2_monitor = _coherence_monitor(protocol.monitor_pair, multiplier, protocol.monitor_shots, monitor_seed)

    return ExperimentRecord(index=index, infidelity=estimate.infidelity, ci_low=estimate.infidelity_ci[0],
                            ci_high=estimate.infidelity_ci[1], avg_fidelity=estimate.avg_fidelity,
                            p_ref=estimate.p_ref, p_int=estimate.p_int,
                            reference_p_value=ref_stability.p_value, interleaved_p_value=int_stability.p_value,
                            discarded=discarded, t1_multiplier=multiplier,
                            t1_monitor_us=t1_monitor, t2_monitor_us=t2_monitor)


def run_repeated_irb(protocol, n_experiments, drift=None, seed=None, max_workers=None):
    """
    Série temporal de `n_experiments` estimativas de iRB.

    O índice de relógio do experimento e cobre [e, e+1); `drift.t1_drift`
    define o multiplicador de T1 em cada trecho. Devolve os registros e as
    ECDFs com e sem a pós-seleção pelo teste de estabilidade.
    """
    if n_experiments < 1:
        raise InvalidInputError('é necessário pelo menos 1 experimento')
    streams = np.random.SeedSequence(seed).spawn(n_experiments)

    inicio = time.time()
    logging.info('=' * 60)
    logging.info('iRB repetido: %d experimentos', n_experiments)
    records = []
    for index, stream in enumerate(streams):
        record = _single_experiment(protocol, index, drift, stream, max_workers)
        logging.info('Experimento %d: r=%.4f [%.4f, %.4f]%s', index, record.infidelity, record.ci_low,
                     record.ci_high, ' (descartado)' if record.discarded else '')
        records.append(record)
    logging.info('iRB repetido concluído em %.2f s', time.time() - inicio)
    logging.info('=' * 60)

    ecdf_all = ecdf_with_band([r.infidelity for r in records], protocol.confidence)
    kept = [r.infidelity for r in records if not r.discarded]
    ecdf_kept = ecdf_with_band(kept, protocol.confidence) if kept else None
    return RepeatedIRBResult(records=records, ecdf_all=ecdf_all, ecdf_kept=ecdf_kept)


class CoherencePrediction(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    min_fidelity: float
    max_fidelity: float
    corners: pd.DataFrame


RATE_KEYS = ('t1_tunable', 't2_tunable', 't1_fixed', 't2_fixed')


def coherence_limited_prediction(pair, calibration, rate_ranges, sample_rate=None, max_workers=None):
    """
    Intervalo da fidelidade média do CZ calibrado sob os tempos de coerência medidos.

    `rate_ranges` mapeia t1_tunable, t2_tunable, t1_fixed e t2_fixed (µs) para
    (mínimo, máximo); a fidelidade é avaliada nos 16 vértices.
    """
    missing = set(RATE_KEYS) - set(rate_ranges)
    if missing:
        raise InvalidInputError(f'faixas de coerência ausentes: {sorted(missing)}')
    for key in RATE_KEYS:
        low, high = rate_ranges[key]
        if not 0.0 < low <= high:
            raise InvalidInputError(f'faixa inválida para {key}: {rate_ranges[key]}')

    pulse = calibration.pulse()
    target = ideal_cz_unitary()

    def corner(values):
        t1_t, t2_t, t1_f, t2_f = values
        rates = DecoherenceRates(t1_tunable=t1_t, tphi_tunable=pure_dephasing_time(t1_t, t2_t),
                                 t1_fixed=t1_f, tphi_fixed=pure_dephasing_time(t1_f, t2_f))
        channel = gate_superoperator(pair, pulse, rates, frame_corrections=calibration, sample_rate=sample_rate)
        return {**dict(zip(RATE_KEYS, values)), 'fidelity': average_gate_fidelity(channel, target),
                'leakage': channel.mean_leakage}

    combinations = list(itertools.product(*(rate_ranges[key] for key in RATE_KEYS)))
    inicio = time.time()
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        rows = list(executor.map(corner, combinations))
    corners = pd.DataFrame(rows)
    logging.info('Previsão limitada por coerência: F̄ em [%.4f, %.4f] (%.2f s)', corners['fidelity'].min(),
                 corners['fidelity'].max(), time.time() - inicio)
    return CoherencePrediction(min_fidelity=float(corners['fidelity'].min()),
                               max_fidelity=float(corners['fidelity'].max()), corners=corners)
