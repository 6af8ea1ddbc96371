"""
Benchmarking aleatorizado de Cliffords de dois qubits (padrão e intercalado com CZ).

Cada sequência é composta no formalismo de PTM: cada Clifford vira a sua
compilação nativa, com o canal ruidoso do CZ em cada instância e o canal
opcional '1Q' após cada camada de rotações. A sobrevivência medida é a
população de |00>, com erro de atribuição e contagens binomiais.
"""

import threading
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import config
from dynamics import pauli_transfer_matrix, unitary_channel
from errors import InvalidInputError
from logging_config import get_benchmarking_logger
from .clifford import (GROUP_ORDER, clifford_compose, clifford_cz, clifford_from_index, clifford_identity,
                       clifford_invert, compile_to_native)

# Obtém o logger configurado para este módulo
logging = get_benchmarking_logger()

# Tr(P_i |00><00|): II, IZ, ZI, ZZ
GROUND_PAULI_VECTOR = np.zeros(16)
GROUND_PAULI_VECTOR[[0, 3, 12, 15]] = 1.0


class RBConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    lengths: list[int] = Field(default_factory=lambda: list(config.RB_LENGTHS))
    sequences_per_length: int = config.RB_SEQUENCES_PER_LENGTH
    shots: int = config.RB_SHOTS_PER_SEQUENCE
    interleaved: bool = False
    spam_error: float = 0.0
    scramble: bool = True

    @field_validator('lengths')
    @classmethod
    def _positive_lengths(cls, value):
        if not value or any(length < 1 for length in value):
            raise InvalidInputError(f'comprimentos de sequência inválidos: {value}')
        return sorted(set(value))

    @model_validator(mode='after')
    def _check_counts(self):
        if self.sequences_per_length < 1 or self.shots < 1:
            raise InvalidInputError('são necessários pelo menos 1 sequência por comprimento e 1 disparo')
        if not 0.0 <= self.spam_error < 0.5:
            raise InvalidInputError(f'erro de atribuição fora de [0, 0.5): {self.spam_error}')
        return self


class RBDataset(BaseModel):
    """Uma linha por sequência: comprimento, índice da sequência, sucessos e disparos."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    lengths: np.ndarray
    sequence_index: np.ndarray
    successes: np.ndarray
    shots: np.ndarray
    interleaved: bool = False
    metadata: dict = Field(default_factory=dict)

    @model_validator(mode='after')
    def _check_rows(self):
        n = len(self.lengths)
        if not (len(self.sequence_index) == len(self.successes) == len(self.shots) == n) or n == 0:
            raise InvalidInputError('colunas do conjunto de RB com tamanhos diferentes ou vazias')
        if np.any(self.successes < 0) or np.any(self.successes > self.shots):
            raise InvalidInputError('sucessos fora de [0, disparos]')
        return self

    @property
    def survival(self):
        return self.successes / self.shots

    @property
    def unique_lengths(self):
        return np.unique(self.lengths)

    def by_length(self):
        """(comprimentos, média, variância entre sequências, número de sequências)."""
        lengths = self.unique_lengths
        survival = self.survival
        means, variances, counts = [], [], []
        for length in lengths:
            values = survival[self.lengths == length]
            means.append(values.mean())
            variances.append(values.var(ddof=1) if len(values) > 1 else 0.0)
            counts.append(len(values))
        return lengths, np.array(means), np.array(variances), np.array(counts)

    def with_successes(self, successes):
        return self.model_copy(update={'successes': np.asarray(successes)})

    def pooled(self, other):
        """Concatena as sequências de dois conjuntos do mesmo tipo."""
        offset = int(self.sequence_index.max()) + 1
        return RBDataset(lengths=np.concatenate([self.lengths, other.lengths]),
                         sequence_index=np.concatenate([self.sequence_index, other.sequence_index + offset]),
                         successes=np.concatenate([self.successes, other.successes]),
                         shots=np.concatenate([self.shots, other.shots]),
                         interleaved=self.interleaved, metadata={**self.metadata, 'pooled': True})

    def to_frame(self):
        return pd.DataFrame({'length': self.lengths, 'sequence_index': self.sequence_index,
                             'successes': self.successes, 'shots': self.shots})

    @classmethod
    def from_frame(cls, frame, interleaved=False):
        missing = {'length', 'sequence_index', 'successes', 'shots'} - set(frame.columns)
        if missing:
            raise InvalidInputError(f'colunas ausentes no conjunto de RB: {sorted(missing)}')
        return cls(lengths=frame['length'].to_numpy(dtype=int), sequence_index=frame['sequence_index'].to_numpy(dtype=int),
                   successes=frame['successes'].to_numpy(dtype=int), shots=frame['shots'].to_numpy(dtype=int),
                   interleaved=interleaved)


class _CliffordChannels:
    """PTMs ruidosas por Clifford, montadas a partir das camadas nativas e memorizadas."""

    def __init__(self, gate_channels):
        if 'CZ' not in gate_channels:
            raise InvalidInputError("gate_channels precisa do canal 'CZ'")
        unknown = set(gate_channels) - {'CZ', '1Q'}
        if unknown:
            raise InvalidInputError(f'canais desconhecidos: {sorted(unknown)}')
        self.cz = pauli_transfer_matrix(gate_channels['CZ'])
        one_qubit = gate_channels.get('1Q')
        self.one_qubit = None if one_qubit is None else pauli_transfer_matrix(one_qubit)
        self._layers = {}
        self._cliffords = {}
        self._lock = threading.Lock()

    def _layer(self, layer):
        if layer.kind == 'CZ':
            return self.cz
        ptm = self._layers.get(layer)
        if ptm is None:
            ptm = pauli_transfer_matrix(unitary_channel(layer.unitary()))
            if self.one_qubit is not None:
                ptm = self.one_qubit @ ptm
            with self._lock:
                self._layers[layer] = ptm
        return ptm

    def clifford(self, element):
        ptm = self._cliffords.get(element.index)
        if ptm is None:
            ptm = np.eye(16)
            for layer in compile_to_native(element).layers:
                ptm = self._layer(layer) @ ptm
            with self._lock:
                self._cliffords[element.index] = ptm
        return ptm


def sequence_survival(channels, indices, interleaved):
    """Probabilidade ideal de |00> ao fim da sequência (antes do erro de atribuição)."""
    cz = clifford_cz() if interleaved else None
    net = clifford_identity()
    ptm = np.eye(16)
    for index in indices:
        element = clifford_from_index(index)
        ptm = channels.clifford(element) @ ptm
        net = clifford_compose(element, net)
        if interleaved:
            ptm = channels.cz @ ptm
            net = clifford_compose(cz, net)
    ptm = channels.clifford(clifford_invert(net)) @ ptm
    survival = GROUND_PAULI_VECTOR @ ptm @ GROUND_PAULI_VECTOR / 4.0
    return float(np.clip(survival, 0.0, 1.0))


def run_rb(rb_config, gate_channels, seed, drift=None, channel_factory=None, clock=None, max_workers=None):
    """
    Simula um decaimento de RB.

    drift: NoiseProfile com `t1_drift`; o multiplicador de T1 de cada sequência
    vem do seu índice de relógio. `clock` fixa esses índices (um por sequência,
    na ordem comprimento, sequência); sem ele as sequências são embaralhadas em
    [0, 1). `channel_factory(multiplicador)` devolve os canais com T1 escalado.
    """
    rows = [(length, s) for length in rb_config.lengths for s in range(rb_config.sequences_per_length)]
    scramble_seed, *children = np.random.SeedSequence(seed).spawn(len(rows) + 1)

    if clock is None:
        order = (np.random.default_rng(scramble_seed).permutation(len(rows)) if rb_config.scramble
                 else np.arange(len(rows)))
        clock = order / len(rows)
    clock = np.asarray(clock, dtype=float)
    if len(clock) != len(rows):
        raise InvalidInputError(f'relógio com {len(clock)} entradas para {len(rows)} sequências')

    base = _CliffordChannels(gate_channels)
    by_multiplier = {1.0: base}
    lock = threading.Lock()

    def channels_for(multiplier):
        if drift is None or channel_factory is None or multiplier == 1.0:
            return base
        with lock:
            if multiplier not in by_multiplier:
                logging.info('Canais com T1 × %.3f', multiplier)
                by_multiplier[multiplier] = _CliffordChannels(channel_factory(multiplier))
            return by_multiplier[multiplier]

    def run(item):
        (length, _), child, tick = item
        rng = np.random.default_rng(child)
        multiplier = 1.0 if drift is None else drift.t1_multiplier(tick)
        indices = rng.integers(GROUP_ORDER, size=length)
        survival = sequence_survival(channels_for(multiplier), indices, rb_config.interleaved)
        observed = (1.0 - rb_config.spam_error) * survival + rb_config.spam_error * (1.0 - survival)
        return survival, int(rng.binomial(rb_config.shots, observed))

    inicio = time.time()
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        results = list(executor.map(run, zip(rows, children, clock)))
    logging.info('RB %s: %d sequências em %.2f s', 'intercalado' if rb_config.interleaved else 'de referência',
                 len(rows), time.time() - inicio)

    return RBDataset(lengths=np.array([r[0] for r in rows]), sequence_index=np.array([r[1] for r in rows]),
                     successes=np.array([r[1] for r in results]),
                     shots=np.full(len(rows), rb_config.shots),
                     interleaved=rb_config.interleaved,
                     metadata={'ideal_survival': [r[0] for r in results], 'clock': clock.tolist()})
