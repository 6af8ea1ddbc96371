"""
Integração temporal do par acoplado sob o pulso de fluxo.

A propagação é feita no referencial do laboratório com H(t) = H_est + δ_T(t)·n_T,
passo fixo de Magnus de 4ª ordem (dois nós de Gauss) e exponenciais exatas via eigh.
Com taxas de decoerência, cada passo unitário é intercalado com meio passo do
dissipador de Lindblad (separação de Strang). O resultado é devolvido no
referencial girante nas frequências de estacionamento dos dois transmons.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy import linalg

import config
from device import frequency_at_flux, pure_dephasing_time
from errors import IntegrationError, InvalidInputError
from logging_config import get_dynamics_logger
from pulse import flux_at, synthesize
from .hamiltonian import (DIM, A_FIXED, A_TUNABLE, N_FIXED, N_TUNABLE, build_hamiltonian,
                          excitation_blocks, frame_hamiltonian, state_index)

# Obtém o logger configurado para este módulo
logging = get_dynamics_logger()

MHZ_TO_RAD_PER_NS = 2.0 * math.pi * 1e-3
MIN_POINTS_PER_PERIOD = 20
CHUNK_STEPS = 4096
STATE_TOLERANCE = 1e-8
HERMITIAN_TOLERANCE = 1e-10
TRACE_TOLERANCE = 1e-9

_GAUSS_OFFSET = math.sqrt(3.0) / 6.0
_MAGNUS_COMMUTATOR = math.sqrt(3.0) / 12.0


class DensityMatrix(BaseModel):
    """ρ hermitiana (1e-10), traço unitário (1e-9) e semidefinida positiva (1e-8)."""
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    entries: np.ndarray
    metadata: dict = Field(default_factory=dict)

    @model_validator(mode='after')
    def _check_state(self):
        rho = self.entries
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidInputError(f'matriz densidade precisa ser quadrada, recebido {rho.shape}')
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOLERANCE:
            raise InvalidInputError('matriz densidade não hermitiana')
        if abs(np.trace(rho).real - 1.0) > TRACE_TOLERANCE:
            raise InvalidInputError(f'traço {np.trace(rho).real:.3e} diferente de 1')
        if np.linalg.eigvalsh(rho).min() < -STATE_TOLERANCE:
            raise InvalidInputError('matriz densidade com autovalor negativo')
        return self

    @classmethod
    def from_vector(cls, vector, metadata=None):
        psi = np.asarray(vector, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return cls(entries=np.outer(psi, psi.conj()), metadata=metadata or {})

    @classmethod
    def from_label(cls, label):
        """Estado de base |n_F n_T>, ex.: '11' ou '02'."""
        psi = np.zeros(DIM, dtype=complex)
        psi[state_index(label)] = 1.0
        return cls.from_vector(psi)

    @property
    def dim(self):
        return self.entries.shape[0]

    def populations(self):
        return np.real(np.diag(self.entries)).copy()

    def population(self, label):
        return float(np.real(self.entries[state_index(label), state_index(label)]))

    def fidelity_with(self, vector):
        psi = np.asarray(vector, dtype=complex)
        psi = psi / np.linalg.norm(psi)
        return float(np.real(psi.conj() @ self.entries @ psi))


class DecoherenceRates(BaseModel):
    """Tempos de relaxação e de defasagem pura (µs). inf desliga o canal."""
    model_config = ConfigDict(frozen=True)

    t1_tunable: float = Field(default=math.inf, gt=0)
    tphi_tunable: float = Field(default=math.inf, gt=0)
    t1_fixed: float = Field(default=math.inf, gt=0)
    tphi_fixed: float = Field(default=math.inf, gt=0)

    @classmethod
    def from_pair(cls, pair):
        tunable, fixed = pair.tunable, pair.fixed
        return cls(t1_tunable=tunable.t1, tphi_tunable=pure_dephasing_time(tunable.t1, tunable.t2_star),
                   t1_fixed=fixed.t1, tphi_fixed=pure_dephasing_time(fixed.t1, fixed.t2_star))

    def scaled(self, t1_factor=1.0, tphi_factor=1.0):
        """Cópia com os tempos multiplicados (deriva de T1 nas simulações de RB)."""
        return DecoherenceRates(t1_tunable=self.t1_tunable * t1_factor,
                                tphi_tunable=self.tphi_tunable * tphi_factor,
                                t1_fixed=self.t1_fixed * t1_factor,
                                tphi_fixed=self.tphi_fixed * tphi_factor)

    def collapse_operators(self):
        """√(1/T1)·a e √(2/Tφ)·n, taxas em 1/ns."""
        operators = []
        for t1, tphi, lowering_op, number_op in ((self.t1_tunable, self.tphi_tunable, A_TUNABLE, N_TUNABLE),
                                                 (self.t1_fixed, self.tphi_fixed, A_FIXED, N_FIXED)):
            if math.isfinite(t1):
                operators.append(math.sqrt(1.0 / (1000.0 * t1)) * lowering_op)
            if math.isfinite(tphi):
                operators.append(math.sqrt(2.0 / (1000.0 * tphi)) * number_op)
        return operators

    @property
    def is_zero(self):
        return not self.collapse_operators()


def _flux_function(pulse, sample_rate):
    if sample_rate is None:
        return lambda t: flux_at(pulse, t)
    return synthesize(pulse, sample_rate).interpolator()


def _fastest_frequency_mhz(pair, pulse):
    """Limite superior das frequências no referencial girante (MHz)."""
    f_park = frequency_at_flux(pair.tunable, pulse.dc_bias)
    theta = np.linspace(0.0, 2.0 * math.pi, 257)
    excursion = 1000.0 * np.max(np.abs(frequency_at_flux(pair.tunable, pulse.dc_bias + pulse.amplitude * np.cos(theta))
                                       - f_park))
    detuning = abs(1000.0 * (f_park - pair.fixed_frequency))
    eta = max(pair.tunable.anharmonicity, pair.fixed.anharmonicity)
    return max(detuning + eta + 2.0 * excursion + 2.0 * pulse.mod_freq, pair.g)


def _plan_steps(pair, pulse, points_per_period):
    points_per_period = points_per_period or config.POINTS_PER_PERIOD
    if points_per_period < MIN_POINTS_PER_PERIOD:
        raise IntegrationError(f'{points_per_period} pontos por período: mínimo {MIN_POINTS_PER_PERIOD}',
                               diagnostics={'points_per_period': points_per_period})
    if pulse.duration == 0.0:
        return 0, 0.0
    f_fast = _fastest_frequency_mhz(pair, pulse)
    max_step = 1000.0 / (points_per_period * f_fast)
    n_steps = max(1, int(math.ceil(pulse.duration / max_step)))
    return n_steps, pulse.duration / n_steps


def _gauss_deviations(pair, pulse, flux_fn, start_step, n_chunk, step):
    """δ_T nos dois nós de Gauss de cada passo (rad/ns)."""
    starts = (start_step + np.arange(n_chunk)) * step
    f_park = frequency_at_flux(pair.tunable, pulse.dc_bias)
    deviations = []
    for offset in (0.5 - _GAUSS_OFFSET, 0.5 + _GAUSS_OFFSET):
        flux = np.asarray(flux_fn(starts + offset * step), dtype=float)
        deviations.append(2.0 * math.pi * (frequency_at_flux(pair.tunable, flux) - f_park))
    return deviations


def _magnus_steps(static, coupling_op, s1, s2, step):
    """exp(Ω₄) de cada passo para H = A + s(t)·B, em lote."""
    commutator = static @ coupling_op - coupling_op @ static
    mean = 0.5 * (s1 + s2)[:, None, None]
    generator = (step * (static[None] + mean * coupling_op[None])
                 - 1j * _MAGNUS_COMMUTATOR * step ** 2 * (s1 - s2)[:, None, None] * commutator[None])
    eigvals, eigvecs = np.linalg.eigh(generator)
    return eigvecs @ (np.exp(-1j * eigvals)[..., None] * eigvecs.conj().swapaxes(-1, -2))


def _ordered_product(steps):
    """U_n ··· U_2 U_1 por redução em árvore."""
    identity = np.eye(steps.shape[-1], dtype=complex)
    while len(steps) > 1:
        if len(steps) % 2:
            steps = np.concatenate([steps, identity[None]])
        steps = steps[1::2] @ steps[0::2]
    return steps[0]


def _frame_phases(pair, duration):
    return np.exp(1j * MHZ_TO_RAD_PER_NS * np.real(np.diag(frame_hamiltonian(pair))) * duration)


def _chunks(n_steps):
    for start in range(0, n_steps, CHUNK_STEPS):
        yield start, min(CHUNK_STEPS, n_steps - start)


def _lab_pair(pair, pulse):
    """O Hamiltoniano estático usa o ponto de estacionamento do pulso."""
    if pair.dc_bias == pulse.dc_bias:
        return pair
    return pair.model_copy(update={'dc_bias': pulse.dc_bias})


def block_propagator(pair, pulse, indices, sample_rate=None, points_per_period=None):
    """
    Propagador restrito ao bloco `indices` (conservação de excitações), no
    referencial girante. Usado pelo chevron, que só precisa do bloco de |11>.
    """
    pair = _lab_pair(pair, pulse)
    indices = np.asarray(indices)
    n_steps, step = _plan_steps(pair, pulse, points_per_period)
    static = MHZ_TO_RAD_PER_NS * build_hamiltonian(pair, pulse.dc_bias)[np.ix_(indices, indices)]
    coupling_op = N_TUNABLE[np.ix_(indices, indices)]
    flux_fn = _flux_function(pulse, sample_rate)

    total = np.eye(len(indices), dtype=complex)
    for start, n_chunk in _chunks(n_steps):
        s1, s2 = _gauss_deviations(pair, pulse, flux_fn, start, n_chunk, step)
        total = _ordered_product(_magnus_steps(static, coupling_op, s1, s2, step)) @ total

    phases = _frame_phases(pair, pulse.duration)[indices]
    rotated = phases[:, None] * total
    deviation = float(np.max(np.abs(rotated.conj().T @ rotated - np.eye(len(indices)))))
    if not np.isfinite(deviation) or deviation > STATE_TOLERANCE:
        raise IntegrationError('propagador perdeu unitariedade',
                               diagnostics={'steps': n_steps, 'step_ns': step, 'unitarity_error': deviation})
    return rotated


def propagator(pair, pulse, sample_rate=None, points_per_period=None):
    """U(T) 9×9 no referencial girante, montado bloco a bloco."""
    unitary = np.zeros((DIM, DIM), dtype=complex)
    for indices in excitation_blocks():
        unitary[np.ix_(indices, indices)] = block_propagator(pair, pulse, indices, sample_rate, points_per_period)
    return unitary


def _full_steps(pair, pulse, flux_fn, start, n_chunk, step):
    blocks = excitation_blocks()
    static_full = MHZ_TO_RAD_PER_NS * build_hamiltonian(pair, pulse.dc_bias)
    s1, s2 = _gauss_deviations(pair, pulse, flux_fn, start, n_chunk, step)
    steps = np.zeros((n_chunk, DIM, DIM), dtype=complex)
    for indices in blocks:
        grid = np.ix_(indices, indices)
        block = _magnus_steps(static_full[grid], N_TUNABLE[grid], s1, s2, step)
        steps[:, indices[:, None], indices[None, :]] = block
    return steps


def _dissipator(collapse_ops):
    """Superoperador de Lindblad na vetorização por linhas: vec(AρB) = (A ⊗ Bᵀ)vec(ρ)."""
    identity = np.eye(DIM, dtype=complex)
    generator = np.zeros((DIM * DIM, DIM * DIM), dtype=complex)
    for op in collapse_ops:
        decay = op.conj().T @ op
        generator += np.kron(op, op.conj()) - 0.5 * np.kron(decay, identity) - 0.5 * np.kron(identity, decay.T)
    return generator


def evolve_operators(pair, pulse, operators, rates=None, sample_rate=None, points_per_period=None):
    """
    Propaga uma pilha de operadores (k, 9, 9) pelo canal do pulso.

    Sem taxas: U X U†. Com taxas: Strang e^{Dh/2}·U·e^{Dh/2} a cada passo.
    Não valida os operadores como estados (as unidades matriciais |i><j| não o são).
    """
    operators = np.asarray(operators, dtype=complex)
    if rates is None or rates.is_zero:
        unitary = propagator(pair, pulse, sample_rate, points_per_period)
        return unitary[None] @ operators @ unitary.conj().T[None]

    pair = _lab_pair(pair, pulse)
    n_steps, step = _plan_steps(pair, pulse, points_per_period)
    if n_steps == 0:
        return operators.copy()
    flux_fn = _flux_function(pulse, sample_rate)
    generator = _dissipator(rates.collapse_operators())
    half = linalg.expm(0.5 * step * generator).T
    full = half @ half

    k = len(operators)
    vectors = operators.reshape(k, DIM * DIM) @ half
    for start, n_chunk in _chunks(n_steps):
        steps = _full_steps(pair, pulse, flux_fn, start, n_chunk, step)
        for i in range(n_chunk):
            rho = vectors.reshape(k, DIM, DIM)
            rho = steps[i] @ rho @ steps[i].conj().T
            last = start + i == n_steps - 1
            vectors = rho.reshape(k, DIM * DIM) @ (half if last else full)
    result = vectors.reshape(k, DIM, DIM)
    if not np.all(np.isfinite(result)):
        raise IntegrationError('valores não finitos na integração de Lindblad',
                               diagnostics={'steps': n_steps, 'step_ns': step})
    phases = _frame_phases(pair, pulse.duration)
    return phases[None, :, None] * result * phases.conj()[None, None, :]


def evolve(pair, pulse, initial, rates=None, sample_rate=None, points_per_period=None):
    """
    Evolui o estado inicial ao longo do pulso e devolve a DensityMatrix final.

    O referencial de saída fica registrado em `metadata['frame']`.
    """
    if initial.dim != DIM:
        raise InvalidInputError(f'estado inicial deve ter dimensão {DIM}, recebido {initial.dim}')
    final = evolve_operators(pair, pulse, initial.entries[None], rates, sample_rate, points_per_period)[0]
    n_steps, step = _plan_steps(_lab_pair(pair, pulse), pulse, points_per_period)
    final = 0.5 * (final + final.conj().T)

    trace_error = abs(np.trace(final).real - 1.0)
    min_eig = float(np.linalg.eigvalsh(final).min())
    if trace_error > TRACE_TOLERANCE or min_eig < -STATE_TOLERANCE:
        raise IntegrationError('estado final fora da tolerância',
                               diagnostics={'steps': n_steps, 'step_ns': step,
                                            'trace_error': trace_error, 'min_eigenvalue': min_eig})

    f_park = frequency_at_flux(pair.tunable, pulse.dc_bias)
    metadata = {
        'frame': 'rotating',
        'frame_frequencies_ghz': {'tunable': f_park, 'fixed': pair.fixed_frequency},
        'method': 'magnus4' if rates is None or rates.is_zero else 'magnus4-strang',
        'steps': n_steps,
        'step_ns': step,
    }
    logging.debug('Evolução concluída: %d passos de %.4f ns', n_steps, step)
    return DensityMatrix(entries=final, metadata=metadata)


def excitation_survival(pair, flux, sample_rate, rates, indices):
    """
    População de |01> (excitação no sintonizável) ao longo de uma trajetória de fluxo amostrada.

    Propagação sem saltos no bloco {|01>, |10>} com H_ef = H − (i/2)·Σ Γ·L†L:
    os saltos de relaxação levam a |00> e não voltam ao bloco, então |c_01|² é a
    população exata. Só T1 entra; a defasagem pura não altera as populações.
    Fluxo constante por amostra, exponencial 2×2 exata por amostra.
    `indices[k]` conta as amostras já aplicadas no k-ésimo ponto de leitura.
    """
    flux = np.asarray(flux, dtype=float)
    indices = np.asarray(indices, dtype=int)
    if np.any(np.diff(indices) < 0) or indices.min() < 0 or indices.max() > len(flux):
        raise InvalidInputError('índices de leitura fora da trajetória ou fora de ordem')
    step = 1.0 / sample_rate
    gamma_tunable = 0.0 if math.isinf(rates.t1_tunable) else 1.0 / (1000.0 * rates.t1_tunable)
    gamma_fixed = 0.0 if math.isinf(rates.t1_fixed) else 1.0 / (1000.0 * rates.t1_fixed)

    upper = 2.0 * math.pi * (frequency_at_flux(pair.tunable, flux) - pair.fixed_frequency) - 0.5j * gamma_tunable
    lower = -0.5j * gamma_fixed
    coupling = MHZ_TO_RAD_PER_NS * pair.g
    mean = 0.5 * (upper + lower)
    half_gap = 0.5 * (upper - lower)
    rabi = np.sqrt(half_gap ** 2 + coupling ** 2)
    sine = np.where(np.abs(rabi) > 1e-12, np.sin(rabi * step) / np.where(rabi == 0, 1.0, rabi), step)
    cosine = np.cos(rabi * step)
    phase = np.exp(-1j * mean * step)
    steps = np.empty((len(flux), 2, 2), dtype=complex)
    steps[:, 0, 0] = phase * (cosine - 1j * sine * half_gap)
    steps[:, 1, 1] = phase * (cosine + 1j * sine * half_gap)
    steps[:, 0, 1] = steps[:, 1, 0] = -1j * phase * sine * coupling

    state = np.array([1.0, 0.0], dtype=complex)
    survival = np.empty(len(indices))
    position = 0
    for k, index in enumerate(indices):
        if index > position:
            state = _ordered_product(steps[position:index]) @ state
            position = index
        survival[k] = abs(state[0]) ** 2
    return survival
