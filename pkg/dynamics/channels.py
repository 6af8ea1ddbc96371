"""
Canais quânticos no subespaço computacional de dois qubits.

Superoperadores em vetorização por linhas, matriz de transferência de Pauli (PTM)
e fidelidade média de porta. A ordem dos fatores de Pauli segue a da base:
P = σ_fixo ⊗ σ_sintonizável, índice 4·a + b com a, b em I, X, Y, Z.
"""

import itertools

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field

from errors import ChannelValidationError, InvalidInputError
from logging_config import get_dynamics_logger
from .evolution import evolve_operators, propagator
from .hamiltonian import COMPUTATIONAL_INDICES, DIM

# Obtém o logger configurado para este módulo
logging = get_dynamics_logger()

QUBIT_DIM = 4
CP_TOLERANCE = 1e-6

_SINGLE_PAULIS = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli_labels(n_qubits=2):
    return [''.join(p) for p in itertools.product('IXYZ', repeat=n_qubits)]


def pauli_basis(n_qubits=2):
    """Pilha (4^n, 2^n, 2^n) das matrizes de Pauli na ordem de `pauli_labels`."""
    matrices = []
    for label in pauli_labels(n_qubits):
        matrix = np.eye(1, dtype=complex)
        for char in label:
            matrix = np.kron(matrix, _SINGLE_PAULIS[char])
        matrices.append(matrix)
    return np.array(matrices)


class Superoperator(BaseModel):
    """
    Mapa linear sobre operadores d×d: vec(E(ρ)) = matrix @ vec(ρ), vec por linhas.

    `leakage[i]` é a população perdida para fora do subespaço partindo do
    estado de base i (zero para canais fechados).
    """
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    matrix: np.ndarray
    leakage: np.ndarray | None = None
    metadata: dict = Field(default_factory=dict)

    @property
    def dim(self):
        return int(round(np.sqrt(self.matrix.shape[0])))

    @property
    def mean_leakage(self):
        return 0.0 if self.leakage is None else float(np.mean(self.leakage))

    def apply(self, rho):
        rho = np.asarray(rho, dtype=complex)
        return (self.matrix @ rho.reshape(-1)).reshape(rho.shape)

    def compose(self, other):
        """self ∘ other (other é aplicado primeiro)."""
        return Superoperator(matrix=self.matrix @ other.matrix)

    def choi(self):
        d = self.dim
        tensor = self.matrix.reshape(d, d, d, d)
        return tensor.transpose(2, 0, 3, 1).reshape(d * d, d * d)

    def validate(self, tolerance=CP_TOLERANCE):
        """Completamente positivo e não aumenta o traço; ChannelValidationError caso contrário."""
        choi = self.choi()
        choi = 0.5 * (choi + choi.conj().T)
        min_eig = float(np.linalg.eigvalsh(choi).min())
        if min_eig < -tolerance:
            raise ChannelValidationError(f'canal não é completamente positivo (autovalor de Choi {min_eig:.3e})')
        d = self.dim
        traces = np.array([np.trace(self.apply(np.outer(e, e))).real for e in np.eye(d)])
        if np.any(traces > 1.0 + tolerance):
            raise ChannelValidationError(f'canal aumenta o traço (máximo {traces.max():.6f})')
        if self.leakage is not None and np.any(np.abs(traces + self.leakage - 1.0) > tolerance):
            raise ChannelValidationError('traço + vazamento diferente de 1')
        return self


def unitary_channel(unitary):
    unitary = np.asarray(unitary, dtype=complex)
    return Superoperator(matrix=np.kron(unitary, unitary.conj()))


def depolarizing_channel(p, dim=QUBIT_DIM):
    """ρ → p·ρ + (1−p)·Tr(ρ)·I/d."""
    if not -1.0 / (dim * dim - 1) <= p <= 1.0:
        raise InvalidInputError(f'parâmetro de despolarização fora do intervalo: {p}')
    identity = np.eye(dim, dtype=complex).reshape(-1)
    matrix = p * np.eye(dim * dim, dtype=complex) + (1.0 - p) * np.outer(identity, identity) / dim
    return Superoperator(matrix=matrix)


def ideal_cz_unitary():
    return np.diag([1, 1, 1, -1]).astype(complex)


def cphase_unitary(phase):
    return np.diag([1, 1, 1, np.exp(1j * phase)])


def frame_correction_unitary(theta_tunable, theta_fixed):
    """Rotações Z locais que cancelam as fases dinâmicas: |01> ganha θ_T, |10> ganha θ_F."""
    return np.diag([1.0,
                    np.exp(-1j * theta_tunable),
                    np.exp(-1j * theta_fixed),
                    np.exp(-1j * (theta_tunable + theta_fixed))])


def _correction_channel(frame_corrections):
    if frame_corrections is None:
        return None
    if hasattr(frame_corrections, 'theta_tunable'):
        thetas = (frame_corrections.theta_tunable, frame_corrections.theta_fixed)
    else:
        thetas = tuple(frame_corrections)
    return unitary_channel(frame_correction_unitary(*thetas))


def computational_block(unitary):
    """Bloco 4×4 de |00>, |01>, |10>, |11> de um propagador 9×9."""
    index = np.array(COMPUTATIONAL_INDICES)
    return np.asarray(unitary)[np.ix_(index, index)]


def gate_superoperator(pair, pulse, rates=None, frame_corrections=None, sample_rate=None, points_per_period=None):
    """
    Canal 16×16 no subespaço computacional produzido pelo pulso.

    Propaga as 16 unidades matriciais |i><j| no espaço completo e projeta a saída;
    a população que sai do subespaço vira `leakage`. `frame_corrections` é um
    par (θ_T, θ_F) ou uma calibração com esses atributos, aplicado após o pulso.
    """
    index = np.array(COMPUTATIONAL_INDICES)
    if rates is None or rates.is_zero:
        unitary = propagator(pair, pulse, sample_rate, points_per_period)
        block = computational_block(unitary)
        matrix = np.kron(block, block.conj())
        leakage = 1.0 - np.sum(np.abs(block) ** 2, axis=0)
    else:
        units = np.zeros((QUBIT_DIM * QUBIT_DIM, DIM, DIM), dtype=complex)
        for col, (i, j) in enumerate(itertools.product(range(QUBIT_DIM), repeat=2)):
            units[col, index[i], index[j]] = 1.0
        outputs = evolve_operators(pair, pulse, units, rates, sample_rate, points_per_period)
        projected = outputs[:, index[:, None], index[None, :]]
        matrix = projected.reshape(QUBIT_DIM * QUBIT_DIM, QUBIT_DIM * QUBIT_DIM).T
        diagonal_inputs = [QUBIT_DIM * i + i for i in range(QUBIT_DIM)]
        leakage = np.array([1.0 - np.trace(projected[col]).real for col in diagonal_inputs])

    channel = Superoperator(matrix=matrix, leakage=np.clip(leakage, 0.0, None),
                            metadata={'frame': 'rotating', 'rates': None if rates is None else rates.model_dump()})
    correction = _correction_channel(frame_corrections)
    if correction is not None:
        channel = Superoperator(matrix=correction.matrix @ channel.matrix, leakage=channel.leakage,
                                metadata={**channel.metadata, 'frame_corrected': True})
    logging.debug('Canal do pulso: vazamento médio %.3e', channel.mean_leakage)
    return channel.validate()


def _as_channel(target):
    if isinstance(target, Superoperator):
        return target
    return unitary_channel(target)


def pauli_transfer_matrix(channel):
    """R_ij = (1/d)·Tr[P_i E(P_j)], real."""
    channel = _as_channel(channel)
    d = channel.dim
    n_qubits = int(round(np.log2(d)))
    basis = pauli_basis(n_qubits).reshape(d * d, d * d)
    ptm = basis.conj() @ channel.matrix @ basis.T / d
    return np.real(ptm)


def ptm_to_superoperator(ptm):
    """Inversa de `pauli_transfer_matrix`."""
    ptm = np.asarray(ptm, dtype=float)
    d = int(round(np.sqrt(ptm.shape[0])))
    basis = pauli_basis(int(round(np.log2(d)))).reshape(d * d, d * d)
    return Superoperator(matrix=basis.T @ ptm @ basis.conj() / d)


def average_gate_fidelity(channel, target):
    """F̄ = (Tr[R_alvoᵀ·R]/d + 1)/(d + 1), com d a dimensão do espaço de Hilbert."""
    ptm = pauli_transfer_matrix(channel)
    target_ptm = pauli_transfer_matrix(target)
    d = int(round(np.sqrt(ptm.shape[0])))
    return float((np.trace(target_ptm.T @ ptm) / d + 1.0) / (d + 1.0))


def ptm_frame(ptm):
    """PTM como DataFrame rotulado (linhas: saída, colunas: entrada)."""
    labels = pauli_labels(int(round(np.log2(np.sqrt(np.asarray(ptm).shape[0])))))
    return pd.DataFrame(np.asarray(ptm), index=labels, columns=labels)
