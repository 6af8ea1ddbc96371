"""
Hamiltoniano de dois transmons (Duffing) com acoplamento que conserva excitações.

Ordenação global do espaço: fixo ⊗ sintonizável, 3 níveis cada.
Índice do estado |n_F n_T> = 3·n_F + n_T; |02> = transmon fixo em 0, sintonizável em 2.
Unidades: MHz (H/h).
"""

import numpy as np

from device import frequency_at_flux

LEVELS = 3
DIM = LEVELS * LEVELS

# índices de |00>, |01>, |10>, |11> no espaço 3⊗3
COMPUTATIONAL_INDICES = (0, 1, 3, 4)

# estados com o transmon fixo excitado (n_F >= 1)
FIXED_EXCITED_INDICES = tuple(i for i in range(DIM) if i // LEVELS >= 1)


def lowering(levels=LEVELS):
    return np.diag(np.sqrt(np.arange(1, levels)), k=1).astype(complex)


_a = lowering()
_eye = np.eye(LEVELS, dtype=complex)

A_FIXED = np.kron(_a, _eye)
A_TUNABLE = np.kron(_eye, _a)
N_FIXED = A_FIXED.conj().T @ A_FIXED
N_TUNABLE = A_TUNABLE.conj().T @ A_TUNABLE
N_TOTAL = N_FIXED + N_TUNABLE


def state_index(label):
    """'11' -> índice no espaço 3⊗3 (primeiro dígito: fixo, segundo: sintonizável)."""
    n_fixed, n_tunable = int(label[0]), int(label[1])
    return LEVELS * n_fixed + n_tunable


def excitation_blocks():
    """Listas de índices agrupados pelo número total de excitações."""
    totals = np.rint(np.real(np.diag(N_TOTAL))).astype(int)
    return [np.flatnonzero(totals == n) for n in range(int(totals.max()) + 1)]


def _duffing(frequency_mhz, anharmonicity_mhz, number_op):
    return frequency_mhz * number_op - 0.5 * anharmonicity_mhz * (number_op @ number_op - number_op)


def coupling_operator():
    """a_F† a_T + a_F a_T† (forma de onda girante)."""
    return A_FIXED.conj().T @ A_TUNABLE + A_FIXED @ A_TUNABLE.conj().T


def build_hamiltonian(pair, flux):
    """
    H/h (MHz) com o transmon sintonizável no fluxo `flux` (Φ0).

    Dois osciladores de Duffing ω·a†a − (|η|/2)·a†a†aa mais g(a†b + ab†);
    comuta com o número total de excitações.
    """
    f_tunable = 1000.0 * frequency_at_flux(pair.tunable, flux)
    f_fixed = 1000.0 * pair.fixed_frequency
    hamiltonian = (_duffing(f_fixed, pair.fixed.anharmonicity, N_FIXED)
                   + _duffing(f_tunable, pair.tunable.anharmonicity, N_TUNABLE)
                   + pair.g * coupling_operator())
    return hamiltonian


def frame_hamiltonian(pair):
    """H0/h (MHz) do referencial girante nas frequências de estacionamento."""
    f_tunable = 1000.0 * frequency_at_flux(pair.tunable, pair.dc_bias)
    return 1000.0 * pair.fixed_frequency * N_FIXED + f_tunable * N_TUNABLE
