from .hamiltonian import (COMPUTATIONAL_INDICES, FIXED_EXCITED_INDICES, DIM, build_hamiltonian, frame_hamiltonian, state_index,
                          excitation_blocks)
from .evolution import (DensityMatrix, DecoherenceRates, evolve, evolve_operators, propagator, block_propagator,
                        excitation_survival)
from .channels import (Superoperator, gate_superoperator, pauli_transfer_matrix, ptm_to_superoperator,
                       average_gate_fidelity, unitary_channel, depolarizing_channel, ideal_cz_unitary,
                       cphase_unitary, frame_correction_unitary, computational_block, pauli_labels, pauli_basis,
                       ptm_frame)
