from dynamics import average_gate_fidelity, ideal_cz_unitary, pauli_transfer_matrix, ptm_frame
from logging_config import get_lab_logger
from storage import channel_to_csv, plot_ptm, write_csv, write_json
from .common import calibrated_gate, gate_channels

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_ptm(context):
    """PTM do CZ calibrado (e da porta ideal), com o superoperador completo."""
    pair = context.experiment.require_device()
    block = context.experiment.ptm
    calibration = calibrated_gate(pair, block)
    channel = gate_channels(pair, calibration, block.decoherence)[0]['CZ']

    table = ptm_frame(pauli_transfer_matrix(channel))
    ideal = ptm_frame(pauli_transfer_matrix(ideal_cz_unitary()))
    metadata = context.metadata()
    fidelity = average_gate_fidelity(channel, ideal_cz_unitary())
    files = [write_csv(table.reset_index(names='output'), context.path('ptm.csv'), metadata),
             write_csv(ideal.reset_index(names='output'), context.path('ptm_ideal.csv'), metadata),
             channel_to_csv(channel, context.path('channel.csv'), metadata),
             write_json({'avg_fidelity': fidelity, 'leakage': channel.mean_leakage,
                         'decoherence': block.decoherence}, context.path('ptm.json'), metadata)]
    if context.svg:
        files.append(plot_ptm(table, context.path('ptm.svg')))
    return {'mensagem': f'F̄={fidelity:.5f}', 'arquivos': files}
