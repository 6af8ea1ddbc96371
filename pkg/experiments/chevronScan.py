from calibration import resonance_from_chevron, run_chevron
from dynamics import DecoherenceRates
from errors import FitError
from logging_config import get_lab_logger
from storage import plot_chevron, write_csv, write_json

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_chevron(context):
    pair = context.experiment.require_device()
    block = context.experiment.chevron
    rates = DecoherenceRates.from_pair(pair) if block.decoherence else None
    dataset = run_chevron(pair, block.epsilon, block.frequencies.values(), block.durations.values(), rates=rates,
                          edge=block.edge)
    metadata = context.metadata()
    files = [write_csv(dataset.to_frame(), context.path('chevron.csv'), metadata)]

    summary = {'epsilon': block.epsilon, 'coarse_grid': dataset.coarse_grid}
    try:
        resonance, g_eff = resonance_from_chevron(dataset)
        summary.update({'resonance_mhz': resonance, 'g_eff_mhz': g_eff})
    except FitError as e:
        logging.warning('Ressonância não extraída do chevron: %s', e)
        summary.update({'resonance_mhz': None, 'g_eff_mhz': None})
    files.append(write_json(summary, context.path('chevron.json'), metadata))
    if context.svg:
        files.append(plot_chevron(dataset, context.path('chevron.svg')))
    return {'mensagem': 'chevron concluído', **summary, 'arquivos': files}
