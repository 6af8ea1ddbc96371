from logging_config import get_lab_logger
from noise import coherence_sweep
from storage import plot_lines, write_csv

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_coherence(context):
    """T1, T2* e Tφ do sintonizável em função de ε sob o perfil de ruído configurado."""
    experiment = context.experiment
    pair = experiment.require_device()
    seed = experiment.require_seed()
    block = experiment.coherence
    frame = coherence_sweep(pair, block.epsilons, block.omega_p, experiment.noise, block.ramsey_delays.values(),
                            block.t1_delays.values(), block.shots, seed)
    files = [write_csv(frame, context.path('coherence.csv'), context.metadata())]
    if context.svg:
        files.append(plot_lines(frame, 'epsilon', ['t1_us', 't2_star_us'], context.path('coherence.svg'),
                                xlabel='ε (Φ0)', ylabel='µs'))
    return {'mensagem': f'{len(frame)} amplitudes medidas', 'arquivos': files}
