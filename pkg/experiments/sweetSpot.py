import numpy as np
import pandas as pd

from device import modulation_response, resonance_contour, sweet_spot_amplitude
from logging_config import get_lab_logger
from storage import plot_lines, write_csv

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_dum(context):
    """δω_T(ε), λ(ε) e o contorno de ressonância ω_p(ε), com o ponto doce marcado."""
    pair = context.experiment.require_device()
    block = context.experiment.dum
    epsilons = block.epsilons.values()
    epsilon_star = sweet_spot_amplitude(pair.tunable, block.omega_p, pair.dc_bias)

    responses = [modulation_response(pair.tunable, float(e), block.omega_p, pair.dc_bias) for e in epsilons]
    frame = pd.DataFrame({
        'epsilon': epsilons,
        'delta_omega_mhz': [r.avg_shift for r in responses],
        'lambda_2_mhz': [r.lambda_2 for r in responses],
        'resonance_mhz': resonance_contour(pair, epsilons, harmonic=block.harmonic),
        'sweet_spot': np.arange(len(epsilons)) == int(np.argmin(np.abs(epsilons - epsilon_star))),
    })
    files = [write_csv(frame, context.path('dum.csv'), {**context.metadata(), 'sweet_spot_epsilon': epsilon_star})]
    if context.svg:
        shift_at_star = float(np.interp(epsilon_star, epsilons, frame['delta_omega_mhz']))
        files.append(plot_lines(frame, 'epsilon', ['delta_omega_mhz'], context.path('dum.svg'),
                                xlabel='ε (Φ0)', ylabel='δω_T/2π (MHz)', marker=(epsilon_star, shift_at_star)))
    logging.info('dum: ε*=%.4f Φ0 em %d amplitudes', epsilon_star, len(epsilons))
    return {'mensagem': f'ponto doce AC em ε*={epsilon_star:.4f} Φ0', 'sweet_spot_epsilon': epsilon_star,
            'arquivos': files}
