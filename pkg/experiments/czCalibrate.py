from calibration import calibrate_cz
from errors import CalibrationFailedError
from logging_config import get_lab_logger
from storage import write_json

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_calibrate(context):
    """Grava a calibração; em falha grava o melhor candidato antes de propagar o erro."""
    pair = context.experiment.require_device()
    block = context.experiment.calibrate
    try:
        calibration = calibrate_cz(pair, block.epsilon, block.search)
    except CalibrationFailedError as e:
        if e.best is not None:
            write_json(e.best.model_dump(), context.path('calibration_best.json'), context.metadata())
        raise
    path = write_json(calibration.model_dump(), context.path('calibration.json'), context.metadata())
    return {'mensagem': f'CZ calibrado com F̄={calibration.fidelity:.6f}', 'fidelidade': calibration.fidelity,
            'arquivos': [path]}
