from benchmarking import IRBProtocol, coherence_limited_prediction, run_repeated_irb
from logging_config import get_lab_logger
from storage import plot_ecdf, write_csv, write_json
from .common import calibrated_gate, gate_channels

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_repeat_irb(context):
    """
    Série de experimentos de iRB com deriva de T1 do perfil de ruído.

    Emite a série temporal, a ECDF com e sem pós-seleção e, se houver faixas
    de coerência no bloco, a previsão limitada por coerência.
    """
    experiment = context.experiment
    pair = experiment.require_device()
    seed = experiment.require_seed()
    block = experiment.repeat_irb

    calibration = calibrated_gate(pair, block)
    channels, factory = gate_channels(pair, calibration, block.decoherence)
    protocol = IRBProtocol(rb=block.rb, gate_channels=channels, channel_factory=factory,
                           replicants=block.replicants, monitor_pair=pair if block.monitors else None)
    drift = experiment.noise if experiment.noise.t1_drift else None
    result = run_repeated_irb(protocol, block.experiments, drift=drift, seed=seed)

    metadata = context.metadata()
    files = [write_csv(result.to_frame(), context.path('repeat_irb_timeseries.csv'), metadata),
             write_csv(result.ecdf_all.to_frame(), context.path('ecdf_all.csv'), metadata)]
    if result.ecdf_kept is not None:
        files.append(write_csv(result.ecdf_kept.to_frame(), context.path('ecdf.csv'), metadata))

    summary = result.summary()
    if block.coherence_ranges:
        prediction = coherence_limited_prediction(pair, calibration, block.coherence_ranges)
        summary['coherence_limited_fidelity'] = [prediction.min_fidelity, prediction.max_fidelity]
        files.append(write_csv(prediction.corners, context.path('coherence_limited.csv'), metadata))
    files.append(write_json(summary, context.path('repeat_irb.json'), metadata))
    if context.svg:
        ecdf = result.ecdf_kept if result.ecdf_kept is not None else result.ecdf_all
        files.append(plot_ecdf(ecdf.to_frame(), context.path('ecdf.svg')))
    return {'mensagem': f"{summary['experiments']} experimentos, {summary['discard_fraction']:.0%} descartados",
            **summary, 'arquivos': files}
