import numpy as np
import pandas as pd

from benchmarking import bootstrap_ci, fit_decay, irb_estimate, run_rb
from logging_config import get_lab_logger
from storage import plot_decays, write_csv, write_json
from .common import calibrated_gate, gate_channels

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def decays_frame(reference, interleaved):
    frames = []
    for dataset, label in ((reference, 'reference'), (interleaved, 'interleaved')):
        frame = dataset.to_frame()
        frame.insert(0, 'decay', label)
        frames.append(frame)
    return pd.concat(frames, ignore_index=True)


def handle_irb(context):
    """Um par de decaimentos (referência, intercalado) com o CZ calibrado e a estimativa de iRB."""
    experiment = context.experiment
    pair = experiment.require_device()
    seed = experiment.require_seed()
    block = experiment.irb

    calibration = calibrated_gate(pair, block)
    channels, _ = gate_channels(pair, calibration, block.decoherence)
    ref_seed, int_seed, ref_boot, int_boot = np.random.SeedSequence(seed).spawn(4)
    reference = run_rb(block.rb.model_copy(update={'interleaved': False}), channels, ref_seed)
    interleaved = run_rb(block.rb.model_copy(update={'interleaved': True}), channels, int_seed)

    ref_fit, int_fit = fit_decay(reference), fit_decay(interleaved)
    ref_ci = bootstrap_ci(reference, block.replicants, ref_boot)
    int_ci = bootstrap_ci(interleaved, block.replicants, int_boot)
    result = irb_estimate(ref_fit, int_fit, reference_samples=ref_ci.samples, interleaved_samples=int_ci.samples)

    metadata = context.metadata()
    document = {
        **result.model_dump(),
        'reference_fit': ref_fit.model_dump(), 'interleaved_fit': int_fit.model_dump(),
        'reference_p_ci': [ref_ci.low, ref_ci.high], 'interleaved_p_ci': [int_ci.low, int_ci.high],
        'bootstrap_unstable': ref_ci.unstable or int_ci.unstable,
        'calibration': calibration.model_dump(),
    }
    files = [write_json(document, context.path('irb.json'), metadata),
             write_csv(decays_frame(reference, interleaved), context.path('irb_decays.csv'), metadata)]
    if context.svg:
        files.append(plot_decays(reference, interleaved, context.path('irb_decays.svg')))
    return {'mensagem': f'F̄_CZ={result.avg_fidelity:.4f}', 'infidelidade': result.infidelity, 'arquivos': files}
