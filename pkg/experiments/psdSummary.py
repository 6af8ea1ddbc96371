from logging_config import get_lab_logger
from noise import load_psd, profile_from_psd, psd_summary
from storage import plot_lines, write_json

# Obtém o logger configurado para este módulo
logging = get_lab_logger()


def handle_psd(context, input_path):
    """Resumo da PSD do instrumento e o NoiseProfile derivado dela."""
    block = context.experiment.psd
    psd = load_psd(input_path)
    summary = psd_summary(psd)
    profile = profile_from_psd(psd, one_over_f_amp=block.one_over_f_amp, psd_to_flux=block.psd_to_flux)
    document = {**summary, 'white_flux_psd': profile.white_flux_psd, 'profile': profile.model_dump()}
    files = [write_json(document, context.path('psd_summary.json'), context.metadata())]
    if context.svg:
        files.append(plot_lines(psd.to_frame(), 'frequency_mhz', ['power_dbm_hz'], context.path('psd.svg'),
                                xlabel='frequência (MHz)', ylabel='dBm/Hz'))
    return {'mensagem': f"piso branco {summary['white_floor_dbm_hz']:.1f} dBm/Hz, {len(summary['spurs'])} espúrios",
            'arquivos': files}
