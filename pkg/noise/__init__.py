from .noiseProfile import (NoiseProfile, InstrumentPSD, NoiseRealization, load_psd, psd_summary, profile_from_psd,
                           noise_realization, dbm_to_mw, mw_to_dbm)
from .coherence import (CoherenceFit, fit_ramsey, fit_t1, simulate_ramsey_under_modulation,
                        simulate_t1_under_modulation, coherence_sweep, amplitude_scale_from_curve)
