from .transmonSpec import TransmonSpec, CoupledPair, pure_dephasing_time, pair_from_dict, load_pair
from .fluxModel import (ModulationResponse, frequency_at_flux, frequency_derivative, modulation_response,
                        sweet_spot_amplitude, resonance_offset, resonance_contour, effective_coupling,
                        sideband_coefficient, detuning_mhz)
