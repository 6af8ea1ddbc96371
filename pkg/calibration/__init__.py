from .chevron import ChevronDataset, SliceFit, run_chevron, fit_slice, fit_cosine, resonance_from_chevron
from .czCalibration import (CZCalibration, PhaseExtraction, SearchConfig, extract_phases, phases_from_unitary,
                            calibrate_cz, search_window)
