from .experimentConfig import ExperimentConfig, Grid, config_from_dict, load_config
from .common import RunContext, calibrated_gate, gate_channels
from .sweetSpot import handle_dum
from .coherenceSweep import handle_coherence
from .chevronScan import handle_chevron
from .czCalibrate import handle_calibrate
from .interleavedRb import handle_irb, decays_frame
from .repeatIrb import handle_repeat_irb
from .ptmExport import handle_ptm
from .psdSummary import handle_psd
