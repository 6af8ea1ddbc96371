from .clifford import (CliffordElement, NativeLayer, NativeSequence, GROUP_ORDER, clifford_from_index,
                       clifford_from_unitary, clifford_identity, clifford_cz, clifford_sample, clifford_compose,
                       clifford_invert, compile_to_native, equal_up_to_phase, decomposition_class, split_index)
from .rbSimulation import RBConfig, RBDataset, run_rb, sequence_survival
from .rbAnalysis import (DecayFit, IRBResult, BootstrapResult, StabilityResult, ECDF, fit_decay, irb_estimate,
                         bootstrap_ci, stability_test, ecdf_with_band)
from .repeatedIrb import (IRBProtocol, ExperimentRecord, RepeatedIRBResult, CoherencePrediction, run_repeated_irb,
                          coherence_limited_prediction)
