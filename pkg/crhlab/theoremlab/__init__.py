from crhlab.theoremlab.instances import PhaseInstance, synth_phase_instance, synth_canonical_instance
from crhlab.theoremlab.master import (MasterCheck, check_master, check_redundancy, check_canonical_subspace,
                                      check_shared_projector, master_suite)
from crhlab.theoremlab.collapse import LabeledDataset, NcReport, nc_check, build_collapse_model
from crhlab.theoremlab.invariance import InvarianceReport, invariance_check
from crhlab.theoremlab.nfa import NfaReport, nfa_check

__all__ = [
    'PhaseInstance', 'synth_phase_instance', 'synth_canonical_instance',
    'MasterCheck', 'check_master', 'check_redundancy', 'check_canonical_subspace', 'check_shared_projector',
    'master_suite', 'LabeledDataset', 'NcReport', 'nc_check', 'build_collapse_model',
    'InvarianceReport', 'invariance_check', 'NfaReport', 'nfa_check',
]
