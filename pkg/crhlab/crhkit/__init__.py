from crhlab.crhkit.alignments import AlignmentReport, six_alignments
from crhlab.crhkit.fdt import Direction, FdtReport, fdt_residual
from crhlab.crhkit.phases import DEFAULT_TAU, NEAR_MARGIN, PhaseLabel, classify_phase
from crhlab.crhkit.powerlaws import PAH_BAND, PahEntry, verify_power_law, shared_projector_distance, pah_scan
from crhlab.crhkit.rankstats import rank_alignment_stats
from crhlab.crhkit.drift import NullAlignment, feature_drift, null_alignment

__all__ = [
    'AlignmentReport', 'six_alignments', 'Direction', 'FdtReport', 'fdt_residual',
    'DEFAULT_TAU', 'NEAR_MARGIN', 'PhaseLabel', 'classify_phase',
    'PAH_BAND', 'PahEntry', 'verify_power_law', 'shared_projector_distance', 'pah_scan',
    'rank_alignment_stats', 'NullAlignment', 'feature_drift', 'null_alignment',
]
