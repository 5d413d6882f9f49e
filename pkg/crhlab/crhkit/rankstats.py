import numpy as np
from scipy import stats

from crhlab.crherrors import InsufficientDataError

MIN_ENTRIES = 5


def rank_alignment_stats(entries) -> float:
    """
    Spearman correlation between representation rank and alignment over
    (effective_rank, alpha) entries; ties get average ranks.
    """
    data = np.asarray(list(entries), dtype=np.float64)
    if data.ndim != 2 or data.shape[0] < MIN_ENTRIES:
        raise InsufficientDataError(f"rank statistics need at least {MIN_ENTRIES} entries")
    ranks, alphas = data[:, 0], data[:, 1]
    if np.all(ranks == ranks[0]) or np.all(alphas == alphas[0]):
        return 0.0
    return float(stats.spearmanr(ranks, alphas).statistic)
