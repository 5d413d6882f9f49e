import logging
from enum import Enum

import numpy as np

from crhlab.crherrors import InsufficientDataError, ShapeError

logger = logging.getLogger(__name__)


class MomentMode(Enum):
    RAW = 'raw'
    CENTERED_NORMALIZED = 'centered_normalized'

    @classmethod
    def get_by_label(cls, label: str) -> 'MomentMode':
        for item in cls:
            if item.value == label:
                return item
        raise ValueError(f"No moment mode found with label: {label}")


class MomentAccumulator:
    """
    Streaming second moment of vectors (Chan/Welford merge of batch statistics).

    normalize projects each vector to unit norm before accumulating (zero vectors
    are skipped and counted); center subtracts the mean at finalization.
    """

    def __init__(self, dim: int, normalize: bool = False, center: bool = False):
        self.dim = dim
        self.normalize = normalize
        self.center = center
        self.count = 0
        self.skipped = 0
        self.mean = np.zeros(dim)
        self.m2 = np.zeros((dim, dim))

    @classmethod
    def for_mode(cls, dim: int, mode: MomentMode) -> 'MomentAccumulator':
        centered = mode is MomentMode.CENTERED_NORMALIZED
        return cls(dim, normalize=centered, center=centered)

    def _prepare(self, batch: np.ndarray) -> np.ndarray:
        if batch.ndim != 2 or batch.shape[1] != self.dim:
            raise ShapeError(f"expected vectors of dim {self.dim}, got shape {batch.shape}")
        if not self.normalize:
            return batch
        norms = np.linalg.norm(batch, axis=1)
        keep = norms > 0.0
        self.skipped += int(np.count_nonzero(~keep))
        return batch[keep] / norms[keep, None]

    def accumulate(self, v) -> 'MomentAccumulator':
        return self.accumulate_batch(np.asarray(v, dtype=np.float64).reshape(1, -1))

    def accumulate_batch(self, batch) -> 'MomentAccumulator':
        batch = self._prepare(np.asarray(batch, dtype=np.float64))
        n_b = batch.shape[0]
        if n_b == 0:
            return self
        mean_b = batch.mean(axis=0)
        centered = batch - mean_b
        m2_b = centered.T @ centered
        self._merge_stats(n_b, mean_b, m2_b)
        return self

    def _merge_stats(self, n_b: int, mean_b: np.ndarray, m2_b: np.ndarray):
        n_a = self.count
        total = n_a + n_b
        delta = mean_b - self.mean
        self.mean = self.mean + delta * (n_b / total)
        self.m2 = self.m2 + m2_b + np.outer(delta, delta) * (n_a * n_b / total)
        self.count = total

    def merge(self, other: 'MomentAccumulator') -> 'MomentAccumulator':
        if other.dim != self.dim or other.normalize != self.normalize or other.center != self.center:
            raise ShapeError("cannot merge accumulators with different dims or options")
        merged = MomentAccumulator(self.dim, self.normalize, self.center)
        merged.count, merged.mean, merged.m2, merged.skipped = self.count, self.mean.copy(), self.m2.copy(), \
            self.skipped + other.skipped
        if other.count:
            merged._merge_stats(other.count, other.mean, other.m2)
        return merged

    def finalize(self) -> np.ndarray:
        if self.count == 0:
            raise InsufficientDataError("no vectors accumulated")
        moment = self.m2 / self.count
        if not self.center:
            moment = moment + np.outer(self.mean, self.mean)
        if self.skipped:
            logger.debug("skipped %d zero vectors during normalization", self.skipped)
        return (moment + moment.T) / 2.0


def accumulate(acc: MomentAccumulator, v) -> MomentAccumulator:
    return acc.accumulate(v)
