from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import ShapeError
from crhlab.tasks.streams import TRAIN_STREAM


@dataclass(frozen=True)
class ClassBlobSpec:
    """C Gaussian blobs around orthogonal centers of norm center_scale, spread sigma."""
    classes: int = 4
    input_dim: int = 16
    sigma: float = 0.5
    center_scale: float = 3.0
    seed: int = 0

    def centers(self) -> np.ndarray:
        if self.classes < 2 or self.input_dim < self.classes:
            raise ShapeError(f"need 2 <= classes <= input_dim, got {self.classes}, {self.input_dim}")
        if self.sigma < 0:
            raise ValueError("sigma must be non-negative")
        rng = np.random.default_rng([self.seed, 13])
        basis, _ = np.linalg.qr(rng.standard_normal((self.input_dim, self.classes)))
        centers = self.center_scale * basis.T
        # orthogonal centers are center_scale * sqrt(2) apart
        if self.center_scale * np.sqrt(2.0) < 4.0 * self.sigma:
            raise ValueError(f"centers closer than 4 sigma: scale {self.center_scale}, sigma {self.sigma}")
        return centers


def class_blob_sample(spec: ClassBlobSpec, n_per_class: int, seed: int,
                      stream: int = TRAIN_STREAM) -> tuple[np.ndarray, np.ndarray]:
    """Balanced labels 0..C-1 cycling through the classes, points center + sigma * N(0, I)."""
    if n_per_class < 1:
        raise ValueError("n_per_class must be at least 1")
    centers = spec.centers()
    labels = np.tile(np.arange(spec.classes), n_per_class)
    rng = np.random.default_rng([seed, spec.seed, 17, stream])
    noise = rng.standard_normal((labels.shape[0], spec.input_dim))
    return centers[labels] + spec.sigma * noise, labels
