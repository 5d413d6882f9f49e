from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.special import logsumexp, softmax

from crhlab.crherrors import ShapeError


class LossKind(Enum):
    MSE = 'mse'
    CROSS_ENTROPY = 'cross_entropy'

    @classmethod
    def get_by_label(cls, label: str) -> 'LossKind':
        for item in cls:
            if item.value == label:
                return item
        raise ValueError(f"No loss found with label: {label}")


@dataclass(frozen=True)
class LossEval:
    value: float
    per_sample: np.ndarray
    gradient: np.ndarray

    @property
    def output_moment(self) -> np.ndarray:
        """B = E[grad_f l grad_f l^T]."""
        return self.gradient.T @ self.gradient / self.gradient.shape[0]


def loss_eval(prediction: np.ndarray, target: np.ndarray, loss: LossKind) -> LossEval:
    """
    Per-sample loss and its gradient with respect to the prediction.

    mse: l = 1/2 ||f - y||^2. cross_entropy: target holds class indices.
    """
    prediction = np.asarray(prediction, dtype=np.float64)
    if prediction.ndim != 2:
        raise ShapeError(f"prediction must be a batch matrix, got shape {prediction.shape}")
    n, classes = prediction.shape

    if loss is LossKind.MSE:
        target = np.asarray(target, dtype=np.float64).reshape(n, -1)
        if target.shape != prediction.shape:
            raise ShapeError(f"target shape {target.shape} does not match prediction {prediction.shape}")
        residual = prediction - target
        per_sample = 0.5 * np.sum(residual ** 2, axis=1)
        gradient = residual
    elif loss is LossKind.CROSS_ENTROPY:
        labels = np.asarray(target).reshape(-1)
        if labels.shape[0] != n:
            raise ShapeError(f"{labels.shape[0]} labels for {n} predictions")
        if not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise ValueError("cross-entropy targets must be class indices")
            labels = labels.astype(np.int64)
        if np.any(labels < 0) or np.any(labels >= classes):
            raise ValueError(f"class index out of range [0, {classes})")
        rows = np.arange(n)
        per_sample = logsumexp(prediction, axis=1) - prediction[rows, labels]
        gradient = softmax(prediction, axis=1)
        gradient[rows, labels] -= 1.0
    else:
        raise ValueError(f"Unknown loss: {loss}")

    return LossEval(value=float(np.mean(per_sample)), per_sample=per_sample, gradient=gradient)
