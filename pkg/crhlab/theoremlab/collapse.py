import logging
from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import InsufficientDataError, ShapeError
from crhlab.crhkit import AlignmentReport, six_alignments
from crhlab.linalg import try_alignment
from crhlab.netcore import (Activation, DenseLayer, LossKind, MlpModel, backward_capture, forward_capture,
                            loss_eval)
from crhlab.probes import MomentMode, conjugate_set

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    x: np.ndarray
    labels: np.ndarray
    targets: np.ndarray | None = None

    @property
    def classes(self) -> np.ndarray:
        return np.unique(self.labels)


@dataclass(frozen=True, eq=False)
class NcReport:
    class_means: np.ndarray
    nc1: float
    nc2: float
    nc3: float | None
    nc4: float
    zeta: float | None
    zeta_deviation: float | None
    b_isotropy: float | None
    alignments: AlignmentReport


def _penultimate(model: MlpModel, record) -> np.ndarray:
    last = model.depth - 1
    h = record.inputs[last]
    return h[:, :-1] if model.layers[last].has_bias else h


def nc_check(model: MlpModel, dataset: LabeledDataset, zeta_fit: bool = True,
             loss: LossKind = LossKind.CROSS_ENTROPY,
             mode: MomentMode = MomentMode.RAW) -> NcReport:
    """
    Neural collapse metrics of the penultimate representation next to the last
    layer's six alignments.

    NC1 = E||h - mu_c||^2 / mean_c ||mu_c - mu_G||^2, NC2 = max |cos(mu_c, mu_c')|
    over c != c' (no global-mean subtraction), NC3 = alpha(W^T W, sum_c mu_c mu_c^T),
    NC4 = agreement of the nearest-class-mean rule with argmax f.
    """
    labels = np.asarray(dataset.labels).astype(np.int64)
    record = forward_capture(model, dataset.x)
    prediction = record.prediction
    n, classes = prediction.shape
    if labels.shape[0] != n:
        raise ShapeError(f"{labels.shape[0]} labels for {n} samples")
    counts = np.bincount(labels, minlength=classes)
    if np.any(counts < 2):
        raise InsufficientDataError(f"every class needs at least 2 samples, got counts {counts.tolist()}")

    h = _penultimate(model, record)
    means = np.vstack([h[labels == c].mean(axis=0) for c in range(classes)])
    global_mean = h.mean(axis=0)
    within = float(np.mean(np.sum((h - means[labels]) ** 2, axis=1)))
    between = float(np.mean(np.sum((means - global_mean) ** 2, axis=1)))
    nc1 = within / between if between > 0 else float('inf')

    norms = np.linalg.norm(means, axis=1, keepdims=True)
    unit = np.divide(means, norms, out=np.zeros_like(means), where=norms > 0)
    gram = unit @ unit.T
    nc2 = float(np.max(np.abs(gram[~np.eye(classes, dtype=bool)]))) if classes > 1 else 0.0

    weight = model.layers[-1].weight
    nc3 = try_alignment(weight.T @ weight, means.T @ means)

    distances = np.sum((h[:, None, :] - means[None, :, :]) ** 2, axis=2)
    nc4 = float(np.mean(np.argmin(distances, axis=1) == np.argmax(prediction, axis=1)))

    zeta = deviation = None
    if zeta_fit:
        rows = np.arange(n)
        zeta = float(np.mean(prediction[rows, labels]))
        ideal = np.zeros_like(prediction)
        ideal[rows, labels] = zeta
        deviation = float(np.sqrt(np.mean(np.sum((prediction - ideal) ** 2, axis=1))))

    if loss is LossKind.CROSS_ENTROPY:
        targets = labels
    elif dataset.targets is not None:
        targets = dataset.targets
    else:
        targets = np.eye(classes)[labels]
    evaluation = loss_eval(prediction, targets, loss)
    b_isotropy = try_alignment(evaluation.output_moment, np.eye(classes))

    tapes = backward_capture(model, record, targets, loss, evaluation=evaluation)
    alignments = six_alignments(conjugate_set(model, tapes, model.depth - 1, mode))

    return NcReport(class_means=means, nc1=nc1, nc2=nc2, nc3=nc3, nc4=nc4, zeta=zeta, zeta_deviation=deviation,
                    b_isotropy=b_isotropy, alignments=alignments)


def build_collapse_model(classes: int = 4, dim: int = 8, zeta: float = 2.0, margin: float = 0.5,
                         samples_per_class: int = 3, seed: int = 0) -> tuple[MlpModel, LabeledDataset]:
    """
    A collapsed, quasi-interpolating classifier: one-hot inputs are mapped to
    orthonormal class means mu_c, the last layer is W = zeta sum_c e_c mu_c^T, and the
    squared-loss targets (zeta + margin) e_c make E[grad_f l grad_f l^T] isotropic.
    """
    if dim < classes:
        raise ShapeError(f"need dim >= classes for orthonormal means, got {dim} < {classes}")
    rng = np.random.default_rng(seed)
    means, _ = np.linalg.qr(rng.standard_normal((dim, classes)))
    model = MlpModel(layers=[DenseLayer(weight=means.copy()), DenseLayer(weight=zeta * means.T)],
                     activation=Activation.IDENTITY)
    labels = np.tile(np.arange(classes), samples_per_class)
    x = np.eye(classes)[labels]
    targets = (zeta + margin) * np.eye(classes)[labels]
    return model, LabeledDataset(x=x, labels=labels, targets=targets)
