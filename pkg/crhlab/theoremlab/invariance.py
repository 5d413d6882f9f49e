import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from crhlab.crherrors import ShapeError
from crhlab.netcore import LossKind, MlpModel, backward_capture, forward_capture, forward_from, loss_eval

logger = logging.getLogger(__name__)

KERNEL_TOLERANCE = 1e-8


@dataclass(frozen=True, eq=False)
class InvarianceReport:
    layer_index: int
    eps: np.ndarray
    deviations: np.ndarray
    slope: float | None
    r2: float | None
    h_norm: float
    w_norm: float
    g_norm: float

    @property
    def exact_invariance(self) -> bool:
        return bool(np.all(self.deviations == 0.0))

    @property
    def kernel_direction(self) -> bool:
        """H n, W n and G n all vanish."""
        return max(self.h_norm, self.w_norm, self.g_norm) <= KERNEL_TOLERANCE


def invariance_check(model: MlpModel, x: np.ndarray, targets, loss: LossKind, layer: int,
                     direction: np.ndarray, eps_list) -> InvarianceReport:
    """
    Mean |l(f(h + eps n)) - l(f(h))| over the batch as a function of eps, perturbing
    the input h of `layer`, with the log-log slope of the curve and the norms
    ||E[h h^T] n||, ||W n||, ||E[g g^T] n||. A slope near 2 marks a direction the
    loss is invariant to at first order.
    """
    if not 0 <= layer < model.depth:
        raise ValueError(f"no layer {layer} in a model of depth {model.depth}")
    dense = model.layers[layer]
    direction = np.asarray(direction, dtype=np.float64).reshape(-1)
    if direction.shape[0] != dense.d_in:
        raise ShapeError(f"direction has dim {direction.shape[0]}, layer input has {dense.d_in}")
    if abs(np.linalg.norm(direction) - 1.0) > 1e-8:
        raise ValueError("direction must have unit norm")
    eps = np.asarray(eps_list, dtype=np.float64)
    positive = eps[eps > 0]
    if positive.size < 2 or positive.max() / positive.min() < 100.0:
        raise ValueError("eps_list must span at least two decades")

    record = forward_capture(model, x)
    h = record.inputs[layer][:, :dense.d_in]
    base = loss_eval(forward_from(model, layer, h).prediction, targets, loss).per_sample
    deviations = np.array([
        float(np.mean(np.abs(loss_eval(forward_from(model, layer, h + e * direction).prediction,
                                       targets, loss).per_sample - base)))
        for e in eps
    ])

    slope = r2 = None
    usable = (eps > 0) & (deviations > 0)
    if np.count_nonzero(usable) >= 2:
        fit = stats.linregress(np.log(eps[usable]), np.log(deviations[usable]))
        slope, r2 = float(fit.slope), float(fit.rvalue ** 2)
    else:
        logger.info("layer %d: loss unchanged along direction for all eps", layer)

    tapes = backward_capture(model, record, targets, loss)
    g = tapes[layer].g_a[:, :dense.d_in]
    n = h.shape[0]
    return InvarianceReport(layer_index=layer, eps=eps, deviations=deviations, slope=slope, r2=r2,
                            h_norm=float(np.linalg.norm(h.T @ (h @ direction) / n)),
                            w_norm=float(np.linalg.norm(dense.weight @ direction)),
                            g_norm=float(np.linalg.norm(g.T @ (g @ direction) / n)))
