import logging
from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import NonFiniteError, ShapeError
from crhlab.netcore.loss import LossEval, LossKind, loss_eval
from crhlab.netcore.model import MlpModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ForwardRecord:
    """h_a (augmented with a constant 1 when the layer has a bias) and h_b for every layer."""
    inputs: list[np.ndarray]
    outputs: list[np.ndarray]

    @property
    def prediction(self) -> np.ndarray:
        return self.outputs[-1]

    @property
    def batch_size(self) -> int:
        return self.inputs[0].shape[0]


@dataclass(frozen=True)
class LayerTape:
    layer_index: int
    h_a: np.ndarray
    h_b: np.ndarray
    g_a: np.ndarray
    g_b: np.ndarray

    @property
    def batch_size(self) -> int:
        return self.h_a.shape[0]


def _augment(h: np.ndarray, bias: bool) -> np.ndarray:
    if not bias:
        return h
    return np.hstack([h, np.ones((h.shape[0], 1))])


def forward_from(model: MlpModel, layer: int, h_a: np.ndarray) -> ForwardRecord:
    """Run the model from the (unaugmented) input of `layer` to the output."""
    inputs, outputs = [], []
    h = np.asarray(h_a, dtype=np.float64)
    for index in range(layer, model.depth):
        dense = model.layers[index]
        if index > layer:
            h = model.activation.apply(outputs[-1])
        h_aug = _augment(h, dense.has_bias)
        h_b = h_aug @ dense.augmented().T
        if not np.all(np.isfinite(h_b)):
            raise NonFiniteError("non-finite activations", layer_index=index)
        inputs.append(h_aug)
        outputs.append(h_b)
    return ForwardRecord(inputs=inputs, outputs=outputs)


def forward_capture(model: MlpModel, x_batch: np.ndarray) -> ForwardRecord:
    x_batch = np.asarray(x_batch, dtype=np.float64)
    if x_batch.ndim != 2 or x_batch.shape[1] != model.dims[0]:
        raise ShapeError(f"input batch shape {x_batch.shape} does not match input dim {model.dims[0]}")
    return forward_from(model, 0, x_batch)


def backpropagate(model: MlpModel, record: ForwardRecord, output_gradient: np.ndarray,
                  stop_layer: int = 0) -> list[tuple[np.ndarray, np.ndarray]]:
    """
    Push d(scalar)/d(output) back through the layers. Returns (d/dh_a, d/dh_b)
    per layer from stop_layer to the last layer, in layer order.
    """
    first = model.depth - len(record.outputs)
    grad_b = np.asarray(output_gradient, dtype=np.float64)
    if grad_b.shape != record.prediction.shape:
        raise ShapeError(f"output gradient shape {grad_b.shape} does not match prediction {record.prediction.shape}")

    grads = []
    for index in range(model.depth - 1, stop_layer - 1, -1):
        dense = model.layers[index]
        grad_a = grad_b @ dense.augmented()
        grads.append((grad_a, grad_b))
        if index > stop_layer:
            slot = index - first
            grad_b = grad_a[:, :dense.d_in] * model.activation.derivative(record.outputs[slot - 1])
    grads.reverse()
    return grads


def backward_capture(model: MlpModel, record: ForwardRecord, targets, loss: LossKind,
                     evaluation: LossEval | None = None) -> list[LayerTape]:
    """
    Per-sample neuron gradients g = -grad_h l for every layer.
    """
    if evaluation is None:
        evaluation = loss_eval(record.prediction, targets, loss)
    if evaluation.gradient.shape[0] != record.batch_size:
        raise ShapeError(f"{evaluation.gradient.shape[0]} targets for a batch of {record.batch_size}")

    grads = backpropagate(model, record, evaluation.gradient)
    tapes = []
    for index, (grad_a, grad_b) in enumerate(grads):
        tapes.append(LayerTape(layer_index=index, h_a=record.inputs[index], h_b=record.outputs[index],
                               g_a=-grad_a, g_b=-grad_b))
    return tapes


def output_jacobians(model: MlpModel, record: ForwardRecord, layer: int) -> np.ndarray:
    """
    Per-sample Jacobians of the output with respect to the (augmented) h_a of
    `layer`, shape (N, d_out, d_in).
    """
    n, classes = record.prediction.shape
    jacobians = np.empty((n, classes, record.inputs[layer].shape[1]))
    for output in range(classes):
        seed = np.zeros((n, classes))
        seed[:, output] = 1.0
        grads = backpropagate(model, record, seed, stop_layer=layer)
        jacobians[:, output, :] = grads[0][0]
    return jacobians
