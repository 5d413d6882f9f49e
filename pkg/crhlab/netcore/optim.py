import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from crhlab.crherrors import NonFiniteError
from crhlab.netcore.capture import LayerTape
from crhlab.netcore.loss import LossKind
from crhlab.netcore.model import MlpModel

logger = logging.getLogger(__name__)


class OptimizerKind(Enum):
    SGD = 'sgd'
    SGD_MOMENTUM = 'sgd_momentum'
    ADAM = 'adam'

    @classmethod
    def get_by_label(cls, label: str) -> 'OptimizerKind':
        for item in cls:
            if item.value == label:
                return item
        raise ValueError(f"No optimizer found with label: {label}")


@dataclass(frozen=True)
class TrainConfig:
    learning_rate: float
    weight_decay: float = 0.0
    batch_size: int = 100
    steps: int = 1000
    optimizer: OptimizerKind = OptimizerKind.SGD
    momentum: float = 0.9
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    loss: LossKind = LossKind.MSE

    def validate(self):
        for name in ('learning_rate', 'weight_decay', 'momentum', 'beta1', 'beta2', 'adam_eps'):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be non-negative")
        if self.learning_rate * self.weight_decay >= 1:
            raise ValueError("learning_rate * weight_decay must be below 1")
        if self.batch_size <= 0:
            raise ValueError("batch_size must be positive")
        if self.steps < 0:
            raise ValueError("steps must be non-negative")
        if not 0 <= self.momentum < 1 or not 0 <= self.beta1 < 1 or not 0 <= self.beta2 < 1:
            raise ValueError("momentum and Adam betas must be in [0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        return self


@dataclass
class OptimizerState:
    step: int = 0
    buffers: list[dict[str, np.ndarray]] = field(default_factory=list)

    def buffer(self, layer: int, name: str, shape) -> np.ndarray:
        while len(self.buffers) <= layer:
            self.buffers.append({})
        if name not in self.buffers[layer]:
            self.buffers[layer][name] = np.zeros(shape)
        return self.buffers[layer][name]


def ascent_direction(tape: LayerTape) -> np.ndarray:
    """Batch mean of g_b h_a^T (the negative loss gradient for [W | b])."""
    return tape.g_b.T @ tape.h_a / tape.batch_size


def _checked(model: MlpModel, matrices: list[np.ndarray]) -> MlpModel:
    layers = []
    for index, (layer, matrix) in enumerate(zip(model.layers, matrices)):
        if not np.all(np.isfinite(matrix)):
            raise NonFiniteError("non-finite parameter update", layer_index=index)
        layers.append(layer.with_augmented(matrix))
    return MlpModel(layers=layers, activation=model.activation)


def sgd_step(model: MlpModel, tapes: list[LayerTape], config: TrainConfig,
             state: OptimizerState | None = None) -> MlpModel:
    """
    W <- W + eta (E[g_b h_a^T] - gamma W); with momentum the bracket feeds a velocity
    v <- beta v + bracket and W <- W + eta v.
    """
    eta, gamma = config.learning_rate, config.weight_decay
    use_momentum = config.optimizer is OptimizerKind.SGD_MOMENTUM
    if use_momentum and state is None:
        raise ValueError("momentum SGD needs an optimizer state")

    matrices = []
    for tape, layer in zip(tapes, model.layers):
        current = layer.augmented()
        direction = ascent_direction(tape) - gamma * current
        if use_momentum:
            velocity = state.buffer(tape.layer_index, 'velocity', current.shape)
            velocity *= config.momentum
            velocity += direction
            direction = velocity
        matrices.append(current + eta * direction)
    if state is not None:
        state.step += 1
    return _checked(model, matrices)


def adam_step(model: MlpModel, tapes: list[LayerTape], config: TrainConfig, state: OptimizerState) -> MlpModel:
    """
    Adam on the coupled-decay gradient -E[g_b h_a^T] + gamma W, with bias correction.
    """
    t = state.step + 1
    correction1 = 1.0 - config.beta1 ** t
    correction2 = 1.0 - config.beta2 ** t

    matrices = []
    for tape, layer in zip(tapes, model.layers):
        current = layer.augmented()
        grad = -ascent_direction(tape) + config.weight_decay * current
        first = state.buffer(tape.layer_index, 'm', current.shape)
        second = state.buffer(tape.layer_index, 'v', current.shape)
        first *= config.beta1
        first += (1.0 - config.beta1) * grad
        second *= config.beta2
        second += (1.0 - config.beta2) * grad ** 2
        update = (first / correction1) / (np.sqrt(second / correction2) + config.adam_eps)
        matrices.append(current - config.learning_rate * update)
    state.step = t
    return _checked(model, matrices)


def optimizer_step(model: MlpModel, tapes: list[LayerTape], config: TrainConfig,
                   state: OptimizerState) -> MlpModel:
    if config.optimizer is OptimizerKind.ADAM:
        return adam_step(model, tapes, config, state)
    return sgd_step(model, tapes, config, state)
