import copy
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from crhlab.crherrors import NonFiniteError, ShapeError


class Activation(Enum):
    RELU = 'relu'
    TANH = 'tanh'
    SIN = 'sin'
    IDENTITY = 'identity'

    def apply(self, x: np.ndarray) -> np.ndarray:
        if self is Activation.RELU:
            return np.maximum(x, 0.0)
        if self is Activation.TANH:
            return np.tanh(x)
        if self is Activation.SIN:
            return np.sin(x)
        return x

    def derivative(self, x: np.ndarray) -> np.ndarray:
        if self is Activation.RELU:
            return (x > 0.0).astype(np.float64)
        if self is Activation.TANH:
            return 1.0 - np.tanh(x) ** 2
        if self is Activation.SIN:
            return np.cos(x)
        return np.ones_like(x)

    @classmethod
    def get_by_label(cls, label: str) -> 'Activation':
        for item in cls:
            if item.value == label:
                return item
        raise ValueError(f"No activation found with label: {label}")


@dataclass
class DenseLayer:
    weight: np.ndarray
    bias: np.ndarray | None = None

    @property
    def has_bias(self) -> bool:
        return self.bias is not None

    @property
    def d_in(self) -> int:
        return self.weight.shape[1]

    @property
    def d_out(self) -> int:
        return self.weight.shape[0]

    def augmented(self) -> np.ndarray:
        """[W | b] acting on (h_a, 1); plain W without a bias."""
        if self.bias is None:
            return self.weight
        return np.hstack([self.weight, self.bias[:, None]])

    def with_augmented(self, matrix: np.ndarray) -> 'DenseLayer':
        if self.bias is None:
            return DenseLayer(weight=matrix)
        return DenseLayer(weight=matrix[:, :-1].copy(), bias=matrix[:, -1].copy())


@dataclass
class MlpModel:
    layers: list[DenseLayer]
    activation: Activation = Activation.RELU
    dims: list[int] = field(init=False)

    def __post_init__(self):
        if not self.layers:
            raise ShapeError("model needs at least one layer")
        for index in range(1, len(self.layers)):
            if self.layers[index].d_in != self.layers[index - 1].d_out:
                raise ShapeError(f"layer {index} input dim {self.layers[index].d_in} does not match "
                                 f"layer {index - 1} output dim {self.layers[index - 1].d_out}")
        for index, layer in enumerate(self.layers):
            if not np.all(np.isfinite(layer.weight)) or (layer.has_bias and not np.all(np.isfinite(layer.bias))):
                raise NonFiniteError("non-finite parameters", layer_index=index)
        self.dims = [self.layers[0].d_in] + [layer.d_out for layer in self.layers]

    @property
    def depth(self) -> int:
        return len(self.layers)

    def copy(self) -> 'MlpModel':
        return MlpModel(layers=copy.deepcopy(self.layers), activation=self.activation)


def init_mlp(dims, activation: Activation | str = Activation.RELU, bias: bool = True, seed: int = 0) -> MlpModel:
    """
    Gaussian fan-in initialization: W entries ~ N(0, 1/d_in), biases zero.
    """
    dims = [int(d) for d in dims]
    if len(dims) < 2:
        raise ShapeError(f"dims needs at least input and output sizes, got {dims}")
    if any(d <= 0 for d in dims):
        raise ShapeError(f"dims must be positive, got {dims}")
    if isinstance(activation, str):
        activation = Activation.get_by_label(activation)

    rng = np.random.default_rng(seed)
    layers = []
    for d_in, d_out in zip(dims[:-1], dims[1:]):
        weight = rng.standard_normal((d_out, d_in)) / np.sqrt(d_in)
        layers.append(DenseLayer(weight=weight, bias=np.zeros(d_out) if bias else None))
    return MlpModel(layers=layers, activation=activation)
