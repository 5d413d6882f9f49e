from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import ShapeError
from crhlab.tasks.streams import TRAIN_STREAM, gaussian_rows


@dataclass(frozen=True)
class TeacherSpec:
    """y(x) = sum_i u_i sin(W_i^T x + b_i) with Gaussian u, W, b drawn from seed."""
    input_dim: int = 100
    units: int = 100
    output_dim: int = 1
    seed: int = 0

    def build(self) -> 'TeacherNet':
        if min(self.input_dim, self.units, self.output_dim) <= 0:
            raise ShapeError("teacher dims must be positive")
        rng = np.random.default_rng([self.seed, 7])
        weight = rng.standard_normal((self.units, self.input_dim)) / np.sqrt(self.input_dim)
        bias = rng.standard_normal(self.units)
        readout = rng.standard_normal((self.units, self.output_dim)) / np.sqrt(self.units)
        return TeacherNet(weight=weight, bias=bias, readout=readout)


@dataclass(frozen=True, eq=False)
class TeacherNet:
    weight: np.ndarray
    bias: np.ndarray
    readout: np.ndarray

    @property
    def input_dim(self) -> int:
        return self.weight.shape[1]

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        return np.sin(x @ self.weight.T + self.bias) @ self.readout


def teacher_sample(spec: TeacherSpec | TeacherNet, n: int, seed: int, start: int = 0,
                   stream: int = TRAIN_STREAM) -> tuple[np.ndarray, np.ndarray]:
    """Samples start .. start+n of the isotropic Gaussian input stream and their teacher labels."""
    if n < 1:
        raise ValueError("n must be at least 1")
    net = spec.build() if isinstance(spec, TeacherSpec) else spec
    x = gaussian_rows(seed, stream, start, n, net.input_dim)
    return x, net.evaluate(x)
