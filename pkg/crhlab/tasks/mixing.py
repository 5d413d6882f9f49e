from dataclasses import dataclass

import numpy as np

from crhlab.tasks.streams import TRAIN_STREAM, gaussian_rows
from crhlab.tasks.teacher import TeacherNet, TeacherSpec


@dataclass(frozen=True)
class InputMixSpec:
    """x = M x' with x' ~ N(0, I) and M = (1 - phi_x) Z + phi_x I, Z a Bernoulli(p) 0/1 matrix."""
    phi_x: float = 1.0
    input_dim: int = 100
    p: float = 0.8
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.phi_x <= 1.0:
            raise ValueError(f"phi_x must be in [0, 1], got {self.phi_x}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0, 1], got {self.p}")

    def zero_one(self) -> np.ndarray:
        rng = np.random.default_rng([self.seed, 11])
        return rng.binomial(1, self.p, (self.input_dim, self.input_dim)).astype(np.float64)

    def mixing_matrix(self) -> np.ndarray:
        return (1.0 - self.phi_x) * self.zero_one() + self.phi_x * np.eye(self.input_dim)


def mixed_input_sample(mix: InputMixSpec, n: int, seed: int, start: int = 0,
                       stream: int = TRAIN_STREAM) -> np.ndarray:
    raw = gaussian_rows(seed, stream, start, n, mix.input_dim)
    return raw @ mix.mixing_matrix().T


def mixed_teacher_sample(mix: InputMixSpec, spec: TeacherSpec | TeacherNet, n: int, seed: int,
                         start: int = 0, stream: int = TRAIN_STREAM) -> tuple[np.ndarray, np.ndarray]:
    net = spec.build() if isinstance(spec, TeacherSpec) else spec
    x = mixed_input_sample(mix, n, seed, start, stream)
    return x, net.evaluate(x)
