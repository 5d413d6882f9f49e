from dataclasses import dataclass

import numpy as np

from crhlab.linalg import pearson_alignment, try_alignment
from crhlab.probes import ConjugateSet


def feature_drift(initial: ConjugateSet, current: ConjugateSet) -> dict[str, float | None]:
    """Alignment of each representation and gradient moment with its value at initialization."""
    return {
        'H_a': try_alignment(initial.H_a, current.H_a),
        'G_a': try_alignment(initial.G_a, current.G_a),
        'H_b': try_alignment(initial.H_b, current.H_b),
        'G_b': try_alignment(initial.G_b, current.G_b),
    }


@dataclass(frozen=True)
class NullAlignment:
    dim: int
    mean: float
    std: float
    max_abs: float


def null_alignment(dim: int, seed: int = 0, trials: int = 100, dof: int = 3) -> NullAlignment:
    """Chance alignment between independent Wishart matrices with `dof` degrees of freedom."""
    rng = np.random.default_rng(seed)
    values = np.empty(trials)
    for trial in range(trials):
        left = rng.standard_normal((dim, dof))
        right = rng.standard_normal((dim, dof))
        values[trial] = pearson_alignment(left @ left.T / dof, right @ right.T / dof)
    return NullAlignment(dim=dim, mean=float(values.mean()), std=float(values.std()),
                         max_abs=float(np.max(np.abs(values))))
