import logging
from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.optimize import nnls

from crhlab.probes import ConjugateSet, MomentMode

logger = logging.getLogger(__name__)


class Direction(Enum):
    FORWARD = 'forward'
    BACKWARD = 'backward'


@dataclass(frozen=True, eq=False)
class FdtReport:
    layer_index: int
    direction: Direction
    residual: np.ndarray
    relative_residual: float
    learning_norm: float
    regularization_norm: float
    noise_norm: float
    constants: tuple[float, float]
    unconstrained: tuple[float, float]
    constant_fit_residual: float

    @property
    def violation(self) -> bool:
        """A negative unconstrained constant contradicts the balance theorem."""
        return any(value < 0 for value in self.unconstrained)


def _constant_fit(target: np.ndarray, negative: np.ndarray, positive: np.ndarray):
    # target + c1 * negative = c2 * positive
    design = np.column_stack([-negative.ravel(), positive.ravel()])
    rhs = target.ravel()
    constants, _ = nnls(design, rhs)
    unconstrained = np.linalg.lstsq(design, rhs, rcond=None)[0]
    scale = np.linalg.norm(rhs)
    fit = float(np.linalg.norm(design @ constants - rhs) / scale) if scale > 0 else 0.0
    return (float(constants[0]), float(constants[1])), \
        (float(unconstrained[0]), float(unconstrained[1])), fit


def fdt_residual(conj: ConjugateSet, eta: float, gamma: float, direction: Direction) -> FdtReport:
    """
    Fluctuation-dissipation balance of one layer at stationarity.

    forward:  2 z_b E[g_b h_b^T] - 2 gamma H_b + eta z_b^2 G_b = 0
    backward: 2 z_a E[g_a h_a^T] + eta z_a^2 H_a - 2 gamma G_a = 0
    plus the constants of Z_b + c1 G_b = c2 H_b (Z_a + c3 H_a = c4 G_a) by nonnegative least squares.
    """
    if conj.moment_mode is not MomentMode.RAW:
        raise ValueError("fluctuation-dissipation balance needs raw moments")
    if eta <= 0:
        raise ValueError("learning rate must be positive")
    if gamma < 0:
        raise ValueError("weight decay must be non-negative")

    if direction is Direction.FORWARD:
        learning = 2.0 * conj.z_b * conj.cross_f
        regularization = 2.0 * gamma * conj.H_b
        noise = eta * conj.z_b ** 2 * conj.G_b
        residual = learning - regularization + noise
        constants, unconstrained, fit = _constant_fit(conj.Z_b, conj.G_b, conj.H_b)
    else:
        learning = 2.0 * conj.z_a * conj.cross_b
        regularization = 2.0 * gamma * conj.G_a
        noise = eta * conj.z_a ** 2 * conj.H_a
        residual = learning + noise - regularization
        constants, unconstrained, fit = _constant_fit(conj.Z_a, conj.H_a, conj.G_a)

    norms = (float(np.linalg.norm(learning)), float(np.linalg.norm(regularization)), float(np.linalg.norm(noise)))
    scale = max(norms)
    relative = float(np.linalg.norm(residual) / scale) if scale > 0 else 0.0
    return FdtReport(layer_index=conj.layer_index, direction=direction, residual=residual,
                     relative_residual=relative, learning_norm=norms[0], regularization_norm=norms[1],
                     noise_norm=norms[2], constants=constants, unconstrained=unconstrained,
                     constant_fit_residual=fit)
