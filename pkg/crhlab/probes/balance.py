import logging
from dataclasses import dataclass

import numpy as np

from crhlab.linalg import try_alignment
from crhlab.netcore import LayerTape, MlpModel
from crhlab.probes.conjugate import ConjugateSet
from crhlab.probes.moments import MomentMode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BalanceCheck:
    """Alignment and relative error of two matrices expected to be equal (forward f, backward b)."""
    alpha_f: float | None
    alpha_b: float | None
    rel_err_f: float | None
    rel_err_b: float | None


def _rel_err(measured: np.ndarray, expected: np.ndarray) -> float | None:
    scale = np.linalg.norm(expected)
    if scale == 0.0:
        return None
    return float(np.linalg.norm(measured - expected) / scale)


def _require_raw(conj: ConjugateSet):
    if conj.moment_mode is not MomentMode.RAW:
        raise ValueError("balance identities are stated for raw second moments")


def local_min_balance(conj: ConjugateSet, gamma: float) -> BalanceCheck:
    """
    First-order stationarity: E[g_b h_b^T] = gamma W W^T and E[g_a h_a^T] = gamma W^T W.
    """
    _require_raw(conj)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    rel_f = _rel_err(conj.cross_f, gamma * conj.Z_b) if gamma > 0 else None
    rel_b = _rel_err(conj.cross_b, gamma * conj.Z_a) if gamma > 0 else None
    return BalanceCheck(alpha_f=try_alignment(conj.cross_f, conj.Z_b), alpha_b=try_alignment(conj.cross_b, conj.Z_a),
                        rel_err_f=rel_f, rel_err_b=rel_b)


def stationary_outer_balance(conj: ConjugateSet, gamma: float) -> BalanceCheck:
    """
    Stationary outer products: z_b G_b = gamma^2 Z_b and z_a H_a = gamma^2 Z_a.
    """
    _require_raw(conj)
    if gamma < 0:
        raise ValueError("gamma must be non-negative")
    rel_f = _rel_err(conj.z_b * conj.G_b, gamma ** 2 * conj.Z_b) if gamma > 0 else None
    rel_b = _rel_err(conj.z_a * conj.H_a, gamma ** 2 * conj.Z_a) if gamma > 0 else None
    return BalanceCheck(alpha_f=try_alignment(conj.G_b, conj.Z_b), alpha_b=try_alignment(conj.H_a, conj.Z_a),
                        rel_err_f=rel_f, rel_err_b=rel_b)


@dataclass(frozen=True)
class BiasBalance:
    layer_index: int
    mean_gradient_norm: float
    decay_norm: float
    rel_err: float | None
    within_bound: bool


def bias_balance(model: MlpModel, tapes: list[LayerTape], layer: int, gamma: float,
                 slack: float = 0.1) -> BiasBalance:
    """
    A trained bias absorbs the mean neuron gradient: E[g_b] = gamma * b at stationarity.
    """
    dense = model.layers[layer]
    if not dense.has_bias:
        raise ValueError(f"layer {layer} has no bias")
    g_b = np.vstack([tape.g_b for tape in tapes if tape.layer_index == layer])
    mean_gradient = g_b.mean(axis=0)
    decay = gamma * dense.bias
    decay_norm = float(np.linalg.norm(decay))
    mean_norm = float(np.linalg.norm(mean_gradient))
    return BiasBalance(layer_index=layer, mean_gradient_norm=mean_norm, decay_norm=decay_norm,
                       rel_err=_rel_err(mean_gradient, decay),
                       within_bound=mean_norm <= decay_norm * (1.0 + slack))
