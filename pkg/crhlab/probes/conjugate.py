import logging
from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import InsufficientDataError
from crhlab.netcore import LayerTape, MlpModel
from crhlab.probes.moments import MomentAccumulator, MomentMode

logger = logging.getLogger(__name__)

# keys in the matrix exchange format
MATRIX_KEYS = ('Ha', 'Ga', 'Za', 'Hb', 'Gb', 'Zb', 'Xf', 'Xb')


@dataclass(frozen=True)
class NormRatios:
    """||E v||^2 / E||v||^2 for h and g on both sides of the layer."""
    h_a: float
    g_a: float
    h_b: float
    g_b: float


@dataclass(frozen=True, eq=False)
class ConjugateSet:
    layer_index: int
    H_a: np.ndarray
    G_a: np.ndarray
    Z_a: np.ndarray
    H_b: np.ndarray
    G_b: np.ndarray
    Z_b: np.ndarray
    z_a: float
    z_b: float
    cross_f: np.ndarray
    cross_b: np.ndarray
    moment_mode: MomentMode = MomentMode.RAW
    sample_count: int = 0
    cross_asymmetry_f: float = 0.0
    cross_asymmetry_b: float = 0.0
    norm_ratios: NormRatios | None = None

    def side(self, side: str) -> dict[str, np.ndarray]:
        if side == 'a':
            return {'H': self.H_a, 'Z': self.Z_a, 'G': self.G_a}
        if side == 'b':
            return {'H': self.H_b, 'Z': self.Z_b, 'G': self.G_b}
        raise ValueError(f"side must be 'a' or 'b', got {side}")

    def matrices(self) -> dict[str, np.ndarray]:
        return {'Ha': self.H_a, 'Ga': self.G_a, 'Za': self.Z_a, 'Hb': self.H_b, 'Gb': self.G_b,
                'Zb': self.Z_b, 'Xf': self.cross_f, 'Xb': self.cross_b}

    def scalars(self) -> dict:
        out = {'layer_index': self.layer_index, 'moment_mode': self.moment_mode.value,
               'z_a': self.z_a, 'z_b': self.z_b, 'sample_count': self.sample_count,
               'cross_asymmetry_f': self.cross_asymmetry_f, 'cross_asymmetry_b': self.cross_asymmetry_b}
        if self.norm_ratios is not None:
            out['norm_ratios'] = {'h_a': self.norm_ratios.h_a, 'g_a': self.norm_ratios.g_a,
                                  'h_b': self.norm_ratios.h_b, 'g_b': self.norm_ratios.g_b}
        return out

    @classmethod
    def from_parts(cls, matrices: dict[str, np.ndarray], scalars: dict) -> 'ConjugateSet':
        ratios = scalars.get('norm_ratios')
        return cls(layer_index=int(scalars['layer_index']),
                   H_a=matrices['Ha'], G_a=matrices['Ga'], Z_a=matrices['Za'],
                   H_b=matrices['Hb'], G_b=matrices['Gb'], Z_b=matrices['Zb'],
                   cross_f=matrices['Xf'], cross_b=matrices['Xb'],
                   z_a=float(scalars['z_a']), z_b=float(scalars['z_b']),
                   moment_mode=MomentMode.get_by_label(scalars['moment_mode']),
                   sample_count=int(scalars.get('sample_count', 0)),
                   cross_asymmetry_f=float(scalars.get('cross_asymmetry_f', 0.0)),
                   cross_asymmetry_b=float(scalars.get('cross_asymmetry_b', 0.0)),
                   norm_ratios=NormRatios(**ratios) if ratios else None)


def _stack(tapes: list[LayerTape], name: str) -> np.ndarray:
    return np.vstack([getattr(tape, name) for tape in tapes])


def _moment(vectors: np.ndarray, mode: MomentMode) -> np.ndarray:
    return MomentAccumulator.for_mode(vectors.shape[1], mode).accumulate_batch(vectors).finalize()


def _prepared(vectors: np.ndarray, mode: MomentMode) -> np.ndarray:
    if mode is MomentMode.RAW:
        return vectors
    norms = np.linalg.norm(vectors, axis=1, keepdims=True)
    unit = np.divide(vectors, norms, out=np.zeros_like(vectors), where=norms > 0)
    return unit - unit.mean(axis=0)


def _cross(left: np.ndarray, right: np.ndarray) -> tuple[np.ndarray, float]:
    raw = left.T @ right / left.shape[0]
    norm = np.linalg.norm(raw)
    asymmetry = float(np.linalg.norm(raw - raw.T) / norm) if norm > 0 else 0.0
    return (raw + raw.T) / 2.0, asymmetry


def _mean_ratio(vectors: np.ndarray) -> float:
    second = float(np.mean(np.sum(vectors ** 2, axis=1)))
    if second == 0.0:
        return 0.0
    return float(np.sum(vectors.mean(axis=0) ** 2) / second)


def conjugate_set(model: MlpModel, tapes: list[LayerTape], layer: int,
                  mode: MomentMode = MomentMode.CENTERED_NORMALIZED) -> ConjugateSet:
    """
    The six conjugate matrices of one layer, its norm scalars z_a = E||g_b||^2 and
    z_b = E||h_a||^2 (always raw) and the symmetrized cross terms E[g_b h_b^T], E[g_a h_a^T].
    """
    selected = [tape for tape in tapes if tape.layer_index == layer]
    if not selected or sum(tape.batch_size for tape in selected) == 0:
        raise InsufficientDataError(f"no tape samples for layer {layer}")

    h_a, h_b = _stack(selected, 'h_a'), _stack(selected, 'h_b')
    g_a, g_b = _stack(selected, 'g_a'), _stack(selected, 'g_b')
    n = h_a.shape[0]
    if n < max(h_a.shape[1], h_b.shape[1]):
        logger.warning("layer %d: %d samples for dims (%d, %d); moment estimates are rank deficient",
                       layer, n, h_a.shape[1], h_b.shape[1])

    weight = model.layers[layer].augmented()
    cross_f, asym_f = _cross(_prepared(g_b, mode), _prepared(h_b, mode))
    cross_b, asym_b = _cross(_prepared(g_a, mode), _prepared(h_a, mode))
    z_a = weight.T @ weight
    z_b = weight @ weight.T

    return ConjugateSet(
        layer_index=layer,
        H_a=_moment(h_a, mode), G_a=_moment(g_a, mode), Z_a=(z_a + z_a.T) / 2.0,
        H_b=_moment(h_b, mode), G_b=_moment(g_b, mode), Z_b=(z_b + z_b.T) / 2.0,
        z_a=float(np.mean(np.sum(g_b ** 2, axis=1))),
        z_b=float(np.mean(np.sum(h_a ** 2, axis=1))),
        cross_f=cross_f, cross_b=cross_b,
        moment_mode=mode, sample_count=n,
        cross_asymmetry_f=asym_f, cross_asymmetry_b=asym_b,
        norm_ratios=NormRatios(h_a=_mean_ratio(h_a), g_a=_mean_ratio(g_a),
                               h_b=_mean_ratio(h_b), g_b=_mean_ratio(g_b)),
    )


def conjugate_sets(model: MlpModel, tapes: list[LayerTape],
                   mode: MomentMode = MomentMode.CENTERED_NORMALIZED) -> list[ConjugateSet]:
    return [conjugate_set(model, tapes, layer, mode) for layer in range(model.depth)]
