import logging
from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import ShapeError
from crhlab.linalg import try_alignment
from crhlab.phasemodel.table_phase_model import PhaseType, Relation
from crhlab.probes import ConjugateSet, MomentMode

logger = logging.getLogger(__name__)

MAX_ATTEMPTS = 10
EXACT_TOLERANCE = 1e-12


@dataclass(frozen=True, eq=False)
class PhaseInstance:
    """
    A layer W = U diag(s) V^T with free moments H_a, G_b and the derived
    H_b = W H_a W^T, G_a = W^T G_b W, Z_a = W^T W, Z_b = W W^T.
    """
    phase: PhaseType
    W: np.ndarray
    H_a: np.ndarray
    G_b: np.ndarray
    H_b: np.ndarray
    G_a: np.ndarray
    Z_a: np.ndarray
    Z_b: np.ndarray
    seed: int
    rank: int
    assumed: tuple[Relation, ...] = ()

    @classmethod
    def from_free(cls, phase: PhaseType, weight: np.ndarray, h_a: np.ndarray, g_b: np.ndarray,
                  seed: int, rank: int, assumed: tuple[Relation, ...]) -> 'PhaseInstance':
        def sym(m):
            return (m + m.T) / 2.0

        return cls(phase=phase, W=weight, H_a=sym(h_a), G_b=sym(g_b),
                   H_b=sym(weight @ h_a @ weight.T), G_a=sym(weight.T @ g_b @ weight),
                   Z_a=sym(weight.T @ weight), Z_b=sym(weight @ weight.T),
                   seed=seed, rank=rank, assumed=assumed)

    def conjugate_set(self, layer_index: int = 0) -> ConjugateSet:
        zeros_a = np.zeros_like(self.Z_a)
        zeros_b = np.zeros_like(self.Z_b)
        return ConjugateSet(layer_index=layer_index, H_a=self.H_a, G_a=self.G_a, Z_a=self.Z_a,
                            H_b=self.H_b, G_b=self.G_b, Z_b=self.Z_b,
                            z_a=float(np.trace(self.G_b)), z_b=float(np.trace(self.H_a)),
                            cross_f=zeros_b, cross_b=zeros_a, moment_mode=MomentMode.RAW)

    def assumed_scores(self) -> dict[Relation, float | None]:
        conj = self.conjugate_set()
        scores = {}
        for relation in self.assumed:
            info = relation.value
            matrices = conj.side(info.side)
            scores[relation] = try_alignment(matrices[info.left], matrices[info.right])
        return scores


def _orthogonal(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _positive(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.uniform(0.5, 1.5, size)


def _spectra(phase: PhaseType, rng: np.random.Generator, rank: int, d_in: int, d_out: int):
    """
    Singular values s (length rank) and the diagonal moments h (length d_in) and
    g (length d_out) in the singular bases, chosen so the phase's two assumed
    relations hold exactly. Entries past `rank` live in the null spaces of W.
    """
    s = np.sort(_positive(rng, rank))[::-1]
    s0 = float(_positive(rng, 1)[0])
    k, m = rng.uniform(0.5, 2.0, 2)
    h_null = np.zeros(d_in - rank)
    g_null = np.zeros(d_out - rank)
    free_h_null = _positive(rng, d_in - rank)
    free_g_null = _positive(rng, d_out - rank)
    flat = np.full(rank, s0)

    if phase is PhaseType.CRH:
        s, h, g = flat, np.full(rank, k), np.full(rank, m)
    elif phase is PhaseType.BACK_CRH:
        h, g, g_null = k * s ** 2, np.full(rank, m), free_g_null
    elif phase is PhaseType.FORW_CRH:
        h, g, h_null = np.full(rank, k), m * s ** 2, free_h_null
    elif phase is PhaseType.PHASE_1:
        support = rank - 1
        s = np.concatenate([np.full(support, s0), s[support:]])
        g = np.concatenate([_positive(rng, support), np.zeros(rank - support)])
        h = k * s ** 2 * g
    elif phase is PhaseType.PHASE_2:
        s = flat
        h, g, g_null = np.full(rank, k), _positive(rng, rank), free_g_null
    elif phase is PhaseType.PHASE_3:
        s = flat
        h, g, h_null = _positive(rng, rank), np.full(rank, m), free_h_null
    elif phase is PhaseType.PHASE_4:
        h, g, g_null = np.full(rank, k), m * s ** -2, free_g_null
    elif phase is PhaseType.PHASE_5:
        h, g = k * s ** 2, m * s ** 4
    elif phase is PhaseType.PHASE_6:
        h, g = k * s ** 4, m * s ** 2
    elif phase is PhaseType.PHASE_7:
        h, g, h_null = k * s ** -2, np.full(rank, m), free_h_null
    elif phase is PhaseType.PHASE_8:
        h, g = k * s ** 2, m * s ** 2
    elif phase is PhaseType.PHASE_9:
        h, g, h_null, g_null = np.full(rank, k), np.full(rank, m), free_h_null, free_g_null
    else:
        raise ValueError(f"phase '{phase.label}' has no construction")

    return s, np.concatenate([h, h_null]), np.concatenate([g, g_null])


def _assumed(phase: PhaseType) -> tuple[Relation, ...]:
    if phase is PhaseType.CRH:
        return tuple(Relation)
    if phase is PhaseType.BACK_CRH:
        return tuple(Relation.for_side('a'))
    if phase is PhaseType.FORW_CRH:
        return tuple(Relation.for_side('b'))
    return phase.value.backward, phase.value.forward


def synth_phase_instance(phase: PhaseType, d_in: int = 12, d_out: int = 12, seed: int = 0,
                         rank: int | None = None, assumed: tuple[Relation, ...] | None = None) -> PhaseInstance:
    """
    Random layer whose free moments satisfy the phase's assumed backward and forward
    relations exactly. The default rank min(d_in, d_out) - 1 leaves a null space on
    both sides; a failed construction retries with a smaller rank.

    `assumed` narrows the relations the construction is accepted on; the
    three-relation phases are built from RWA and GWA alone.
    """
    if d_in < 4 or d_out < 4:
        raise ShapeError(f"phase instances need d_in, d_out >= 4, got ({d_in}, {d_out})")
    rank = min(d_in, d_out) - 1 if rank is None else rank
    assumed = _assumed(phase) if assumed is None else tuple(assumed)
    if not assumed:
        raise ValueError("an instance needs at least one assumed relation")

    for attempt in range(MAX_ATTEMPTS):
        rng = np.random.default_rng([seed, attempt])
        s, h, g = _spectra(phase, rng, rank, d_in, d_out)
        u = _orthogonal(rng, d_out)
        v = _orthogonal(rng, d_in)
        weight = (u[:, :rank] * s) @ v[:, :rank].T
        instance = PhaseInstance.from_free(phase, weight, (v * h) @ v.T, (u * g) @ u.T,
                                           seed=seed, rank=rank, assumed=assumed)
        scores = instance.assumed_scores()
        if all(score is not None and score >= 1.0 - EXACT_TOLERANCE for score in scores.values()):
            return instance
        logger.debug("phase %s seed %d attempt %d: assumed relations not exact, scores %s",
                     phase.label, seed, attempt, scores)
        rank = max(3, rank - 1)
    raise ValueError(f"could not construct phase {phase.label} instance for dims ({d_in}, {d_out})")


def synth_canonical_instance(d_in: int = 12, d_out: int = 12, seed: int = 0) -> PhaseInstance:
    """
    A layer with equal singular values, isotropic G_b on the row space and H_a
    carrying a free null-space component: GWA on both sides plus forward RWA hold
    in the full space, and all six relations hold after projecting onto Z^0.
    """
    rank = min(d_in, d_out) - 1
    rng = np.random.default_rng([seed, 99])
    s0 = float(_positive(rng, 1)[0])
    k, m = rng.uniform(0.5, 2.0, 2)
    h = np.concatenate([np.full(rank, k), _positive(rng, d_in - rank)])
    g = np.concatenate([np.full(rank, m), np.zeros(d_out - rank)])
    u = _orthogonal(rng, d_out)
    v = _orthogonal(rng, d_in)
    weight = (u[:, :rank] * s0) @ v[:, :rank].T
    return PhaseInstance.from_free(PhaseType.CRH, weight, (v * h) @ v.T, (u * g) @ u.T, seed=seed, rank=rank,
                                   assumed=(Relation.GWA_A, Relation.RWA_B, Relation.GWA_B))
