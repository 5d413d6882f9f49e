import logging

import numpy as np

from crhlab.linalg.symmatrix import SymMatrix, as_symmetric, compose, eigh

logger = logging.getLogger(__name__)

DEFAULT_REL_TOL = 1e-10


def _kept(values: np.ndarray, rel_tol: float) -> np.ndarray:
    if not 0.0 < rel_tol < 1.0:
        raise ValueError(f"rel_tol must be in (0, 1), got {rel_tol}")
    scale = np.max(np.abs(values)) if values.size else 0.0
    if scale == 0.0:
        return np.zeros(values.shape, dtype=bool)
    return np.abs(values) > rel_tol * scale


def pinv(a, rel_tol: float = DEFAULT_REL_TOL) -> SymMatrix:
    """Moore-Penrose pseudo-inverse, cutting eigenvalues below rel_tol * |lambda_max|."""
    return mat_pow(a, -1, rel_tol)


def mat_pow(a, n: int, rel_tol: float = DEFAULT_REL_TOL) -> SymMatrix:
    """
    Integer matrix power of a symmetric matrix.

    n > 0 is the ordinary power; n == 0 is the orthogonal projector onto the
    column space (A A^+); n < 0 is the |n|-th power of the pseudo-inverse.
    """
    if int(n) != n:
        raise ValueError(f"Matrix power must be an integer, got {n}")
    n = int(n)
    decomp = eigh(a)
    values = decomp.eigenvalues
    if n > 0:
        powered = values ** n
    else:
        keep = _kept(values, rel_tol)
        powered = np.zeros_like(values)
        powered[keep] = values[keep] ** n if n < 0 else 1.0
    return compose(decomp.eigenvectors, powered)


def projector(a, rel_tol: float = DEFAULT_REL_TOL) -> SymMatrix:
    return mat_pow(a, 0, rel_tol)


def projection_distance(p) -> float:
    sym = as_symmetric(p, 'projector')
    return float(np.linalg.norm(sym @ sym - sym) / max(1.0, np.linalg.norm(sym)))


def effective_rank(a, rel_tol: float = 1e-6) -> int:
    values = eigh(a).eigenvalues
    top = values[0]
    if top <= 0.0:
        return 0
    if values[-1] < -DEFAULT_REL_TOL * top:
        logger.warning("effective_rank: clamping negative eigenvalue %.3e (lambda_max %.3e)", values[-1], top)
    values = np.clip(values, 0.0, None)
    return int(np.count_nonzero(values > rel_tol * top))
