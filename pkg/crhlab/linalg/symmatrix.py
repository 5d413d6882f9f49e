import logging
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt
import scipy.linalg

from crhlab.crherrors import NonFiniteError, ShapeError

logger = logging.getLogger(__name__)

SymMatrix = npt.NDArray[np.float64]

JACOBI_TOLERANCE = 1e-12
JACOBI_MAX_SWEEPS = 100


def as_symmetric(a, name: str = 'matrix') -> SymMatrix:
    """
    Validate a square finite matrix and return its symmetric part (A + A^T) / 2.
    """
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ShapeError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise ShapeError(f"{name} is empty")
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} has non-finite entries")
    return (arr + arr.T) / 2.0


@dataclass(frozen=True)
class SpectralDecomp:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def reconstruct(self) -> SymMatrix:
        return compose(self.eigenvectors, self.eigenvalues)


def compose(vectors: np.ndarray, values: np.ndarray) -> SymMatrix:
    out = (vectors * values) @ vectors.T
    return (out + out.T) / 2.0


def eigh(a, method: str = 'lapack') -> SpectralDecomp:
    """
    Symmetric eigendecomposition with eigenvalues sorted descending and each
    eigenvector's largest-magnitude component made positive.

    method is 'lapack' (scipy) or 'jacobi' (cyclic Jacobi rotations).
    """
    sym = as_symmetric(a)
    if method == 'lapack':
        values, vectors = scipy.linalg.eigh(sym)
    elif method == 'jacobi':
        values, vectors = jacobi_eigh(sym)
    else:
        raise ValueError(f"Unknown eigensolver method: {method}")

    order = np.argsort(-values, kind='stable')
    values = values[order]
    vectors = vectors[:, order]
    return SpectralDecomp(eigenvalues=values, eigenvectors=_fix_signs(vectors))


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    pivots = np.argmax(np.abs(vectors), axis=0)
    signs = np.sign(vectors[pivots, np.arange(vectors.shape[1])])
    signs[signs == 0] = 1.0
    return vectors * signs


def jacobi_eigh(a: SymMatrix,
                tolerance: float = JACOBI_TOLERANCE,
                max_sweeps: int = JACOBI_MAX_SWEEPS) -> tuple[np.ndarray, np.ndarray]:
    """
    Cyclic Jacobi eigenvalue iteration, row-by-row sweep order.
    Returns unsorted (eigenvalues, eigenvectors).
    """
    work = np.array(a, dtype=np.float64, copy=True)
    n = work.shape[0]
    vectors = np.eye(n)
    threshold = tolerance * max(np.linalg.norm(work), np.finfo(float).tiny)

    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.sum(work ** 2) - np.sum(np.diag(work) ** 2), 0.0))
        if off < threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = work[p, q]
                if apq == 0.0:
                    continue
                tau = (work[q, q] - work[p, p]) / (2.0 * apq)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c

                col_p = work[:, p].copy()
                col_q = work[:, q].copy()
                work[:, p] = c * col_p - s * col_q
                work[:, q] = s * col_p + c * col_q

                row_p = work[p, :].copy()
                row_q = work[q, :].copy()
                work[p, :] = c * row_p - s * row_q
                work[q, :] = s * row_p + c * row_q
                work[p, q] = 0.0
                work[q, p] = 0.0

                vec_p = vectors[:, p].copy()
                vec_q = vectors[:, q].copy()
                vectors[:, p] = c * vec_p - s * vec_q
                vectors[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning("Jacobi iteration stopped after %d sweeps without converging", max_sweeps)

    return np.diag(work).copy(), vectors
