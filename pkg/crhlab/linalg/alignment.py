import numpy as np

from crhlab.crherrors import ShapeError, UndefinedAlignmentError

CONSTANT_TOLERANCE = 1e-14


def pearson_alignment(a, b) -> float:
    """
    Elementwise Pearson correlation between two equal-size matrices.

    alpha = <A - mean(A), B - mean(B)> / (||A - mean(A)||_F ||B - mean(B)||_F),
    so |alpha| = 1 exactly when A = c0 B + c1 J.
    """
    left = np.asarray(a, dtype=np.float64)
    right = np.asarray(b, dtype=np.float64)
    if left.shape != right.shape:
        raise ShapeError(f"alignment needs equal shapes, got {left.shape} and {right.shape}")

    left_c = left - left.mean()
    right_c = right - right.mean()
    left_norm = np.linalg.norm(left_c)
    right_norm = np.linalg.norm(right_c)
    if left_norm <= CONSTANT_TOLERANCE * np.linalg.norm(left) or left_norm == 0.0:
        raise UndefinedAlignmentError("alignment undefined: first matrix is constant")
    if right_norm <= CONSTANT_TOLERANCE * np.linalg.norm(right) or right_norm == 0.0:
        raise UndefinedAlignmentError("alignment undefined: second matrix is constant")

    value = float(np.sum(left_c * right_c) / (left_norm * right_norm))
    return float(np.clip(value, -1.0, 1.0))


def try_alignment(a, b) -> float | None:
    try:
        return pearson_alignment(a, b)
    except UndefinedAlignmentError:
        return None
