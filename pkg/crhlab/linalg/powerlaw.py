import logging
from dataclasses import dataclass

import numpy as np
from scipy import stats

from crhlab.crherrors import InsufficientDataError

logger = logging.getLogger(__name__)

MIN_PAIRS = 3
FLAT_LOG_STD = 1e-8


@dataclass(frozen=True)
class PowerLawFit:
    exponent: float
    r2: float
    intercept: float
    n_pairs: int


def power_law_fit(spec_a, spec_b, k: int | None = None,
                  rel_tol: float = 1e-10, reverse_b: bool = False) -> PowerLawFit:
    """
    Fit log(spec_a) = exponent * log(spec_b) + c over the top-k eigenvalues of each
    spectrum, paired by rank. With reverse_b the retained b values are paired in
    ascending order (for negative predicted exponents).
    """
    a = np.sort(np.asarray(spec_a, dtype=np.float64))[::-1]
    b = np.sort(np.asarray(spec_b, dtype=np.float64))[::-1]
    if k is not None:
        a, b = a[:k], b[:k]
    count = min(a.size, b.size)
    a, b = a[:count], b[:count]

    a = a[a > rel_tol * a[0]] if a.size and a[0] > 0 else a[:0]
    b = b[b > rel_tol * b[0]] if b.size and b[0] > 0 else b[:0]
    count = min(a.size, b.size)
    if count < MIN_PAIRS:
        raise InsufficientDataError(f"power-law fit needs {MIN_PAIRS} positive pairs, got {count}")
    a, b = a[:count], b[:count]
    if reverse_b:
        b = b[::-1]

    x = np.log(b)
    y = np.log(a)
    if np.std(x) < FLAT_LOG_STD:
        raise InsufficientDataError("power-law fit undefined: flat spectrum")
    if np.std(y) < FLAT_LOG_STD:
        return PowerLawFit(exponent=0.0, r2=1.0, intercept=float(y.mean()), n_pairs=count)

    result = stats.linregress(x, y)
    return PowerLawFit(exponent=float(result.slope), r2=float(result.rvalue ** 2),
                       intercept=float(result.intercept), n_pairs=count)
