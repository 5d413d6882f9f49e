from crhlab.linalg.symmatrix import SymMatrix, SpectralDecomp, as_symmetric, eigh, jacobi_eigh
from crhlab.linalg.spectral import (DEFAULT_REL_TOL, pinv, mat_pow, projector,
                                    projection_distance, effective_rank)
from crhlab.linalg.alignment import pearson_alignment, try_alignment
from crhlab.linalg.powerlaw import PowerLawFit, power_law_fit

__all__ = [
    'SymMatrix', 'SpectralDecomp', 'as_symmetric', 'eigh', 'jacobi_eigh',
    'DEFAULT_REL_TOL', 'pinv', 'mat_pow', 'projector', 'projection_distance', 'effective_rank',
    'pearson_alignment', 'try_alignment', 'PowerLawFit', 'power_law_fit',
]
