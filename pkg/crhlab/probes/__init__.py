from crhlab.probes.moments import MomentMode, MomentAccumulator, accumulate
from crhlab.probes.conjugate import MATRIX_KEYS, NormRatios, ConjugateSet, conjugate_set, conjugate_sets
from crhlab.probes.stationarity import StationarityResidual, StationarityTrace, stationarity_residual
from crhlab.probes.balance import (BalanceCheck, BiasBalance, local_min_balance, stationary_outer_balance,
                                   bias_balance)

__all__ = [
    'MomentMode', 'MomentAccumulator', 'accumulate',
    'MATRIX_KEYS', 'NormRatios', 'ConjugateSet', 'conjugate_set', 'conjugate_sets',
    'StationarityResidual', 'StationarityTrace', 'stationarity_residual',
    'BalanceCheck', 'BiasBalance', 'local_min_balance', 'stationary_outer_balance', 'bias_balance',
]
