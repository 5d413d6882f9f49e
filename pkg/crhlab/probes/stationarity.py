from dataclasses import dataclass, field

import numpy as np

from crhlab.crherrors import ShapeError
from crhlab.probes.conjugate import ConjugateSet

RESIDUAL_FIELDS = ('h_a', 'g_a', 'z_a', 'h_b', 'g_b', 'z_b')


@dataclass(frozen=True)
class StationarityResidual:
    step: int
    layer_index: int
    h_a: float
    g_a: float
    z_a: float
    h_b: float
    g_b: float
    z_b: float

    def values(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in RESIDUAL_FIELDS)


@dataclass
class StationarityTrace:
    layer_index: int
    entries: list[StationarityResidual] = field(default_factory=list)

    def append(self, residual: StationarityResidual):
        if residual.layer_index != self.layer_index:
            raise ShapeError(f"residual for layer {residual.layer_index} added to trace of layer {self.layer_index}")
        if self.entries and residual.step <= self.entries[-1].step:
            raise ValueError("stationarity steps must increase")
        self.entries.append(residual)

    def tail(self, count: int = 1) -> list[StationarityResidual]:
        return self.entries[-count:]


def _relative_change(current: np.ndarray, previous: np.ndarray) -> float:
    change = np.linalg.norm(current - previous)
    scale = np.linalg.norm(previous)
    if scale == 0.0:
        return 0.0 if change == 0.0 else float('inf')
    return float(change / scale)


def stationarity_residual(current: ConjugateSet, previous: ConjugateSet, step: int = 0,
                          trace: StationarityTrace | None = None) -> StationarityResidual:
    """||D_now - D_prev||_F / ||D_prev||_F for each conjugate matrix."""
    if current.layer_index != previous.layer_index:
        raise ShapeError(f"layer mismatch: {current.layer_index} vs {previous.layer_index}")
    if current.moment_mode is not previous.moment_mode:
        raise ValueError(f"moment mode mismatch: {current.moment_mode.value} vs {previous.moment_mode.value}")

    residual = StationarityResidual(
        step=step, layer_index=current.layer_index,
        h_a=_relative_change(current.H_a, previous.H_a), g_a=_relative_change(current.G_a, previous.G_a),
        z_a=_relative_change(current.Z_a, previous.Z_a), h_b=_relative_change(current.H_b, previous.H_b),
        g_b=_relative_change(current.G_b, previous.G_b), z_b=_relative_change(current.Z_b, previous.Z_b),
    )
    if trace is not None:
        trace.append(residual)
    return residual
