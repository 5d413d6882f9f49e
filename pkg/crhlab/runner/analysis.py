import logging
from dataclasses import dataclass

from crhlab.crhkit import (AlignmentReport, Direction, FdtReport, PahEntry, PhaseLabel, classify_phase,
                           fdt_residual, pah_scan, six_alignments, verify_power_law)
from crhlab.crhrelation_list import CRHRelationList
from crhlab.linalg import effective_rank
from crhlab.probes import (BalanceCheck, ConjugateSet, MomentMode, StationarityResidual, local_min_balance,
                           stationarity_residual)
from crhlab.runner.config import ExperimentConfig
from crhlab.runner.snapshot import RunSnapshot

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class LayerAnalysis:
    layer_index: int
    step: int
    alignment: AlignmentReport
    phase: PhaseLabel
    relations: CRHRelationList | None
    fdt_forward: FdtReport
    fdt_backward: FdtReport
    balance: BalanceCheck
    pah: list[PahEntry]
    effective_rank: int
    stationarity: StationarityResidual | None = None

    @property
    def min_power_alpha(self) -> float | None:
        if self.relations is None:
            return None
        return self.relations.min_score()


def analyze_layer(raw: ConjugateSet, aligned: ConjugateSet, config: ExperimentConfig, step: int,
                  previous_raw: ConjugateSet | None = None) -> LayerAnalysis:
    """
    Everything reported for one layer at one step. Alignments and the phase use the
    configured moment mode; spectra, balance and stationarity use raw moments.
    """
    settings = config.analysis
    rank = effective_rank(raw.H_a, settings.rank_tol)
    alignment = six_alignments(aligned, step=step, effective_rank=rank)
    phase = classify_phase(alignment, settings.tau, settings.near_margin)
    relations = verify_power_law(raw, phase, settings.rel_tol) if phase.is_table_phase else None

    eta, gamma = config.train.learning_rate, config.train.weight_decay
    stationarity = None
    if previous_raw is not None:
        stationarity = stationarity_residual(raw, previous_raw, step=step)

    return LayerAnalysis(
        layer_index=raw.layer_index, step=step, alignment=alignment, phase=phase, relations=relations,
        fdt_forward=fdt_residual(raw, eta, gamma, Direction.FORWARD),
        fdt_backward=fdt_residual(raw, eta, gamma, Direction.BACKWARD),
        balance=local_min_balance(raw, gamma),
        pah=pah_scan(raw, k=settings.pah_k),
        effective_rank=rank, stationarity=stationarity,
    )


def analyze_snapshot(snapshot: RunSnapshot, config: ExperimentConfig,
                     previous: RunSnapshot | None = None) -> list[LayerAnalysis]:
    mode = config.probe.moment_mode
    results = []
    for layer in range(snapshot.depth):
        previous_raw = None if previous is None else previous.layer_set(layer, MomentMode.RAW)
        results.append(analyze_layer(snapshot.layer_set(layer, MomentMode.RAW), snapshot.layer_set(layer, mode),
                                     config, snapshot.step, previous_raw))
    return results
