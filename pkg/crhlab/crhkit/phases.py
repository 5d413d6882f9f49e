import logging
from dataclasses import dataclass, field

from crhlab.crhkit.alignments import AlignmentReport
from crhlab.linalg import PowerLawFit
from crhlab.phasemodel.table_phase_model import PhaseLaw, PhaseType, Relation, TablePhaseModel

logger = logging.getLogger(__name__)

DEFAULT_TAU = 0.9
NEAR_MARGIN = 0.05


@dataclass
class PhaseLabel:
    phase: PhaseType
    held: frozenset[Relation] = frozenset()
    near_redundant: bool = False
    layer_index: int = 0
    step: int = 0
    measured: dict[str, PowerLawFit] = field(default_factory=dict)

    @classmethod
    def for_phase(cls, phase: PhaseType) -> 'PhaseLabel':
        return cls(phase=phase)

    @property
    def is_table_phase(self) -> bool:
        return self.phase.value.backward_law is not None

    def predicted(self, side: str) -> PhaseLaw | None:
        return self.phase.law(side)

    def projector(self, side: str) -> str | None:
        law = self.predicted(side)
        return None if law is None else law.projector

    def held_labels(self) -> str:
        return ';'.join(relation.value.label for relation in Relation if relation in self.held)


def _direction(report: AlignmentReport, side: str, tau: float, near_margin: float):
    """(full, top relation, near-redundant flag) for one direction."""
    scores = {rel: score for rel, score in report.side_scores(side).items() if score is not None}
    held = sorted((rel for rel, score in scores.items() if score >= tau), key=lambda rel: -scores[rel])
    if len(held) == 3:
        return True, held[0], False
    if len(held) == 2:
        third = [rel for rel in Relation.for_side(side) if rel not in held][0]
        if scores.get(third) is not None and scores[third] >= tau - near_margin:
            return True, held[0], False
        return False, held[0], True
    if len(held) == 1:
        return False, held[0], False
    return False, None, False


def classify_phase(report: AlignmentReport, tau: float = DEFAULT_TAU,
                   near_margin: float = NEAR_MARGIN) -> PhaseLabel:
    """
    Map the held relations (score >= tau) of one layer onto the phase table.

    Two held relations in a direction count as the full direction only when the
    third scores at least tau - near_margin; otherwise the top relation is used and
    the label is flagged near-redundant.
    """
    if not 0.0 < tau < 1.0:
        raise ValueError(f"tau must be in (0, 1), got {tau}")

    held = frozenset(rel for rel, score in report.scores.items() if score is not None and score >= tau)
    full_a, top_a, near_a = _direction(report, 'a', tau, near_margin)
    full_b, top_b, near_b = _direction(report, 'b', tau, near_margin)

    if full_a and full_b:
        phase = PhaseType.CRH
    elif full_a:
        phase = PhaseType.BACK_CRH
    elif full_b:
        phase = PhaseType.FORW_CRH
    elif top_a is not None and top_b is not None:
        phase = TablePhaseModel.phase_for_pair(top_a, top_b)
    elif held:
        phase = PhaseType.PARTIAL
    else:
        phase = PhaseType.NONE

    return PhaseLabel(phase=phase, held=held, near_redundant=near_a or near_b,
                      layer_index=report.layer_index, step=report.step)
