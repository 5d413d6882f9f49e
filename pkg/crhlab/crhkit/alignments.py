import logging
from dataclasses import dataclass

from crhlab.linalg import try_alignment
from crhlab.phasemodel.table_phase_model import Relation
from crhlab.probes import ConjugateSet, MomentMode

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class AlignmentReport:
    layer_index: int
    step: int
    scores: dict[Relation, float | None]
    cross_f: float | None = None
    cross_b: float | None = None
    moment_mode: MomentMode = MomentMode.CENTERED_NORMALIZED
    effective_rank: int | None = None

    def score(self, relation: Relation) -> float | None:
        return self.scores.get(relation)

    def side_scores(self, side: str) -> dict[Relation, float | None]:
        return {relation: self.scores.get(relation) for relation in Relation.for_side(side)}


def six_alignments(conj: ConjugateSet, step: int = 0, effective_rank: int | None = None) -> AlignmentReport:
    """
    alpha(H_c, G_c), alpha(H_c, Z_c), alpha(G_c, Z_c) for c in {a, b}; a constant
    matrix leaves its scores undefined (None).
    """
    scores = {}
    for relation in Relation:
        info = relation.value
        matrices = conj.side(info.side)
        scores[relation] = try_alignment(matrices[info.left], matrices[info.right])
        if scores[relation] is None:
            logger.debug("layer %d: %s undefined (constant matrix)", conj.layer_index, info.label)
    return AlignmentReport(layer_index=conj.layer_index, step=step, scores=scores,
                           cross_f=try_alignment(conj.cross_f, conj.Z_b),
                           cross_b=try_alignment(conj.cross_b, conj.Z_a),
                           moment_mode=conj.moment_mode, effective_rank=effective_rank)
