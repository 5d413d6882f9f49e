import logging
from dataclasses import dataclass, field

from crhlab.crhkit import PhaseLabel, shared_projector_distance, verify_power_law
from crhlab.crhrelation_list import CRHRelationList
from crhlab.crhrelation_match import CRHRelationMatch
from crhlab.linalg import mat_pow, try_alignment
from crhlab.phasemodel.table_phase_model import PhaseType, Relation
from crhlab.theoremlab.instances import (PhaseInstance, synth_canonical_instance, synth_phase_instance)

logger = logging.getLogger(__name__)

PASS_ALPHA = 0.999
PROJECTOR_TOLERANCE = 1e-8

REDUNDANCY = 'redundancy'
POWER_LAW = 'power-law'
CANONICAL = 'canonical-subspace'
PROJECTOR = 'shared-projector'


@dataclass
class MasterCheck:
    phase: PhaseType
    seed: int
    parts: dict[str, CRHRelationList] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(results.all_passed() for results in self.parts.values())

    def rows(self) -> list[dict]:
        rows = []
        for part, results in self.parts.items():
            for result in results:
                rows.append({'theorem': part, 'phase': self.phase.label, 'seed': self.seed,
                             'relation': result.label, 'alpha': result.score,
                             'expected_exponent': result.expected_exponent,
                             'measured_exponent': result.measured_exponent,
                             'passed': result.passed})
        return rows


def _scored(label: str, score: float | None) -> CRHRelationMatch:
    match = CRHRelationMatch(label, threshold=PASS_ALPHA)
    match.score = score
    return match


def _relation_score(instance: PhaseInstance, relation: Relation, projected: bool = False) -> float | None:
    conj = instance.conjugate_set()
    info = relation.value
    matrices = conj.side(info.side)
    left, right = matrices[info.left], matrices[info.right]
    if projected:
        proj = mat_pow(matrices['Z'], 0)
        left, right = proj @ left @ proj, proj @ right @ proj
    return try_alignment(left, right)


def check_redundancy(d_in: int, d_out: int, seed: int) -> CRHRelationList:
    """Two relations in one direction imply the third."""
    results = CRHRelationList()
    for phase, side in ((PhaseType.BACK_CRH, 'a'), (PhaseType.FORW_CRH, 'b')):
        implied, *given = Relation.for_side(side)
        instance = synth_phase_instance(phase, d_in, d_out, seed, assumed=tuple(given))
        results.add_result(_scored(f"{implied.value.label} implied", _relation_score(instance, implied)))
    return results


def check_canonical_subspace(d_in: int, d_out: int, seed: int) -> CRHRelationList:
    """With a third relation added, all six alignments hold in the Z^0 subspace."""
    instance = synth_canonical_instance(d_in, d_out, seed)
    results = CRHRelationList()
    for relation in Relation:
        results.add_result(_scored(f"{relation.value.label} in Z0", _relation_score(instance, relation, True)))
    return results


def check_shared_projector(d_in: int, d_out: int, seed: int) -> CRHRelationList:
    """All six relations exact: every normalized matrix is one shared orthogonal projector."""
    instance = synth_phase_instance(PhaseType.CRH, d_in, d_out, seed)
    distance = shared_projector_distance(instance.conjugate_set())
    match = CRHRelationMatch('normalized matrices are a shared projector', threshold=-PROJECTOR_TOLERANCE)
    # score is the negated distance so that passing means distance <= tolerance
    match.score = -distance
    match.note = f"projection distance {distance:.3e}"
    results = CRHRelationList()
    results.add_result(match)
    return results


def check_master(instance: PhaseInstance, include_parts: bool = True) -> MasterCheck:
    """
    Verify the phase's predicted power relations on the instance, and, with
    include_parts, the redundancy, canonical subspace and shared projector statements
    on fresh instances of the same dims and seed.
    """
    d_out, d_in = instance.W.shape
    check = MasterCheck(phase=instance.phase, seed=instance.seed)
    check.parts[POWER_LAW] = verify_power_law(instance.conjugate_set(), PhaseLabel.for_phase(instance.phase),
                                              threshold=PASS_ALPHA)
    if include_parts:
        check.parts[REDUNDANCY] = check_redundancy(d_in, d_out, instance.seed)
        check.parts[CANONICAL] = check_canonical_subspace(d_in, d_out, instance.seed)
        check.parts[PROJECTOR] = check_shared_projector(d_in, d_out, instance.seed)
    for part, results in check.parts.items():
        for failure in results.failures():
            logger.warning("phase %s seed %d %s: %s failed (score %s)", instance.phase.label, instance.seed,
                           part, failure.label, failure.score)
    return check


def master_suite(seeds=range(20), d_in: int = 12, d_out: int = 12,
                 phases: list[PhaseType] | None = None) -> list[MasterCheck]:
    phases = PhaseType.table_phases() if phases is None else phases
    checks = []
    for seed in seeds:
        for index, phase in enumerate(phases):
            instance = synth_phase_instance(phase, d_in, d_out, seed)
            checks.append(check_master(instance, include_parts=index == 0))
    return checks
