import logging
from dataclasses import dataclass

import numpy as np

from crhlab.crherrors import InsufficientDataError
from crhlab.crhkit.phases import PhaseLabel
from crhlab.crhrelation_list import CRHRelationList
from crhlab.crhrelation_match import CRHRelationMatch
from crhlab.linalg import DEFAULT_REL_TOL, eigh, mat_pow, power_law_fit, projection_distance, try_alignment
from crhlab.probes import ConjugateSet

logger = logging.getLogger(__name__)

PAIRS = (('H', 'Z'), ('H', 'G'), ('Z', 'G'))
PAH_PAIRS = (('H', 'G'), ('H', 'Z'), ('G', 'Z'))
PAH_BAND = (0.25, 4.0)
MIN_PROJECTOR_RANK = 3


def _relation_label(left: str, p: int, right: str, q: int, side: str, tilde: bool) -> str:
    mark = '~' if tilde else ''

    def term(name, power):
        return f"{name}{mark}_{side}" + ('' if power == 1 else f"^{power}")

    return f"{term(left, p)} ~ {term(right, q)}"


def _spectrum(matrix: np.ndarray) -> np.ndarray:
    return eigh(matrix).eigenvalues


def verify_power_law(conj: ConjugateSet, label: PhaseLabel, rel_tol: float = DEFAULT_REL_TOL,
                     threshold: float = 0.999) -> CRHRelationList:
    """
    Check every reciprocal power relation the phase predicts.

    Matrices are projected on both sides by the phase projector (D~ = P D P), each
    predicted A~^p ~ B~^q is scored by the alignment of the two matrix powers, and
    when both powers are nonzero the eigenvalue exponent is fitted against q / p.
    """
    if not label.is_table_phase:
        raise ValueError(f"phase '{label.phase.label}' has no predicted relations")

    results = CRHRelationList()
    for side in ('a', 'b'):
        law = label.predicted(side)
        matrices = conj.side(side)
        if law.projector is None:
            proj = None
            tilde = matrices
            rank = None
        else:
            proj = mat_pow(matrices[law.projector], 0, rel_tol)
            tilde = {name: proj @ matrix @ proj for name, matrix in matrices.items()}
            rank = int(round(np.trace(proj)))

        powers = {'H': law.h, 'Z': law.z, 'G': law.g}
        relations = [(left, powers[left], right, powers[right]) for left, right in PAIRS]
        relations.extend(law.extra)

        for left, p, right, q in relations:
            match = CRHRelationMatch(_relation_label(left, p, right, q, side, proj is not None), threshold=threshold)
            left_power = mat_pow(tilde[left], p, rel_tol)
            right_power = mat_pow(tilde[right], q, rel_tol)
            match.add_match('left', left_power)
            match.add_match('right', right_power)
            if proj is not None:
                match.add_match('projector', proj)
            match.score = try_alignment(left_power, right_power)

            if p != 0 and q != 0:
                match.expected_exponent = q / p
                if rank is not None and rank < MIN_PROJECTOR_RANK:
                    match.note = f"projector rank {rank} too small for a spectral fit"
                else:
                    try:
                        fit = power_law_fit(_spectrum(tilde[left]), _spectrum(tilde[right]), k=rank,
                                            rel_tol=rel_tol, reverse_b=(q / p) < 0)
                        match.measured_exponent = fit.exponent
                        match.r2 = fit.r2
                        label.measured[match.label] = fit
                    except InsufficientDataError as exc:
                        match.note = str(exc)
            results.add_result(match)
    return results


def shared_projector_distance(conj: ConjugateSet) -> float:
    """
    Largest idempotency defect of the six matrices after scaling by their top eigenvalue,
    together with the spread between their column-space projectors.
    """
    worst = 0.0
    projectors = []
    for side in ('a', 'b'):
        for matrix in conj.side(side).values():
            top = _spectrum(matrix)[0]
            if top <= 0:
                return float('inf')
            worst = max(worst, projection_distance(matrix / top))
            projectors.append(mat_pow(matrix, 0))
    for side_projectors in (projectors[:3], projectors[3:]):
        for other in side_projectors[1:]:
            worst = max(worst, float(np.linalg.norm(other - side_projectors[0])))
    return worst


@dataclass(frozen=True)
class PahEntry:
    layer_index: int
    side: str
    pair: tuple[str, str]
    exponent: float | None
    r2: float | None
    n_pairs: int
    in_band: bool | None

    @property
    def pair_label(self) -> str:
        return f"{self.pair[0]}_{self.side}:{self.pair[1]}_{self.side}"


def pah_scan(conj: ConjugateSet, k: int = 10, band: tuple[float, float] = PAH_BAND) -> list[PahEntry]:
    """
    Spectral exponents lambda_A ~ lambda_B^e for (H, G), (H, Z), (G, Z) on both sides over
    the top-k eigenvalues; entries outside the band are flagged.
    """
    entries = []
    for side in ('a', 'b'):
        matrices = conj.side(side)
        spectra = {name: _spectrum(matrix) for name, matrix in matrices.items()}
        for left, right in PAH_PAIRS:
            try:
                fit = power_law_fit(spectra[left], spectra[right], k=k)
            except InsufficientDataError as exc:
                logger.debug("layer %d %s%s/%s%s: %s", conj.layer_index, left, side, right, side, exc)
                entries.append(PahEntry(conj.layer_index, side, (left, right), None, None, 0, None))
                continue
            in_band = band[0] <= fit.exponent <= band[1]
            entries.append(PahEntry(conj.layer_index, side, (left, right), fit.exponent, fit.r2,
                                    fit.n_pairs, in_band))
    return entries
