import pytest

from crhlab.phasemodel.table_phase_model import PhaseLaw, PhaseType, Relation, TablePhaseModel


def test_relation_catalog():
    assert len(Relation.list_all()) == 6
    assert Relation.for_side('a') == [Relation.RGA_A, Relation.RWA_A, Relation.GWA_A]
    assert Relation.get_by_label("G_b~Z_b") is Relation.GWA_B
    with pytest.raises(ValueError):
        Relation.get_by_label("H~W")


def test_phase_lists():
    assert len(PhaseType.numbered_phases()) == 9
    assert len(PhaseType.table_phases()) == 12
    assert PhaseType.PARTIAL not in PhaseType.table_phases()
    assert len(TablePhaseModel.get_phase_list()) == 14


@pytest.mark.parametrize("label, phase", [
    ("CRH", PhaseType.CRH),
    ("back-CRH", PhaseType.BACK_CRH),
    (1, PhaseType.PHASE_1),
    ("9", PhaseType.PHASE_9),
    ("none", PhaseType.NONE),
])
def test_phase_by_label(label, phase):
    assert PhaseType.get_by_label(label) is phase


def test_unknown_phase_label():
    with pytest.raises(ValueError):
        PhaseType.get_by_label("10")


def test_numbered_phases_cover_every_pair():
    pairs = {(phase.value.backward, phase.value.forward) for phase in PhaseType.numbered_phases()}
    assert len(pairs) == 9
    for backward in Relation.for_side('a'):
        for forward in Relation.for_side('b'):
            phase = TablePhaseModel.phase_for_pair(backward, forward)
            assert phase.value.backward is backward and phase.value.forward is forward


def test_phase_for_pair_rejects_swapped_sides():
    with pytest.raises(ValueError):
        TablePhaseModel.phase_for_pair(Relation.RGA_B, Relation.RGA_A)


def test_phase_laws():
    assert PhaseType.PHASE_5.law('a') == PhaseLaw(3, 3, 1, 'Z', ())
    assert PhaseType.PHASE_5.law('b') == PhaseLaw(1, 2, 1, 'Z', ())
    assert PhaseType.PHASE_1.law('a').projector == 'H'
    assert PhaseType.CRH.law('b').projector is None
    assert PhaseType.BACK_CRH.law('b').extra == (('H', 1, 'Z', 2),)
    assert PhaseType.NONE.law('a') is None


def test_phase_description():
    assert TablePhaseModel.get_phase_description("2") == "H_a ~ Z_a and H_b ~ Z_b"
