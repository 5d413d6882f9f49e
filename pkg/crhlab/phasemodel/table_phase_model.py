from collections import namedtuple
from enum import Enum

from crhlab.phasemodel.phasemodel import PhaseModel


class TablePhaseModel(PhaseModel):
    @classmethod
    def get_phase_description(cls, label):
        phase_info = PhaseType.get_by_label(label)
        return phase_info.value.description

    @classmethod
    def get_phase_list(cls):
        return PhaseType.list_all()

    @classmethod
    def get_relation_list(cls):
        return Relation.list_all()

    @classmethod
    def phase_for_pair(cls, backward: 'Relation', forward: 'Relation') -> 'PhaseType':
        for item in PhaseType:
            if item.value.backward is backward and item.value.forward is forward:
                return item
        raise ValueError(f"No phase pairs {backward.value.label} with {forward.value.label}")


RelationInfo = namedtuple('RelationInfo', ['label', 'side', 'left', 'right', 'name'])


class Relation(Enum):
    RGA_A = RelationInfo(label="H_a~G_a", side='a', left='H', right='G', name='RGA')
    RWA_A = RelationInfo(label="H_a~Z_a", side='a', left='H', right='Z', name='RWA')
    GWA_A = RelationInfo(label="G_a~Z_a", side='a', left='G', right='Z', name='GWA')
    RGA_B = RelationInfo(label="H_b~G_b", side='b', left='H', right='G', name='RGA')
    RWA_B = RelationInfo(label="H_b~Z_b", side='b', left='H', right='Z', name='RWA')
    GWA_B = RelationInfo(label="G_b~Z_b", side='b', left='G', right='Z', name='GWA')

    @classmethod
    def get_by_label(cls, label):
        for item in cls:
            if item.value.label == label:
                return item
        raise ValueError(f"No relation found with label: {label}")

    @classmethod
    def list_all(cls):
        return list(cls)

    @classmethod
    def for_side(cls, side: str) -> list['Relation']:
        return [item for item in cls if item.value.side == side]


# exponents of (H, Z, G) in H^h ~ Z^z ~ G^g, the projector of the tilde matrices
# (None: untilded) and extra relations (left, p, right, q) meaning left^p ~ right^q
PhaseLaw = namedtuple('PhaseLaw', ['h', 'z', 'g', 'projector', 'extra'])

PhaseTypeInfo = namedtuple('PhaseTypeInfo',
                           ['label', 'backward', 'forward', 'backward_law', 'forward_law', 'description'])

_CRH_LAW = PhaseLaw(1, 1, 1, None, ())


class PhaseType(Enum):
    CRH = PhaseTypeInfo(label="CRH", backward=None, forward=None,
                        backward_law=_CRH_LAW, forward_law=_CRH_LAW,
                        description="All six relations hold")
    BACK_CRH = PhaseTypeInfo(label="back-CRH", backward=None, forward=None,
                             backward_law=_CRH_LAW,
                             forward_law=PhaseLaw(0, 0, 1, 'Z', (('H', 1, 'Z', 2),)),
                             description="All three backward relations hold")
    FORW_CRH = PhaseTypeInfo(label="forw-CRH", backward=None, forward=None,
                             backward_law=PhaseLaw(1, 0, 0, 'Z', (('Z', 2, 'G', 1),)),
                             forward_law=_CRH_LAW,
                             description="All three forward relations hold")
    PHASE_1 = PhaseTypeInfo(label="1", backward=Relation.RGA_A, forward=Relation.RGA_B,
                            backward_law=PhaseLaw(0, 1, 0, 'H', ()), forward_law=PhaseLaw(0, 1, 0, 'H', ()),
                            description="H_a ~ G_a and H_b ~ G_b")
    PHASE_2 = PhaseTypeInfo(label="2", backward=Relation.RWA_A, forward=Relation.RWA_B,
                            backward_law=PhaseLaw(1, 1, 0, 'Z', ()), forward_law=PhaseLaw(1, 1, 0, 'Z', ()),
                            description="H_a ~ Z_a and H_b ~ Z_b")
    PHASE_3 = PhaseTypeInfo(label="3", backward=Relation.GWA_A, forward=Relation.GWA_B,
                            backward_law=PhaseLaw(0, 1, 1, 'Z', ()), forward_law=PhaseLaw(0, 1, 1, 'Z', ()),
                            description="G_a ~ Z_a and G_b ~ Z_b")
    PHASE_4 = PhaseTypeInfo(label="4", backward=Relation.RGA_A, forward=Relation.RWA_B,
                            backward_law=PhaseLaw(1, 0, 1, 'Z', ()), forward_law=PhaseLaw(1, 1, -1, 'Z', ()),
                            description="H_a ~ G_a and H_b ~ Z_b")
    PHASE_5 = PhaseTypeInfo(label="5", backward=Relation.RWA_A, forward=Relation.RGA_B,
                            backward_law=PhaseLaw(3, 3, 1, 'Z', ()), forward_law=PhaseLaw(1, 2, 1, 'Z', ()),
                            description="H_a ~ Z_a and H_b ~ G_b")
    PHASE_6 = PhaseTypeInfo(label="6", backward=Relation.RGA_A, forward=Relation.GWA_B,
                            backward_law=PhaseLaw(1, 2, 1, 'Z', ()), forward_law=PhaseLaw(1, 3, 3, 'Z', ()),
                            description="H_a ~ G_a and G_b ~ Z_b")
    PHASE_7 = PhaseTypeInfo(label="7", backward=Relation.GWA_A, forward=Relation.RGA_B,
                            backward_law=PhaseLaw(-1, 1, 1, 'Z', ()), forward_law=PhaseLaw(1, 0, 1, 'Z', ()),
                            description="G_a ~ Z_a and H_b ~ G_b")
    PHASE_8 = PhaseTypeInfo(label="8", backward=Relation.RWA_A, forward=Relation.GWA_B,
                            backward_law=PhaseLaw(2, 2, 1, 'Z', ()), forward_law=PhaseLaw(1, 2, 2, 'Z', ()),
                            description="H_a ~ Z_a and G_b ~ Z_b")
    PHASE_9 = PhaseTypeInfo(label="9", backward=Relation.GWA_A, forward=Relation.RWA_B,
                            backward_law=PhaseLaw(1, 0, 0, 'Z', ()), forward_law=PhaseLaw(0, 0, 1, 'Z', ()),
                            description="G_a ~ Z_a and H_b ~ Z_b")
    PARTIAL = PhaseTypeInfo(label="partial", backward=None, forward=None, backward_law=None, forward_law=None,
                            description="Some relation holds but no table row matches")
    NONE = PhaseTypeInfo(label="none", backward=None, forward=None, backward_law=None, forward_law=None,
                         description="No relation holds")

    @classmethod
    def get_by_label(cls, label):
        for item in cls:
            if item.value.label == str(label):
                return item
        raise ValueError(f"No phase found with label: {label}")

    @classmethod
    def list_all(cls):
        return list(cls)

    @classmethod
    def table_phases(cls) -> list['PhaseType']:
        return [item for item in cls if item.value.backward_law is not None]

    @classmethod
    def numbered_phases(cls) -> list['PhaseType']:
        return [item for item in cls if item.value.backward is not None]

    @property
    def label(self) -> str:
        return self.value.label

    def law(self, side: str) -> PhaseLaw | None:
        return self.value.backward_law if side == 'a' else self.value.forward_law
