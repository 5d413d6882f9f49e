
class PhaseModel:
    """A catalog of alignment relations and the phases they combine into."""

    @classmethod
    def get_phase_list(cls):
        raise NotImplementedError

    @classmethod
    def get_relation_list(cls):
        raise NotImplementedError
