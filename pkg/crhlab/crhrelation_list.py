from crhlab.crhrelation_match import CRHRelationMatch


class CRHRelationList(list[CRHRelationMatch]):
    def add_result(self, result: CRHRelationMatch):
        if not isinstance(result, CRHRelationMatch):
            raise TypeError("Result must be a CRHRelationMatch instance.")
        self.append(result)

    def get_results(self):
        return self

    def get_by_label(self, label: str) -> CRHRelationMatch:
        for result in self:
            if result.label == label:
                return result
        raise KeyError(f"No relation found with label: {label}")

    def all_passed(self) -> bool:
        return all(result.passed for result in self)

    def failures(self) -> list[CRHRelationMatch]:
        return [result for result in self if not result.passed]

    def min_score(self) -> float | None:
        scores = [result.score for result in self if result.score is not None]
        return min(scores) if scores else None
