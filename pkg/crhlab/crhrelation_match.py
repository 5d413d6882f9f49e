from collections import OrderedDict

import numpy as np


class CRHRelationMatch:
    """
    One checked proportionality relation A^p ~ B^q: the score is the alignment
    of the two compared matrices, which are kept under their keys.
    """

    def __init__(self, label: str, score: float | None = None, threshold: float = 0.999):
        self.label = label
        self.matches: OrderedDict[str, np.ndarray] = OrderedDict()
        self.score = score
        self.threshold = threshold
        self.expected_exponent: float | None = None
        self.measured_exponent: float | None = None
        self.r2: float | None = None
        self.note: str = ''

    def add_match(self, key: str, value: np.ndarray):
        if not isinstance(key, str):
            raise TypeError("Key must be a string.")
        if not isinstance(value, np.ndarray):
            raise TypeError("Value must be a numpy array.")
        self.matches[key] = value

    def get_match(self, key: str) -> np.ndarray | None:
        return self.matches.get(key)

    @property
    def passed(self) -> bool:
        return self.score is not None and self.score >= self.threshold

    @property
    def exponent_error(self) -> float | None:
        if self.expected_exponent is None or self.measured_exponent is None:
            return None
        return abs(self.measured_exponent - self.expected_exponent)

    def __repr__(self):
        return f"CRHRelationMatch({self.label!r}, score={self.score})"
