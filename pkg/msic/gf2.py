"""
GF(2) vectors packed into Python ints (bit i-1 holds message i) and an
incremental echelon basis that remembers which inserted rows produced each
basis row, so that membership tests come with a reproducible certificate.
"""

from bisect import insort
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np


def unit(i: int) -> int:
    return 1 << (i - 1)


def from_support(indices: Iterable[int]) -> int:
    vector = 0
    for i in indices:
        vector ^= unit(i)
    return vector


def support(vector: int) -> List[int]:
    indices = []
    i = 1
    while vector:
        if vector & 1:
            indices.append(i)
        vector >>= 1
        i += 1
    return indices


def to_bits(vector: int, m: int) -> List[int]:
    return [(vector >> (i - 1)) & 1 for i in range(1, m + 1)]


def from_bits(bits: Iterable[int]) -> int:
    vector = 0
    for position, bit in enumerate(bits):
        if bit not in (0, 1):
            raise ValueError(f"coefficient {bit!r} is not a bit")
        vector |= bit << position
    return vector


def to_matrix(vectors: Iterable[int], m: int) -> np.ndarray:
    rows = [to_bits(v, m) for v in vectors]
    return np.array(rows, dtype=np.uint8).reshape(len(rows), m)


class EchelonBasis:
    """
    Rows are kept with distinct pivots, the pivot being the lowest set bit.
    Reduction walks pivots in ascending order, which is the explicit pivot
    order certificates depend on.
    """

    def __init__(self):
        self._rows: Dict[int, Tuple[int, int]] = {}  # pivot bit -> (vector, combination)
        self._pivots: List[int] = []

    @property
    def rank(self) -> int:
        return len(self._pivots)

    def copy(self) -> "EchelonBasis":
        other = EchelonBasis()
        other._rows = dict(self._rows)
        other._pivots = list(self._pivots)
        return other

    def reduce(self, vector: int, combination: int = 0) -> Tuple[int, int]:
        for pivot in self._pivots:
            if vector & pivot:
                row, row_combination = self._rows[pivot]
                vector ^= row
                combination ^= row_combination
        return vector, combination

    def add(self, vector: int, combination: int) -> bool:
        """Insert a row tagged with its combination mask; False if it was dependent"""
        residual, combination = self.reduce(vector, combination)
        if not residual:
            return False
        pivot = residual & -residual
        self._rows[pivot] = (residual, combination)
        insort(self._pivots, pivot)
        return True

    def express(self, vector: int) -> Optional[int]:
        """Combination mask of inserted rows summing to vector, or None if outside the span"""
        residual, combination = self.reduce(vector)
        return combination if residual == 0 else None

    def __contains__(self, vector: int) -> bool:
        return self.reduce(vector)[0] == 0
