"""Incremental GF(2) row reduction over symplectic vectors packed into ints."""
from __future__ import annotations

from .pauli import PauliOperator


def symplectic_int(p: PauliOperator) -> int:
    """Pack ``(x, z)`` into a single ``2n``-bit integer."""
    return (p.x << p.n) | p.z


class SymplecticBasis:
    """Echelon basis that remembers which inserted vectors each row combines.

    ``add`` returns False for vectors already in the span.  ``decompose``
    returns the bit mask of inserted-vector indices whose XOR equals the
    query, or None if the query lies outside the span.
    """

    def __init__(self):
        self._rows: dict[int, tuple[int, int]] = {}  # pivot bit -> (vector, combination mask)
        self.size = 0

    def _reduce(self, v: int) -> tuple[int, int]:
        combo = 0
        while v:
            pivot = v.bit_length() - 1
            row = self._rows.get(pivot)
            if row is None:
                break
            v ^= row[0]
            combo ^= row[1]
        return v, combo

    def add(self, v: int) -> bool:
        residual, combo = self._reduce(v)
        if residual == 0:
            return False
        self._rows[residual.bit_length() - 1] = (residual, combo ^ (1 << self.size))
        self.size += 1
        return True

    def decompose(self, v: int) -> int | None:
        residual, combo = self._reduce(v)
        return combo if residual == 0 else None

    def __contains__(self, v: int) -> bool:
        return self.decompose(v) is not None


def mask_indices(mask: int) -> tuple[int, ...]:
    out = []
    j = 0
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return tuple(out)
