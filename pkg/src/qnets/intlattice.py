"""Exact membership tests for integer lattices spanned by a list of vectors.

The basis is kept in Hermite-style echelon form (rows sorted by pivot column,
zeros left of each pivot) using extended gcd steps, so membership is decided
over the integers with no floating point.
"""

from __future__ import annotations


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, next_x = 1, 0
    y, next_y = 0, 1
    g, next_g = a, b
    while next_g:
        q = g // next_g
        x, next_x = next_x, x - q * next_x
        y, next_y = next_y, y - q * next_y
        g, next_g = next_g, g - q * next_g
    return x, y, g


def _leading(vec: list[int]) -> int | None:
    for i, v in enumerate(vec):
        if v:
            return i
    return None


class IntLattice:
    """Sublattice of Z^n closed under vector addition and negation."""

    def __init__(self, dimension: int):
        self.n = dimension
        self.basis: list[list[int]] = []

    def _pivot_row(self, j: int) -> list[int] | None:
        for row in self.basis:
            if _leading(row) == j:
                return row
        return None

    def add(self, vec: list[int]) -> None:
        if len(vec) != self.n:
            raise ValueError("dimension mismatch")
        vec = list(vec)
        while True:
            j = _leading(vec)
            if j is None:
                return
            row = self._pivot_row(j)
            if row is None:
                self.basis.append(vec)
                self.basis.sort(key=_leading)
                return
            a, b = row[j], vec[j]
            if b % a == 0:
                q = b // a
                vec = [v - q * r for r, v in zip(row, vec)]
            else:
                # vec is zero left of j, so mixing keeps the row echelon.
                x, y, g = _xgcd(a, b)
                new_row = [x * r + y * v for r, v in zip(row, vec)]
                vec = [(a // g) * v - (b // g) * r for r, v in zip(row, vec)]
                row[:] = new_row

    def __contains__(self, vec) -> bool:
        if len(vec) != self.n:
            raise ValueError("dimension mismatch")
        vec = list(vec)
        for row in self.basis:
            j = _leading(row)
            if vec[j] == 0:
                continue
            if vec[j] % row[j] != 0:
                return False
            q = vec[j] // row[j]
            vec = [v - q * r for r, v in zip(row, vec)]
        return not any(vec)
