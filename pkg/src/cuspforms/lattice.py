"""Z-modules of rational vectors kept in Hermite normal form."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Optional, Sequence

Vector = tuple[Fraction, ...]


def _vec(v) -> Vector:
    return tuple(Fraction(x) for x in v)


def hermite(rows: Sequence[Sequence], track: bool = False):
    """Row Hermite normal form of the Z-span of rational rows.

    Returns ``(H, U)`` where H has nonzero rows in echelon form with positive
    pivots, entries above each pivot reduced into [0, pivot), and ``U`` is an
    integer matrix with ``U @ rows == H`` (``None`` unless ``track``).
    """
    A = [list(_vec(r)) for r in rows]
    m = len(A)
    if m == 0:
        return [], ([] if track else None)
    n = len(A[0])
    U = [[int(i == j) for j in range(m)] for i in range(m)] if track else None

    def sub(i, j, q):
        # row i -= q * row j
        if q:
            A[i] = [a - q * b for a, b in zip(A[i], A[j])]
            if track:
                U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def swap(i, j):
        A[i], A[j] = A[j], A[i]
        if track:
            U[i], U[j] = U[j], U[i]

    row = 0
    pivots = []
    for col in range(n):
        if row == m:
            break
        while True:
            nz = [i for i in range(row, m) if A[i][col] != 0]
            if not nz:
                break
            best = min(nz, key=lambda i: abs(A[i][col]))
            swap(row, best)
            done = True
            for i in range(row + 1, m):
                if A[i][col] != 0:
                    sub(i, row, math.floor(A[i][col] / A[row][col]))
                    if A[i][col] != 0:
                        done = False
            if done:
                break
        if all(A[i][col] == 0 for i in range(row, m)):
            continue
        if A[row][col] < 0:
            A[row] = [-a for a in A[row]]
            if track:
                U[row] = [-a for a in U[row]]
        for i in range(row):
            sub(i, row, math.floor(A[i][col] / A[row][col]))
        pivots.append(col)
        row += 1
    H = [tuple(r) for r in A[:row]]
    return H, (U[:row] if track else None)


def _pivot(row) -> int:
    return next(j for j, x in enumerate(row) if x != 0)


class Lattice:
    """Finitely generated Z-submodule of Q^n."""

    def __init__(self, generators: Sequence[Sequence], dimension: Optional[int] = None):
        gens = [_vec(g) for g in generators]
        if dimension is None:
            if not gens:
                raise ValueError("dimension needed for an empty lattice")
            dimension = len(gens[0])
        self.dimension = dimension
        self.basis = hermite(gens)[0] if gens else []

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def full_rank(self) -> bool:
        return self.rank == self.dimension

    def reduce(self, v) -> Vector:
        """Canonical representative of v + L; in the half-open box when L is full rank."""
        v = list(_vec(v))
        for row in self.basis:
            j = _pivot(row)
            q = math.floor(v[j] / row[j])
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        return tuple(v)

    def coordinates(self, v) -> Optional[list[int]]:
        """Integer coefficients of v in ``basis``, or None if v is not in the lattice."""
        v = list(_vec(v))
        coeffs = []
        for row in self.basis:
            j = _pivot(row)
            q = v[j] / row[j]
            if q.denominator != 1:
                return None
            q = int(q)
            coeffs.append(q)
            if q:
                v = [a - q * b for a, b in zip(v, row)]
        if any(v):
            return None
        return coeffs

    def __contains__(self, v) -> bool:
        return self.coordinates(v) is not None

    def add(self, v) -> bool:
        """Adjoin v; returns True when the lattice grew."""
        v = _vec(v)
        if v in self:
            return False
        self.basis = hermite(self.basis + [v])[0]
        return True

    def key(self) -> tuple:
        return tuple(self.basis)

    def __eq__(self, other):
        return isinstance(other, Lattice) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Lattice(rank={self.rank}, basis={[tuple(map(str, r)) for r in self.basis]})"


def solve_in_span(generators: Sequence[Sequence], target) -> Optional[list[int]]:
    """Integer k with sum_i k_i * generators[i] == target, or None."""
    gens = [_vec(g) for g in generators]
    target = _vec(target)
    if not gens:
        return [] if not any(target) else None
    H, U = hermite(gens, track=True)
    lat = Lattice.__new__(Lattice)
    lat.dimension = len(target)
    lat.basis = H
    coeffs = lat.coordinates(target)
    if coeffs is None:
        return None
    return [sum(c * U[r][i] for r, c in enumerate(coeffs)) for i in range(len(gens))]
