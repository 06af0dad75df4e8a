"""Rational quadratic forms: diagonal and symmetric representations.

Forms keep the coefficients exactly as given; reduction modulo squares only
happens inside invariant computations.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import NamedTuple, Sequence

from .arith import as_rational, format_rational, square_class
from .errors import DegenerateFormError, FormSyntaxError, PreconditionError, ZeroInputError

Matrix = tuple[tuple[Fraction, ...], ...]


class Signature(NamedTuple):
    r: int
    s: int

    def swapped(self) -> "Signature":
        return Signature(self.s, self.r)


@dataclass(frozen=True)
class DiagonalForm:
    """The form a1*x1^2 + ... + an*xn^2, written <a1,...,an>."""

    coefficients: tuple[Fraction, ...]

    def __post_init__(self):
        coeffs = tuple(as_rational(a) for a in self.coefficients)
        if not coeffs:
            raise PreconditionError("a form needs at least one coefficient")
        if any(a == 0 for a in coeffs):
            raise ZeroInputError("diagonal coefficients must be nonzero")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def of(cls, *coefficients) -> "DiagonalForm":
        return cls(tuple(coefficients))

    @classmethod
    def parse(cls, text: str) -> "DiagonalForm":
        return parse_form(text)

    @property
    def rank(self) -> int:
        return len(self.coefficients)

    def matrix(self) -> Matrix:
        n = self.rank
        zero = Fraction(0)
        return tuple(
            tuple(self.coefficients[i] if i == j else zero for j in range(n)) for i in range(n)
        )

    def __str__(self):
        return "<" + ",".join(format_rational(a) for a in self.coefficients) + ">"

    def __iter__(self):
        return iter(self.coefficients)

    def __len__(self):
        return self.rank


@dataclass(frozen=True)
class SymmetricForm:
    """A form given by its Gram matrix Q, so q(x) = x^t Q x."""

    entries: Matrix

    def __post_init__(self):
        rows = tuple(tuple(as_rational(x) for x in row) for row in self.entries)
        n = len(rows)
        if n == 0 or any(len(row) != n for row in rows):
            raise PreconditionError("Gram matrix must be square and nonempty")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise PreconditionError(f"Gram matrix is not symmetric at ({i},{j})")
        object.__setattr__(self, "entries", rows)

    @property
    def rank(self) -> int:
        return len(self.entries)


_TOKEN = re.compile(r"\s*([+-]?\d+(?:/\d+)?)\s*")


def parse_form(text: str) -> DiagonalForm:
    """Parse ``"<a1,a2,...>"`` with integer or ``p/q`` entries."""
    s = text
    start = s.find("<")
    if start < 0 or s[:start].strip():
        raise FormSyntaxError("expected '<'", text, 0 if start < 0 else start)
    end = s.rfind(">")
    if end < start or s[end + 1 :].strip():
        raise FormSyntaxError("expected closing '>'", text, len(s))
    coeffs = []
    pos = start + 1
    body_end = end
    while True:
        m = _TOKEN.match(s, pos, body_end)
        if not m:
            raise FormSyntaxError("expected a rational coefficient", text, pos)
        try:
            value = Fraction(m.group(1))
        except ZeroDivisionError:
            raise FormSyntaxError("zero denominator", text, m.start(1)) from None
        if value == 0:
            raise FormSyntaxError("coefficients must be nonzero", text, m.start(1))
        coeffs.append(value)
        pos = m.end()
        if pos == body_end:
            break
        if s[pos] != ",":
            raise FormSyntaxError("expected ',' or '>'", text, pos)
        pos += 1
    return DiagonalForm(tuple(coeffs))


def _check_square(Q: Sequence[Sequence]) -> list[list[Fraction]]:
    if isinstance(Q, SymmetricForm):
        Q = Q.entries
    return [list(row) for row in SymmetricForm(Q).entries]


def _identity(n: int) -> list[list[Fraction]]:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def transpose(M):
    return tuple(tuple(row[j] for row in M) for j in range(len(M[0])))


def matmul(A, B):
    Bt = transpose(B)
    return tuple(tuple(sum((a * b for a, b in zip(row, col)), Fraction(0)) for col in Bt) for row in A)


def congruent(Q, T):
    """T^t Q T."""
    return matmul(matmul(transpose(T), Q), T)


def diagonalize(Q) -> tuple[DiagonalForm, Matrix]:
    """Symmetric Gaussian elimination by congruence.

    Returns ``(D, T)`` with ``T^t Q T == diag(D)`` exactly.
    """
    M = _check_square(Q)
    original = tuple(tuple(row) for row in M)
    n = len(M)
    T = _identity(n)

    def add_col_row(dst, src, factor):
        # column dst += factor * column src, then the same on rows
        for row in M:
            row[dst] += factor * row[src]
        for j in range(n):
            M[dst][j] += factor * M[src][j]
        for row in T:
            row[dst] += factor * row[src]

    def swap(i, j):
        if i == j:
            return
        for row in M:
            row[i], row[j] = row[j], row[i]
        M[i], M[j] = M[j], M[i]
        for row in T:
            row[i], row[j] = row[j], row[i]

    for k in range(n):
        pivot = next((i for i in range(k, n) if M[i][i] != 0), None)
        if pivot is None:
            pair = next(
                ((i, j) for i in range(k, n) for j in range(i + 1, n) if M[i][j] != 0), None
            )
            if pair is None:
                raise DegenerateFormError("symmetric matrix is degenerate")
            i, j = pair
            add_col_row(i, j, Fraction(1))
            pivot = i
        swap(k, pivot)
        for i in range(k + 1, n):
            if M[i][k] != 0:
                add_col_row(i, k, -M[i][k] / M[k][k])

    D = DiagonalForm(tuple(M[i][i] for i in range(n)))
    T = tuple(tuple(row) for row in T)
    if congruent(original, T) != D.matrix():
        raise AssertionError("congruence check failed after diagonalization")
    return D, T


def signature(f: DiagonalForm) -> Signature:
    r = sum(1 for a in f.coefficients if a > 0)
    return Signature(r, f.rank - r)


def discriminant(f: DiagonalForm) -> int:
    prod = Fraction(1)
    for a in f.coefficients:
        prod *= a
    return square_class(prod)


def direct_sum(f: DiagonalForm, g: DiagonalForm) -> DiagonalForm:
    return DiagonalForm(f.coefficients + g.coefficients)


def scale(c, f: DiagonalForm) -> DiagonalForm:
    c = as_rational(c)
    if c == 0:
        raise ZeroInputError("cannot scale a form by 0")
    return DiagonalForm(tuple(c * a for a in f.coefficients))


def lorentz_j(rank: int) -> DiagonalForm:
    """<1,...,1,-1> of the given rank (the form j_{m+1} when rank = m + 1)."""
    if rank < 1:
        raise PreconditionError("rank must be positive")
    return DiagonalForm((Fraction(1),) * (rank - 1) + (Fraction(-1),))


HYPERBOLIC_PLANE = DiagonalForm((Fraction(1), Fraction(-1)))
