"""Hilbert symbols, Hasse-Witt invariants and invariant profiles of rational forms."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

from .arith import (
    INF,
    Place,
    as_rational,
    check_place,
    format_place,
    legendre,
    prime_support,
    square_class,
)
from .errors import ZeroInputError
from .forms import DiagonalForm, Signature, discriminant, signature


def _split(a: int, p: int) -> tuple[int, int]:
    k = 0
    while a % p == 0:
        a //= p
        k += 1
    return k, a


@lru_cache(maxsize=1 << 16)
def _hilbert_squarefree(a: int, b: int, v: Place) -> int:
    if v == INF:
        return -1 if a < 0 and b < 0 else 1
    alpha, u = _split(a, v)
    beta, w = _split(b, v)
    if v == 2:
        eps_u = (u - 1) // 2 % 2
        eps_w = (w - 1) // 2 % 2
        omega_u = (u * u - 1) // 8 % 2
        omega_w = (w * w - 1) // 8 % 2
        e = eps_u * eps_w + alpha * omega_w + beta * omega_u
        return -1 if e % 2 else 1
    sign = -1 if (alpha * beta * ((v - 1) // 2)) % 2 else 1
    if beta % 2:
        sign *= legendre(u, v)
    if alpha % 2:
        sign *= legendre(w, v)
    return sign


def hilbert(a, b, v: Place) -> int:
    """Hilbert symbol (a, b)_v of two nonzero rationals at the place v."""
    a, b = as_rational(a), as_rational(b)
    if a == 0 or b == 0:
        raise ZeroInputError("Hilbert symbol of 0 is undefined")
    return _hilbert_squarefree(square_class(a), square_class(b), check_place(v))


def hasse_witt(f: DiagonalForm, v: Place) -> int:
    v = check_place(v)
    classes = [square_class(a) for a in f.coefficients]
    out = 1
    for x, y in combinations(classes, 2):
        out *= _hilbert_squarefree(x, y, v)
    return out


def relevant_places(f: DiagonalForm) -> frozenset:
    """Places outside of which every Hasse-Witt invariant of f is +1."""
    places = {2, INF}
    for a in f.coefficients:
        places |= prime_support(a)
    return frozenset(places)


def sorted_places(places) -> list:
    return sorted(places)


@dataclass(frozen=True)
class InvariantProfile:
    """Rank, signature, discriminant and the places where the Hasse-Witt invariant is -1.

    Two rational forms are rationally equivalent iff their profiles are equal.
    Also used unvalidated as a realization target.
    """

    rank: int
    signature: Signature
    discriminant: int
    negative_places: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "signature", Signature(*self.signature))
        object.__setattr__(self, "negative_places", frozenset(self.negative_places))

    def epsilon(self, v: Place) -> int:
        return -1 if v in self.negative_places else 1

    def to_json(self) -> dict:
        return {
            "rank": self.rank,
            "sig": [self.signature.r, self.signature.s],
            "disc": str(self.discriminant),
            "neg_places": [format_place(v) for v in sorted_places(self.negative_places)],
        }

    @classmethod
    def from_json(cls, data: dict) -> "InvariantProfile":
        from .arith import parse_place

        return cls(
            rank=int(data["rank"]),
            signature=Signature(*(int(x) for x in data["sig"])),
            discriminant=int(data["disc"]),
            negative_places=frozenset(parse_place(p) for p in data["neg_places"]),
        )


TargetProfile = InvariantProfile


def profile(f: DiagonalForm) -> InvariantProfile:
    negative = frozenset(v for v in relevant_places(f) if hasse_witt(f, v) == -1)
    return InvariantProfile(f.rank, signature(f), discriminant(f), negative)


def profile_mismatches(expected: InvariantProfile, actual: InvariantProfile) -> list[str]:
    """Names of the profile fields that differ, with places for Hasse-Witt mismatches."""
    out = []
    if expected.rank != actual.rank:
        out.append("rank")
    if expected.signature != actual.signature:
        out.append("signature")
    if expected.discriminant != actual.discriminant:
        out.append("discriminant")
    for v in sorted_places(expected.negative_places ^ actual.negative_places):
        out.append(f"hasse_witt@{format_place(v)}")
    return out
