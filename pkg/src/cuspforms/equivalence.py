"""Rational and projective equivalence of rational quadratic forms.

Decisions compare invariant profiles only (Hasse-Minkowski). No congruence
matrix is ever constructed. Projective verdicts come with a scalar witness c
satisfying q1 ~ c * q2, and that witness is checked by recomputing profiles.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .arith import INF, Place, format_place, is_local_square, prime_support, square_class, squarefree_candidates
from .errors import RankMismatchError, SearchExhaustedError, SignatureError
from .forms import DiagonalForm, Signature, scale, signature
from .local import InvariantProfile, hilbert, profile, relevant_places


def rationally_equivalent(q1: DiagonalForm, q2: DiagonalForm) -> bool:
    return profile(q1) == profile(q2)


def scaled_profile(c, q: DiagonalForm) -> InvariantProfile:
    """profile(scale(c, q)) from profile(q) by the covariance of the invariants."""
    c = square_class(c)
    base = profile(q)
    n, d = base.rank, base.discriminant
    k_pairs = n * (n - 1) // 2
    places = relevant_places(q) | prime_support(c)
    negative = set()
    for v in places:
        eps = base.epsilon(v)
        if k_pairs % 2:
            eps *= hilbert(c, -1, v)
        if (n - 1) % 2:
            eps *= hilbert(c, d, v)
        if eps == -1:
            negative.add(v)
    sig = base.signature if c > 0 else base.signature.swapped()
    return InvariantProfile(n, sig, square_class(c**n * d), frozenset(negative))


@dataclass(frozen=True)
class Obstruction:
    invariant: str
    place: Optional[Place] = None
    places: tuple = ()

    def to_json(self) -> dict:
        return {
            "invariant": self.invariant,
            "place": None if self.place is None else format_place(self.place),
            "places": [format_place(v) for v in self.places],
        }


@dataclass(frozen=True)
class ProjectiveVerdict:
    equivalent: bool
    scalar_witness: Optional[int] = None
    obstruction: Optional[Obstruction] = None

    def __bool__(self):
        return self.equivalent

    def to_json(self) -> dict:
        return {
            "equivalent": self.equivalent,
            "witness": None if self.scalar_witness is None else str(self.scalar_witness),
            "obstruction": None if self.obstruction is None else self.obstruction.to_json(),
        }


def _report_order(v: Place):
    # Odd primes first, then 2, then the real place: a mismatch at 2 or at the
    # real place is usually forced by reciprocity from the odd ones.
    if v == INF:
        return (2, 0)
    if v == 2:
        return (1, 0)
    return (0, v)


def _hw_obstruction(places) -> Obstruction:
    ordered = sorted(places, key=_report_order)
    return Obstruction("hasse_witt", ordered[0], tuple(sorted(places)))


def _compare(expected: InvariantProfile, actual: InvariantProfile) -> Optional[Obstruction]:
    if expected.signature != actual.signature:
        return Obstruction("signature", INF, (INF,))
    if expected.discriminant != actual.discriminant:
        return Obstruction("discriminant")
    diff = expected.negative_places ^ actual.negative_places
    if diff:
        return _hw_obstruction(diff)
    return None


def _allowed_signs(sig1: Signature, sig2: Signature) -> list[int]:
    signs = []
    if sig1 == sig2:
        signs.append(1)
    if sig1 == sig2.swapped():
        signs.append(-1)
    return signs


def projectively_equivalent(q1: DiagonalForm, q2: DiagonalForm) -> ProjectiveVerdict:
    """Decide whether c * q2 is rationally equivalent to q1 for some nonzero rational c."""
    if q1.rank != q2.rank:
        return ProjectiveVerdict(False, obstruction=Obstruction("rank"))
    n = q1.rank
    p1, p2 = profile(q1), profile(q2)

    if n % 2:
        # disc(c q2) = c^n disc(q2) forces the square class of c.
        c = square_class(p1.discriminant * p2.discriminant)
        obstruction = _compare(p1, scaled_profile(c, q2))
        if obstruction is not None:
            return ProjectiveVerdict(False, obstruction=obstruction)
        return _verified(c, q1, q2, p1)

    if p1.discriminant != p2.discriminant:
        return ProjectiveVerdict(False, obstruction=Obstruction("discriminant"))
    signs = _allowed_signs(p1.signature, p2.signature)
    if not signs:
        return ProjectiveVerdict(False, obstruction=Obstruction("signature", INF, (INF,)))

    # eps_v(c q2) = eps_v(q2) * (c, t)_v with t below; need (c, t)_v = eps_v(q1) eps_v(q2).
    t = square_class((-1) ** (n * (n - 1) // 2) * p2.discriminant ** (n - 1))
    mismatch = p1.negative_places ^ p2.negative_places
    places = relevant_places(q1) | relevant_places(q2)
    first_failure = None
    for sign in signs:
        real_symbol = -1 if (sign < 0 and t < 0) else 1
        wanted = set(mismatch)
        if (INF in wanted) != (real_symbol == -1):
            failure = Obstruction("hasse_witt", INF, (INF,))
        else:
            blocked = {v for v in wanted if is_local_square(t, v)}
            if blocked:
                failure = _hw_obstruction(blocked)
            elif len(wanted) % 2:
                failure = _hw_obstruction(wanted)
            else:
                failure = None
        if failure is None:
            c = _search_witness(q1, q2, p1, sign, places)
            return _verified(c, q1, q2, p1)
        first_failure = first_failure or failure
    return ProjectiveVerdict(False, obstruction=first_failure)


def _search_witness(q1, q2, p1, sign, places) -> int:
    support = [v for v in places if v != INF]
    for c in squarefree_candidates(support, signs=(sign,)):
        if profile(scale(c, q2)) == p1:
            return c
    raise SearchExhaustedError(
        f"solvability test passed but no witness found for {q1} ~ c*{q2}"
    )


def _verified(c: int, q1, q2, p1) -> ProjectiveVerdict:
    if profile(scale(c, q2)) != p1:
        raise AssertionError(f"witness {c} failed direct recomputation")
    return ProjectiveVerdict(True, scalar_witness=c)


def commensurable(q1: DiagonalForm, q2: DiagonalForm) -> bool:
    """Commensurability of the cusped arithmetic hyperbolic manifolds attached to q1, q2.

    Both forms must have signature (m, 1) for the same m.
    """
    s1, s2 = signature(q1), signature(q2)
    for s in (s1, s2):
        if s.s != 1:
            raise SignatureError(f"expected signature (m,1), got {tuple(s)}")
    if s1.r != s2.r:
        raise RankMismatchError(f"forms have signatures {tuple(s1)} and {tuple(s2)}")
    return projectively_equivalent(q1, q2).equivalent
