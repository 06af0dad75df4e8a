"""Existence and construction of diagonal forms with prescribed local invariants."""

from __future__ import annotations

from fractions import Fraction

from .arith import INF, check_place, is_local_square, prime_support, square_class, squarefree_candidates
from .errors import InfeasibleTargetError, PreconditionError, SearchExhaustedError, SignatureError
from .forms import HYPERBOLIC_PLANE, DiagonalForm, Signature, direct_sum, signature
from .local import InvariantProfile, TargetProfile, hilbert, profile, profile_mismatches


def serre_feasible(t: TargetProfile) -> tuple[bool, list[int]]:
    """Check the five existence conditions; returns (feasible, violated condition numbers)."""
    violated = []
    n, (r, s), d = t.rank, t.signature, t.discriminant
    places = t.negative_places
    for v in places:
        check_place(v)

    if len(places) % 2:
        violated.append(1)

    cond2 = False
    if n == 1 and places:
        cond2 = True
    elif n == 2 and d != 0 and any(is_local_square(-d, v) for v in places):
        cond2 = True
    if cond2:
        violated.append(2)

    if r < 0 or s < 0 or n != r + s or n < 1:
        violated.append(3)

    if d == 0 or (d > 0) != (s % 2 == 0):
        violated.append(4)

    wants_negative_real = (s * (s - 1) // 2) % 2 == 1
    if (INF in places) != wants_negative_real:
        violated.append(5)

    return not violated, violated


def _normalized(t: TargetProfile) -> TargetProfile:
    if t.discriminant == 0:
        return t
    return InvariantProfile(
        t.rank, Signature(*t.signature), square_class(t.discriminant), frozenset(t.negative_places)
    )


def _peel(t: TargetProfile, a: int) -> TargetProfile:
    """Target for q0 when q = <a> + q0 must realize t."""
    d = t.discriminant
    r, s = t.signature
    sig = Signature(r - 1, s) if a > 0 else Signature(r, s - 1)
    places = set(t.negative_places) | {2, INF} | prime_support(d) | prime_support(a)
    negative = frozenset(v for v in places if t.epsilon(v) * hilbert(a, -d, v) == -1)
    return InvariantProfile(t.rank - 1, sig, square_class(d * a), negative)


def _support(t: TargetProfile) -> list[int]:
    return sorted({v for v in t.negative_places if v != INF} | {2} | prime_support(t.discriminant))


def _rank_two(t: TargetProfile) -> tuple[int, int]:
    r, _ = t.signature
    d = t.discriminant
    # <x, x d> has discriminant d; the sign of x is fixed unless the signature is (1,1).
    signs = (1,) if r == 2 else (-1,) if r == 0 else (1, -1)
    for x in squarefree_candidates(_support(t), signs=signs):
        candidate = DiagonalForm.of(x, square_class(x * d))
        if profile(candidate) == t:
            return x, square_class(x * d)
    raise SearchExhaustedError(f"no rank-2 realization found for {t}")


def _canonical(coeffs) -> DiagonalForm:
    return DiagonalForm(tuple(Fraction(a) for a in sorted(coeffs, key=lambda a: (abs(a), a))))


def realize(t: TargetProfile) -> DiagonalForm:
    """A diagonal form whose recomputed profile equals t.

    Coefficients are squarefree integers sorted by absolute value then sign.
    """
    ok, violated = serre_feasible(t)
    if not ok:
        raise InfeasibleTargetError(violated)
    target = _normalized(t)
    current = target
    coeffs = []
    while current.rank > 2:
        r, s = current.signature
        preferred = [a for a, room in ((1, r), (-1, s)) if room > 0]
        chosen = None
        for a in preferred:
            if serre_feasible(_peel(current, a))[0]:
                chosen = a
                break
        if chosen is None:
            signs = tuple(a for a in (1, -1) if a in preferred)
            for a in squarefree_candidates(_support(current), signs=signs):
                if serre_feasible(_peel(current, a))[0]:
                    chosen = a
                    break
        if chosen is None:
            raise SearchExhaustedError(f"could not split a coefficient from {current}")
        coeffs.append(chosen)
        current = _peel(current, chosen)
    if current.rank == 2:
        coeffs.extend(_rank_two(current))
    else:
        coeffs.append(current.discriminant)

    form = _canonical(coeffs)
    if profile(form) != target:
        raise AssertionError(f"realization {form} does not match target {target}")
    return form


def complement_target(q: DiagonalForm) -> TargetProfile:
    """Invariants of the positive definite q' with q' + <1,-1> equivalent to q.

    q has signature (m,1) and discriminant d; q' has rank m-1, discriminant -d
    and eps_v(q') = eps_v(q) * (-1, -d)_v.
    """
    prof = profile(q)
    m = prof.signature.r
    d = prof.discriminant
    places = set(prof.negative_places) | {2, INF} | prime_support(d)
    negative = frozenset(v for v in places if prof.epsilon(v) * hilbert(-1, -d, v) == -1)
    return InvariantProfile(m - 1, Signature(m - 1, 0), square_class(-d), negative)


def definite_complement(q: DiagonalForm, minimum_m: int = 6) -> tuple[DiagonalForm, dict]:
    """Positive definite q' of rank m-1 such that q' + <1,-1> has the profile of q."""
    sig = signature(q)
    if sig.s != 1:
        raise SignatureError(f"expected signature (m,1), got {tuple(sig)}")
    m = sig.r
    if m < minimum_m:
        raise PreconditionError(f"m = {m} is below the supported minimum {minimum_m}")

    target = complement_target(q)
    feasible, violated = serre_feasible(target)
    if not feasible:
        raise AssertionError(f"complement target infeasible: {violated}")
    qprime = realize(target)
    qpp = direct_sum(qprime, HYPERBOLIC_PLANE)
    prof_q, prof_qp, prof_qpp = profile(q), profile(qprime), profile(qpp)
    mismatches = profile_mismatches(prof_q, prof_qpp)
    certificate = {
        "form": str(q),
        "m": m,
        "profile": prof_q.to_json(),
        "target": target.to_json(),
        "target_feasible": feasible,
        "complement": str(qprime),
        "complement_profile": prof_qp.to_json(),
        "complement_matches_target": prof_qp == target,
        "sum_with_hyperbolic_plane": str(qpp),
        "sum_profile": prof_qpp.to_json(),
        "profiles_equal": not mismatches,
        "mismatches": mismatches,
    }
    return qprime, certificate
