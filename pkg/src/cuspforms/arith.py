"""Exact integer and rational arithmetic: factoring and square classes, plus residue symbols.

Places of Q are represented as ``int`` primes for the finite places and ``INF``
(``math.inf``) for the real place, so that sorting a collection of places puts
the real place last.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Union

from .errors import PreconditionError, ZeroInputError

INF = math.inf
Place = Union[int, float]

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
_MR_LIMIT = 3317044064679887385961981


def as_rational(x) -> Fraction:
    """Coerce ints, Fractions and strings like ``"-9/4"`` to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if not s or any(c in s for c in ".eE_ "):
            raise ValueError(f"not an exact rational: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _nonzero(r) -> Fraction:
    r = as_rational(r)
    if r == 0:
        raise ZeroInputError("zero is not allowed here")
    return r


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin below 3.3e24, sympy's BPSW test above."""
    if n < 2:
        return False
    if n >= _MR_LIMIT:
        from sympy import isprime

        return bool(isprime(n))
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@lru_cache(maxsize=4096)
def _factor_abs(n: int) -> tuple[tuple[int, int], ...]:
    # trial division by small primes; a composite cofactor left over (only
    # seen with the large entries random congruences produce) goes to sympy
    out: dict[int, int] = {}
    p = 2
    while p * p <= n and p < 1 << 16:
        while n % p == 0:
            n //= p
            out[p] = out.get(p, 0) + 1
        p += 1 if p == 2 else 2
    if n > 1:
        if p * p > n or is_prime(n):
            out[n] = out.get(n, 0) + 1
        else:
            from sympy import factorint

            for q, e in factorint(n).items():
                out[int(q)] = out.get(int(q), 0) + int(e)
    return tuple(sorted(out.items()))


def factor(n: int) -> list[tuple[int, int]]:
    """Prime factorization of ``|n|`` as increasing ``(prime, exponent)`` pairs."""
    if n == 0:
        raise ZeroInputError("cannot factor 0")
    return list(_factor_abs(abs(n)))


def prime_support(r) -> set[int]:
    """Primes dividing the numerator or denominator of r."""
    r = _nonzero(r)
    return {p for p, _ in factor(r.numerator)} | {p for p, _ in factor(r.denominator)}


def squarefree_part(n: int) -> int:
    if n == 0:
        raise ZeroInputError("0 has no square class")
    out = -1 if n < 0 else 1
    for p, e in factor(n):
        if e % 2:
            out *= p
    return out


def square_class(r) -> int:
    """Signed squarefree integer c such that r / c is a rational square."""
    r = _nonzero(r)
    return squarefree_part(r.numerator * r.denominator)


def valuation(r, p: int) -> int:
    r = _nonzero(r)
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def legendre(a: int, p: int) -> int:
    if p == 2 or not is_prime(p):
        raise PreconditionError(f"legendre symbol needs an odd prime, got {p}")
    t = pow(a % p, (p - 1) // 2, p)
    return -1 if t == p - 1 else t


def check_place(v) -> Place:
    if v == INF:
        return INF
    if isinstance(v, bool) or not isinstance(v, int) or not is_prime(v):
        raise PreconditionError(f"not a place of Q: {v!r}")
    return v


def parse_place(text: str) -> Place:
    s = str(text).strip().lower()
    if s in ("inf", "infinity", "oo", "∞", "r", "real"):
        return INF
    try:
        return check_place(int(s))
    except ValueError:
        raise PreconditionError(f"not a place of Q: {text!r}") from None


def format_place(v: Place) -> str:
    return "inf" if v == INF else str(v)


def is_local_square(r, v: Place) -> bool:
    """Whether the nonzero rational r is a square in the completion of Q at v."""
    r = _nonzero(r)
    v = check_place(v)
    if v == INF:
        return r > 0
    k = valuation(r, v)
    if k % 2:
        return False
    unit = r / Fraction(v) ** k
    # unit = a/b with a, b prime to v; a/b is a square iff a*b is.
    u = unit.numerator * unit.denominator
    if v == 2:
        return u % 8 == 1
    return legendre(u, v) == 1


def primes_up_to(bound: int) -> list[int]:
    if bound < 2:
        return []
    sieve = bytearray([1]) * (bound + 1)
    sieve[0] = sieve[1] = 0
    for i in range(2, math.isqrt(bound) + 1):
        if sieve[i]:
            sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
    return [i for i, flag in enumerate(sieve) if flag]


def _signed(values: Iterable[int], signs: tuple[int, ...]) -> list[int]:
    ordered = sorted(set(values))
    return [s * c for c in ordered for s in signs]


def squarefree_candidates(
    support: Iterable[int], signs=(1, -1), widen_to: int = 1000
) -> Iterator[int]:
    """Squarefree integers supported on ``support``, then on ``support`` plus one extra prime.

    Within each stage candidates come in order of absolute value, positive before
    negative. The extra prime runs over primes up to ``widen_to`` in increasing order.
    """
    base = sorted(set(support))
    products = []
    for k in range(len(base) + 1):
        for combo in combinations(base, k):
            products.append(math.prod(combo))
    yield from _signed(products, signs)
    for q in primes_up_to(widen_to):
        if q in base:
            continue
        yield from _signed((c * q for c in products), signs)
