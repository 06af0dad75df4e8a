"""Affine crystallographic groups given by generators, and the flat-manifold checks on them.

An element x -> A x + v is stored as an ``AffineIsometry(A, v)`` with exact
rational entries. ``closure`` turns a presentation into the finite data of the
group: the holonomy group with one coset representative per element, and the
full translation lattice.
"""

from __future__ import annotations

import copy
import logging
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Optional, Sequence

from .arith import as_rational, format_rational
from .errors import NotCrystallographicError, PreconditionError, SearchExhaustedError
from .forms import DiagonalForm
from .lattice import Lattice, solve_in_span

log = logging.getLogger(__name__)

Matrix = tuple[tuple[Fraction, ...], ...]
Vector = tuple[Fraction, ...]

HALF = Fraction(1, 2)
DEFAULT_GHW_BOUND = 10**6


def identity(n: int) -> Matrix:
    return tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n))


def diagonal(entries) -> Matrix:
    n = len(entries)
    return tuple(tuple(Fraction(entries[i]) if i == j else Fraction(0) for j in range(n)) for i in range(n))


def mat_mul(A: Matrix, B: Matrix) -> Matrix:
    m = len(B[0])
    out = []
    for row in A:
        acc = [0] * m
        for a, brow in zip(row, B):
            if a:
                for j, b in enumerate(brow):
                    if b:
                        acc[j] += a * b
        out.append(tuple(Fraction(x) for x in acc))
    return tuple(out)


def mat_vec(A: Matrix, v: Vector) -> Vector:
    return tuple(sum((a * x for a, x in zip(row, v)), Fraction(0)) for row in A)


def vec_add(u, v) -> Vector:
    return tuple(a + b for a, b in zip(u, v))


def vec_sub(u, v) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def determinant(A: Matrix) -> Fraction:
    M = [list(r) for r in A]
    n = len(M)
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            det = -det
        det *= M[k][k]
        for i in range(k + 1, n):
            f = M[i][k] / M[k][k]
            if f:
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return det


def mat_inverse(A: Matrix) -> Matrix:
    n = len(A)
    M = [list(A[i]) + list(identity(n)[i]) for i in range(n)]
    for k in range(n):
        p = next((i for i in range(k, n) if M[i][k] != 0), None)
        if p is None:
            raise PreconditionError("linear part is singular")
        M[k], M[p] = M[p], M[k]
        piv = M[k][k]
        M[k] = [x / piv for x in M[k]]
        for i in range(n):
            if i != k and M[i][k] != 0:
                f = M[i][k]
                M[i] = [a - f * b for a, b in zip(M[i], M[k])]
    return tuple(tuple(row[n:]) for row in M)


def is_identity(A: Matrix) -> bool:
    return A == identity(len(A))


@dataclass(frozen=True)
class AffineIsometry:
    """The map x -> linear @ x + translation."""

    linear: Matrix
    translation: Vector

    def __post_init__(self):
        A = tuple(tuple(as_rational(x) for x in row) for row in self.linear)
        v = tuple(as_rational(x) for x in self.translation)
        n = len(v)
        if len(A) != n or any(len(row) != n for row in A):
            raise PreconditionError("linear part and translation have inconsistent sizes")
        if determinant(A) == 0:
            raise PreconditionError("linear part must be invertible")
        object.__setattr__(self, "linear", A)
        object.__setattr__(self, "translation", v)

    @classmethod
    def translation_by(cls, v) -> "AffineIsometry":
        return cls(identity(len(v)), tuple(v))

    @property
    def dimension(self) -> int:
        return len(self.translation)

    def __matmul__(self, other: "AffineIsometry") -> "AffineIsometry":
        # (self @ other)(x) = self(other(x))
        return AffineIsometry(
            mat_mul(self.linear, other.linear),
            vec_add(mat_vec(self.linear, other.translation), self.translation),
        )

    def __call__(self, x) -> Vector:
        return vec_add(mat_vec(self.linear, tuple(map(Fraction, x))), self.translation)

    def inverse(self) -> "AffineIsometry":
        Ainv = mat_inverse(self.linear)
        return AffineIsometry(Ainv, tuple(-x for x in mat_vec(Ainv, self.translation)))

    def power(self, k: int) -> "AffineIsometry":
        out = AffineIsometry.translation_by((0,) * self.dimension)
        for _ in range(k):
            out = out @ self
        return out

    def to_json(self) -> dict:
        return {
            "A": [[format_rational(x) for x in row] for row in self.linear],
            "v": [format_rational(x) for x in self.translation],
        }

    @classmethod
    def from_json(cls, data: dict, dimension: Optional[int] = None) -> "AffineIsometry":
        A = data["A"]
        v = data["v"]
        n = dimension or len(v)
        if A and not isinstance(A[0], (list, tuple)):
            if len(A) != n * n:
                raise PreconditionError("flat linear part must have dimension^2 entries")
            A = [A[i * n : (i + 1) * n] for i in range(n)]
        return cls(tuple(tuple(row) for row in A), tuple(v))


def linear_order(A: Matrix, bound: int) -> Optional[int]:
    P = A
    for k in range(1, bound + 1):
        if is_identity(P):
            return k
        P = mat_mul(P, A)
    return None


@dataclass(frozen=True)
class CrystalPresentation:
    dimension: int
    generators: tuple[AffineIsometry, ...]
    seed_lattice: tuple[Vector, ...]
    label: str = ""

    def __post_init__(self):
        gens = tuple(self.generators)
        seed = tuple(tuple(as_rational(x) for x in row) for row in self.seed_lattice)
        for g in gens:
            if g.dimension != self.dimension:
                raise PreconditionError("generator dimension does not match presentation")
        if any(len(row) != self.dimension for row in seed):
            raise PreconditionError("seed lattice vectors have the wrong length")
        if not Lattice(seed, self.dimension).full_rank:
            raise PreconditionError("seed lattice must have full rank")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "seed_lattice", seed)

    def to_json(self) -> dict:
        out = {
            "dimension": self.dimension,
            "generators": [g.to_json() for g in self.generators],
            "seed_lattice": [[format_rational(x) for x in row] for row in self.seed_lattice],
        }
        if self.label:
            out["label"] = self.label
        return out

    @classmethod
    def from_json(cls, data: dict) -> "CrystalPresentation":
        n = int(data["dimension"])
        gens = tuple(AffineIsometry.from_json(g, n) for g in data["generators"])
        seed = data.get("seed_lattice")
        if seed is None:
            seed = [g.translation for g in gens if is_identity(g.linear)]
        return cls(n, gens, tuple(tuple(row) for row in seed), data.get("label", ""))


@dataclass(frozen=True)
class TorsionWitness:
    element: AffineIsometry
    order: int
    fixed_point: Vector

    def to_json(self) -> dict:
        return {
            **self.element.to_json(),
            "order": self.order,
            "fixed_point": [format_rational(x) for x in self.fixed_point],
        }


@dataclass(frozen=True)
class GroupClosure:
    """Holonomy group with coset representatives reduced modulo the translation lattice."""

    dimension: int
    cosets: dict = field(hash=False, compare=False)
    lattice: Lattice = field(hash=False, compare=False)

    @property
    def holonomy(self) -> list[Matrix]:
        return sorted(self.cosets)

    @property
    def order(self) -> int:
        return len(self.cosets)

    def elements(self):
        for A in self.holonomy:
            yield AffineIsometry(A, self.cosets[A])

    def key(self) -> tuple:
        return (self.dimension, tuple(sorted(self.cosets.items())), self.lattice.key())

    def __eq__(self, other):
        return isinstance(other, GroupClosure) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())


def closure(p: CrystalPresentation, max_holonomy: Optional[int] = None) -> GroupClosure:
    return _closure_cached(p, max_holonomy or 2 ** (p.dimension + 2))


@lru_cache(maxsize=256)
def _closure_cached(p: CrystalPresentation, guard: int) -> GroupClosure:
    # Worklist: each (coset, generator) product is examined once. Keeping L
    # stable under the generators' linear parts means a difference that lay in
    # L when checked stays in L after representatives are re-reduced.
    n = p.dimension
    lattice = Lattice(p.seed_lattice, n)
    linears = [g.linear for g in p.generators]

    def saturate():
        grown = True
        while grown:
            grown = False
            for A in linears:
                for b in list(lattice.basis):
                    grown |= lattice.add(mat_vec(A, b))

    saturate()
    start = identity(n)
    cosets = {start: (Fraction(0),) * n}
    queue = [start]
    while queue:
        A = queue.pop(0)
        v = cosets[A]
        for g in p.generators:
            C = mat_mul(A, g.linear)
            x = vec_add(mat_vec(A, g.translation), v)
            if C not in cosets:
                if len(cosets) >= guard:
                    raise NotCrystallographicError(
                        f"more than {guard} linear parts; holonomy is not finite"
                    )
                cosets[C] = lattice.reduce(x)
                queue.append(C)
            elif lattice.add(vec_sub(x, cosets[C])):
                saturate()
    cosets = {A: lattice.reduce(v) for A, v in cosets.items()}
    return GroupClosure(n, cosets, lattice)


def _averaging(A: Matrix, k: int) -> Matrix:
    n = len(A)
    total = [[Fraction(0)] * n for _ in range(n)]
    P = identity(n)
    for _ in range(k):
        for i in range(n):
            for j in range(n):
                total[i][j] += P[i][j]
        P = mat_mul(P, A)
    return tuple(tuple(r) for r in total)


def torsion_element(A: Matrix, v: Vector, lattice: Lattice) -> Optional[TorsionWitness]:
    """A finite-order element in the coset (A, v + L), if there is one.

    (A, w)^k = (I, N w) with N = I + A + ... + A^(k-1), so the coset has torsion
    iff N v + N l = 0 is solvable with l in L.
    """
    n = len(A)
    k = linear_order(A, 2 ** (n + 2))
    if k is None:
        raise NotCrystallographicError("holonomy element of infinite order")
    N = _averaging(A, k)
    images = [mat_vec(N, b) for b in lattice.basis]
    target = tuple(-x for x in mat_vec(N, v))
    coeffs = solve_in_span(images, target)
    if coeffs is None:
        return None
    l = [Fraction(0)] * n
    for c, b in zip(coeffs, lattice.basis):
        l = [a + c * x for a, x in zip(l, b)]
    g = AffineIsometry(A, vec_add(v, tuple(l)))
    # the centroid of the orbit of 0 is fixed by g
    return TorsionWitness(g, k, _centroid(g, k))


def _centroid(g: AffineIsometry, k: int) -> Vector:
    n = g.dimension
    acc = [Fraction(0)] * n
    x = (Fraction(0),) * n
    for _ in range(k):
        acc = [a + b for a, b in zip(acc, x)]
        x = g(x)
    return tuple(a / k for a in acc)


def is_torsion_free(c: GroupClosure) -> tuple[bool, Optional[TorsionWitness]]:
    for A in c.holonomy:
        if is_identity(A):
            continue
        w = torsion_element(A, c.cosets[A], c.lattice)
        if w is not None:
            return False, w
    return True, None


def is_orientable(p) -> bool:
    """Every linear part has determinant +1. Accepts a presentation or a closure."""
    mats = [g.linear for g in p.generators] if isinstance(p, CrystalPresentation) else p.holonomy
    return all(determinant(A) == 1 for A in mats)


def _is_sign_diagonal(A: Matrix) -> bool:
    n = len(A)
    return all(
        (A[i][j] in (1, -1)) if i == j else A[i][j] == 0 for i in range(n) for j in range(n)
    )


def is_diagonal_holonomy(c: GroupClosure) -> bool:
    return all(_is_sign_diagonal(A) for A in c.holonomy)


def holonomy_rank(c: GroupClosure) -> Optional[int]:
    """Rank of the holonomy group when it is an elementary abelian 2-group, else None."""
    n = c.dimension
    I = identity(n)
    mats = c.holonomy
    if any(mat_mul(A, A) != I for A in mats):
        return None
    order = len(mats)
    if order & (order - 1):
        return None
    return order.bit_length() - 1


def is_ghw(c: GroupClosure) -> bool:
    """Orientable, with diagonal holonomy that is elementary abelian of rank dimension - 1."""
    return (
        is_orientable(c)
        and is_diagonal_holonomy(c)
        and holonomy_rank(c) == c.dimension - 1
    )


def preserves_form(p: CrystalPresentation, f: DiagonalForm) -> bool:
    if f.rank != p.dimension:
        raise PreconditionError(f"form of rank {f.rank} on a {p.dimension}-dimensional presentation")
    d = f.coefficients
    n = len(d)
    for g in p.generators:
        A = g.linear
        cols = [[(k, A[k][j]) for k in range(n) if A[k][j]] for j in range(n)]
        for i in range(n):
            for j in range(i, n):
                # (A^t D A)_ij
                rows_j = dict(cols[j])
                entry = sum(a * d[k] * rows_j[k] for k, a in cols[i] if k in rows_j)
                if entry != (d[i] if i == j else 0):
                    return False
    return True


def _unit(n: int, i: int, scale=Fraction(1)) -> Vector:
    return tuple(scale if j == i else Fraction(0) for j in range(n))


def torus(n: int) -> CrystalPresentation:
    gens = tuple(AffineIsometry.translation_by(_unit(n, i)) for i in range(n))
    return CrystalPresentation(n, gens, tuple(g.translation for g in gens), f"torus({n})")


def im_kim(n: int) -> CrystalPresentation:
    """Generators t_1..t_{n+1}, tau_1..tau_n, K of the (2n+1)-dimensional Im-Kim group.

    K negates the last n+1 coordinates for odd n and the last n coordinates for
    even n, and translates by 1/2 along each of the first n+1 axes.
    """
    if n < 1:
        raise PreconditionError("im_kim needs n >= 1")
    dim = 2 * n + 1
    gens = []
    for i in range(n + 1):
        gens.append(AffineIsometry.translation_by(_unit(dim, i)))
    for j in range(n):
        signs = [1] * dim
        signs[j] = signs[j + 1] = -1
        gens.append(AffineIsometry(diagonal(signs), _unit(dim, j + 1 + n, HALF)))
    flipped = n + 1 if n % 2 else n
    signs = [1] * (dim - flipped) + [-1] * flipped
    shift = tuple(HALF if i < n + 1 else Fraction(0) for i in range(dim))
    gens.append(AffineIsometry(diagonal(signs), shift))

    taus, K = gens[n + 1 : 2 * n + 1], gens[-1]
    seed = [g.translation for g in gens[: n + 1]]
    seed += [(g @ g).translation for g in taus] + [(K @ K).translation]
    return CrystalPresentation(dim, tuple(gens), tuple(seed), f"im_kim({n})")


def product_with_circle(p: CrystalPresentation) -> CrystalPresentation:
    """Block-extend every generator by a fixed last coordinate and add a unit translation along it."""
    n = p.dimension
    zero = Fraction(0)

    def extend(g: AffineIsometry) -> AffineIsometry:
        A = tuple(row + (zero,) for row in g.linear) + (tuple([zero] * n + [Fraction(1)]),)
        return AffineIsometry(A, g.translation + (zero,))

    gens = tuple(extend(g) for g in p.generators)
    gens += (AffineIsometry.translation_by(_unit(n + 1, n)),)
    seed = tuple(row + (zero,) for row in p.seed_lattice) + (_unit(n + 1, n),)
    label = f"{p.label} x S1" if p.label else ""
    return CrystalPresentation(n + 1, gens, seed, label)


def _ghw_linear_parts(n: int) -> list[tuple[int, ...]]:
    # generator i fixes axis i and negates the others; n odd keeps det = +1
    return [tuple(1 if j == i else -1 for j in range(n)) for i in range(n - 1)]


def _half_vectors_fixing(n: int, axis: int):
    """All w in {0,1/2}^n with w[axis] = 1/2, lexicographic (0 before 1/2)."""
    for bits in product((0, 1), repeat=n):
        if bits[axis]:
            yield bits


def _bitmask(bits) -> int:
    return sum(1 << j for j, b in enumerate(bits) if b)


def _new_subsets_free(neg_masks, shift_masks, n) -> bool:
    # Modulo Z^n, diagonal sign matrices act trivially on {0,1/2}^n, so the
    # element for a subset T of generators has sign mask XOR(neg) and shift
    # XOR(shift). It has finite order iff no fixed axis carries a 1/2 shift.
    # Only subsets containing the newest generator are checked.
    k = len(neg_masks) - 1
    full = (1 << n) - 1
    for subset in range(1 << k):
        neg, shift = neg_masks[k], shift_masks[k]
        for i in range(k):
            if subset >> i & 1:
                neg ^= neg_masks[i]
                shift ^= shift_masks[i]
        if shift & (full & ~neg) == 0:
            return False
    return True


@dataclass
class GhwSearchResult:
    presentation: Optional[CrystalPresentation]
    candidates_tried: int
    bound: int


def ghw_search(n: int, bound: int = DEFAULT_GHW_BOUND) -> GhwSearchResult:
    """First generalized Hantzsche-Wendt presentation in lexicographic translation order.

    Linear parts are the n-1 diagonal sign matrices fixing exactly one axis each;
    they generate all determinant-one diagonal sign matrices. Translations range
    over {0,1/2}^n per generator. The search is depth-first in lexicographic
    order and abandons a prefix as soon as some product of its generators has
    finite order, which cannot change the first hit. ``bound`` caps the number
    of partial and complete assignments visited. Hits are confirmed with the
    generic closure and torsion test before being returned.
    """
    if n < 3 or n % 2 == 0:
        raise PreconditionError(f"generalized Hantzsche-Wendt manifolds need odd dimension >= 3, got {n}")
    signs = _ghw_linear_parts(n)
    neg_masks = [_bitmask(s == -1 for s in sig) for sig in signs]
    options = [list(_half_vectors_fixing(n, i)) for i in range(n - 1)]
    tried = 0
    chosen: list = []

    def dfs() -> Optional[CrystalPresentation]:
        nonlocal tried
        depth = len(chosen)
        if depth == n - 1:
            p = _ghw_presentation(n, signs, chosen)
            c = closure(p)
            if is_torsion_free(c)[0] and is_ghw(c):
                return p
            log.warning("fast GHW filter accepted a candidate the closure rejected: %s", chosen)
            return None
        for bits in options[depth]:
            if tried >= bound:
                return None
            tried += 1
            chosen.append(bits)
            masks = [_bitmask(w) for w in chosen]
            if _new_subsets_free(neg_masks[: depth + 1], masks, n):
                found = dfs()
                if found is not None:
                    return found
            chosen.pop()
        return None

    found = dfs()
    if found is None:
        log.info("ghw_search(%d) exhausted after %d candidates", n, tried)
    return GhwSearchResult(found, tried, bound)


def _ghw_presentation(n, signs, shifts) -> CrystalPresentation:
    gens = [AffineIsometry.translation_by(_unit(n, i)) for i in range(n)]
    for sig, bits in zip(signs, shifts):
        gens.append(AffineIsometry(diagonal(sig), tuple(HALF if b else Fraction(0) for b in bits)))
    seed = tuple(_unit(n, i) for i in range(n))
    return CrystalPresentation(n, tuple(gens), seed, f"ghw({n})")


def require_ghw(n: int, bound: int = DEFAULT_GHW_BOUND) -> CrystalPresentation:
    result = ghw_search(n, bound)
    if result.presentation is None:
        raise SearchExhaustedError(
            f"no generalized Hantzsche-Wendt presentation in dimension {n} within {bound} candidates"
        )
    return result.presentation


# Flags below are literature results attached to recognised families; nothing
# here computes characteristic classes.
CITATION_IM_KIM = (
    "Im and Kim, flat manifolds with nonvanishing Stiefel-Whitney classes: "
    "w_2j(N) != 0 for 0 <= 2j <= n on the (2n+1)-dimensional family"
)
CITATION_GHW_SPINC = (
    "generalized Hantzsche-Wendt manifolds of dimension > 3 admit no spin^C structure "
    "(cited result on GHW manifolds)"
)
CITATION_CODIM_ONE = (
    "a codimension-one submanifold with trivial normal bundle inherits w_2j and spin^C "
    "obstructions (N x S1 contains N this way)"
)


@lru_cache(maxsize=64)
def _im_kim_closure(dimension: int) -> Optional[tuple[int, GroupClosure]]:
    if dimension < 3:
        return None
    if dimension % 2:
        n = (dimension - 1) // 2
        return n, closure(im_kim(n))
    n = (dimension - 2) // 2
    return n, closure(product_with_circle(im_kim(n)))


def im_kim_member(c: GroupClosure) -> Optional[int]:
    """n when c is the closure of im_kim(n) or of its product with a circle."""
    hit = _im_kim_closure(c.dimension)
    if hit is not None and hit[1] == c:
        return hit[0]
    return None


def _drop_circle(c: GroupClosure) -> Optional[GroupClosure]:
    """The closure of N when c looks like N x S1 with the circle on the last axis."""
    n = c.dimension
    if n < 2:
        return None
    last = _unit(n, n - 1)
    if last not in c.lattice:
        return None
    cosets = {}
    for A, v in c.cosets.items():
        if A[n - 1] != last or any(A[i][n - 1] != 0 for i in range(n - 1)):
            return None
        if v[n - 1] != 0:
            return None
        cosets[tuple(row[: n - 1] for row in A[: n - 1])] = v[: n - 1]
    rows = []
    for b in c.lattice.basis:
        if b[n - 1] % 1 != 0:
            return None
        head = b[: n - 1]
        if any(head):
            rows.append(head)
    sub = Lattice(rows, n - 1)
    if not sub.full_rank:
        return None
    return GroupClosure(n - 1, {A: sub.reduce(v) for A, v in cosets.items()}, sub)


def topology_flags(c: GroupClosure) -> dict:
    torsion_free = is_torsion_free(c)[0]
    flags = {
        "sw_nonvanishing_range": None,
        "spinc_obstructed": False,
        "citations": [],
    }
    if not torsion_free:
        return flags
    member = im_kim_member(c)
    if member is not None:
        flags["sw_nonvanishing_range"] = member
        flags["citations"].append(CITATION_IM_KIM)
        if c.dimension % 2 == 0:
            flags["citations"].append(CITATION_CODIM_ONE)
    if is_ghw(c) and c.dimension > 3:
        flags["spinc_obstructed"] = True
        flags["citations"].append(CITATION_GHW_SPINC)
    else:
        base = _drop_circle(c)
        if base is not None and base.dimension > 3 and is_ghw(base) and is_torsion_free(base)[0]:
            flags["spinc_obstructed"] = True
            flags["citations"].extend([CITATION_GHW_SPINC, CITATION_CODIM_ONE])
    return flags


def check_report(p: CrystalPresentation) -> dict:
    """Closure plus every predicate, as a JSON-ready dict."""
    return copy.deepcopy(_check_report_cached(p))


@lru_cache(maxsize=64)
def _check_report_cached(p: CrystalPresentation) -> dict:
    c = closure(p)
    free, witness = is_torsion_free(c)
    return {
        "dimension": p.dimension,
        "holonomy_order": c.order,
        "holonomy_rank": holonomy_rank(c),
        "lattice": [[format_rational(x) for x in row] for row in c.lattice.basis],
        "torsion_free": free,
        "torsion_witness": None if witness is None else witness.to_json(),
        "orientable": is_orientable(c),
        "diagonal_holonomy": is_diagonal_holonomy(c),
        "ghw": is_ghw(c),
        "im_kim_member": im_kim_member(c),
        "flags": topology_flags(c),
    }
