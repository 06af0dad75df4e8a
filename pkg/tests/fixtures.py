"""Small crystallographic presentations (dimension <= 3) shared by the torsion tests."""

from fractions import Fraction

from cuspforms.bieberbach import (
    AffineIsometry,
    CrystalPresentation,
    diagonal,
    ghw_search,
    im_kim,
    product_with_circle,
    torus,
)

H = Fraction(1, 2)
Q = Fraction(1, 4)


def _with_lattice(label, extra, n):
    units = [tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)]
    gens = tuple(AffineIsometry.translation_by(u) for u in units) + tuple(extra)
    return CrystalPresentation(n, gens, tuple(units), label)


def _g(A, v):
    return AffineIsometry(tuple(tuple(map(Fraction, r)) for r in A), tuple(map(Fraction, v)))


def torsion_fixtures():
    """(presentation, expected torsion_free) pairs."""
    glide = _with_lattice("klein bottle", [_g(diagonal([1, -1]), (H, 0))], 2)
    mirror = _with_lattice("mirror", [_g(diagonal([1, -1]), (0, 0))], 2)
    return [
        (torus(1), True),
        (torus(2), True),
        (torus(3), True),
        (im_kim(1), True),
        (ghw_search(3).presentation, True),
        (glide, True),
        (mirror, False),
        (_with_lattice("half turn", [_g(diagonal([-1, -1]), (0, 0))], 2), False),
        (_with_lattice("quarter turn", [_g(((0, -1), (1, 0)), (0, 0))], 2), False),
        (_with_lattice("third turn", [_g(((0, -1), (1, -1)), (0, 0))], 2), False),
        (_with_lattice("glide off axis", [_g(diagonal([1, -1]), (0, H))], 2), False),
        (_with_lattice("point reflection", [_g(diagonal([-1, -1, -1]), (0, 0, 0))], 3), False),
        (_with_lattice("dicosm", [_g(diagonal([-1, -1, 1]), (0, 0, H))], 3), True),
        (_with_lattice("quarter screw", [_g(((0, -1, 0), (1, 0, 0), (0, 0, 1)), (0, 0, Q))], 3), True),
        (_with_lattice("quarter screw, wrong axis", [_g(((0, -1, 0), (1, 0, 0), (0, 0, 1)), (Q, 0, 0))], 3), False),
        (_with_lattice("third screw", [_g(((0, -1, 0), (1, -1, 0), (0, 0, 1)), (0, 0, Fraction(1, 3)))], 3), True),
        (_with_lattice("glide, no shift", [_g(diagonal([1, -1, -1]), (0, H, 0))], 3), False),
        (_with_lattice("screw", [_g(diagonal([1, -1, -1]), (H, 0, 0))], 3), True),
        (
            _with_lattice(
                "two half-turn screws",
                [_g(diagonal([1, -1, -1]), (H, H, 0)), _g(diagonal([-1, 1, -1]), (0, H, H))],
                3,
            ),
            True,
        ),
        (
            _with_lattice(
                "two half turns, common fixed point",
                [_g(diagonal([1, -1, -1]), (H, 0, 0)), _g(diagonal([-1, 1, -1]), (0, 0, 0))],
                3,
            ),
            False,
        ),
        (product_with_circle(glide), True),
        (product_with_circle(mirror), False),
        (product_with_circle(torus(2)), True),
    ]
