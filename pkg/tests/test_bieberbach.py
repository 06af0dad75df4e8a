from fractions import Fraction
import json
import random

import pytest

from cuspforms.bieberbach import (
    AffineIsometry,
    CrystalPresentation,
    check_report,
    closure,
    determinant,
    diagonal,
    ghw_search,
    holonomy_rank,
    identity,
    im_kim,
    im_kim_member,
    is_diagonal_holonomy,
    is_ghw,
    is_identity,
    is_orientable,
    is_torsion_free,
    mat_mul,
    preserves_form,
    product_with_circle,
    require_ghw,
    topology_flags,
    torus,
)
from cuspforms.errors import NotCrystallographicError, PreconditionError, SearchExhaustedError
from cuspforms.forms import DiagonalForm

from .fixtures import torsion_fixtures
from .oracles import affine_power_is_identity, torsion_brute

F = Fraction
H = F(1, 2)


def random_positive_form(rng, n):
    return DiagonalForm(tuple(F(rng.randint(1, 50), rng.randint(1, 9)) for _ in range(n)))


def test_affine_algebra():
    g = AffineIsometry(((0, -1), (1, 0)), (H, 0))
    h = AffineIsometry(diagonal([1, -1]), (0, F(1, 3)))
    x = (F(2), F(-5, 7))
    assert (g @ h)(x) == g(h(x))
    assert (g @ g.inverse())(x) == x
    assert g.power(4)(x) == (g @ g @ g @ g)(x)
    assert AffineIsometry.from_json(g.to_json()) == g
    flat = {"A": ["0", "-1", "1", "0"], "v": ["1/2", "0"]}
    assert AffineIsometry.from_json(flat) == g
    with pytest.raises(PreconditionError):
        AffineIsometry(((1, 0), (0, 0)), (0, 0))


def test_torus_closure():
    c = closure(torus(3))
    assert c.order == 1
    assert c.lattice.basis == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert is_orientable(c) and not is_ghw(c)
    assert is_torsion_free(c) == (True, None)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_im_kim_shape(n):
    p = im_kim(n)
    assert p.dimension == 2 * n + 1
    assert len(p.generators) == 2 * n + 2
    assert all(determinant(g.linear) == 1 for g in p.generators)
    taus, K = p.generators[n + 1 : 2 * n + 1], p.generators[-1]
    c = closure(p)
    for g in [*taus, K]:
        sq = g @ g
        assert is_identity(sq.linear)
        assert sq.translation in c.lattice
    flipped = n + 1 if n % 2 else n
    assert [K.linear[i][i] for i in range(2 * n + 1)] == [1] * (2 * n + 1 - flipped) + [-1] * flipped
    assert K.translation == tuple(H if i <= n else 0 for i in range(2 * n + 1))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_im_kim_closure(n):
    c = closure(im_kim(n))
    assert c.order == 2 ** (n + 1)
    assert holonomy_rank(c) == n + 1
    assert is_torsion_free(c)[0]
    assert is_orientable(c) and is_diagonal_holonomy(c)
    assert is_ghw(c) == (n == 1)
    assert im_kim_member(c) == n


def test_im_kim_rejects_zero():
    with pytest.raises(PreconditionError):
        im_kim(0)


@pytest.mark.parametrize("p", [torus(2), im_kim(1), im_kim(2), product_with_circle(im_kim(1))], ids=str)
def test_closure_soundness(p):
    c = closure(p)
    for A in c.holonomy:
        for B in c.holonomy:
            g = AffineIsometry(A, c.cosets[A]) @ AffineIsometry(B, c.cosets[B])
            assert g.linear in c.cosets
            assert c.lattice.reduce(g.translation) == c.cosets[g.linear]
        for b in c.lattice.basis:
            assert tuple(sum(A[i][j] * b[j] for j in range(c.dimension)) for i in range(c.dimension)) in c.lattice
    for v in p.seed_lattice:
        assert v in c.lattice
    for A, v in c.cosets.items():
        assert c.lattice.reduce(v) == v
        assert all(0 <= x < 1 for x in v) or not c.lattice.full_rank


def _fixture_id(fx):
    return fx[0].label


@pytest.mark.parametrize("fx", torsion_fixtures(), ids=_fixture_id)
def test_torsion_matches_brute_force(fx):
    p, expected = fx
    c = closure(p)
    free, witness = is_torsion_free(c)
    assert free == expected
    brute = torsion_brute(c.cosets, c.lattice.basis, radius=2)
    assert (brute is None) == free
    if witness is not None:
        g = witness.element
        assert affine_power_is_identity(g.linear, g.translation, witness.order)
        assert g(witness.fixed_point) == witness.fixed_point


def test_point_reflection_witness():
    p = CrystalPresentation(
        3,
        (AffineIsometry(diagonal([-1, -1, -1]), (0, 0, 0)),),
        tuple(tuple(F(int(i == j)) for j in range(3)) for i in range(3)),
    )
    free, w = is_torsion_free(closure(p))
    assert not free
    assert w.order == 2
    assert w.fixed_point == (0, 0, 0)


def test_not_crystallographic():
    shear = AffineIsometry(((1, 1), (0, 1)), (0, 0))
    units = ((1, 0), (0, 1))
    with pytest.raises(NotCrystallographicError):
        closure(CrystalPresentation(2, (shear,), units))


def test_seed_must_be_full_rank():
    with pytest.raises(PreconditionError):
        CrystalPresentation(2, (), ((1, 0),))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_im_kim_preserves_random_forms(n):
    rng = random.Random(n)
    p = im_kim(n)
    for _ in range(100):
        assert preserves_form(p, random_positive_form(rng, 2 * n + 1))


def test_preserves_form_examples():
    rot = AffineIsometry(((0, -1), (1, 0)), (0, 0))
    p = CrystalPresentation(2, (rot,), ((1, 0), (0, 1)))
    assert not preserves_form(p, DiagonalForm.of(1, 2))
    assert preserves_form(p, DiagonalForm.of(3, 3))
    assert preserves_form(torus(2), DiagonalForm.of(1, 7))
    with pytest.raises(PreconditionError):
        preserves_form(torus(2), DiagonalForm.of(1, 1, 1))


def test_product_with_circle():
    assert closure(product_with_circle(torus(2))) == closure(torus(3))
    for n in (1, 2):
        base = closure(im_kim(n))
        c = closure(product_with_circle(im_kim(n)))
        assert c.dimension == 2 * n + 2
        assert holonomy_rank(c) == n + 1
        embedded = sorted(tuple(row + (0,) for row in A) + ((0,) * (2 * n + 1) + (1,),) for A in base.holonomy)
        assert [tuple(map(tuple, A)) for A in c.holonomy] == [tuple(map(tuple, A)) for A in embedded]
        assert is_torsion_free(c)[0]
        assert im_kim_member(c) == n


def test_ghw_search():
    r3 = ghw_search(3)
    c3 = closure(r3.presentation)
    assert is_ghw(c3) and is_torsion_free(c3)[0] and holonomy_rank(c3) == 2
    r5 = ghw_search(5)
    assert r5.presentation is not None and r5.candidates_tried <= r5.bound
    c5 = closure(r5.presentation)
    assert is_ghw(c5) and is_torsion_free(c5)[0]
    with pytest.raises(PreconditionError):
        ghw_search(4)
    with pytest.raises(PreconditionError):
        ghw_search(1)


def test_ghw_search_is_deterministic():
    assert ghw_search(5).presentation.to_json() == ghw_search(5).presentation.to_json()


def test_ghw_search_bound():
    r = ghw_search(5, bound=3)
    assert r.presentation is None and r.candidates_tried == 3
    with pytest.raises(SearchExhaustedError):
        require_ghw(5, bound=3)


def test_topology_flags():
    f2 = topology_flags(closure(im_kim(2)))
    assert f2["sw_nonvanishing_range"] == 2 and not f2["spinc_obstructed"]
    f1 = topology_flags(closure(im_kim(1)))
    assert f1["sw_nonvanishing_range"] == 1 and not f1["spinc_obstructed"]
    g5 = topology_flags(closure(ghw_search(5).presentation))
    assert g5["spinc_obstructed"] and g5["sw_nonvanishing_range"] is None
    g5c = topology_flags(closure(product_with_circle(ghw_search(5).presentation)))
    assert g5c["spinc_obstructed"]
    assert len(g5c["citations"]) == 2
    assert not topology_flags(closure(product_with_circle(ghw_search(3).presentation)))["spinc_obstructed"]
    assert topology_flags(closure(torus(3))) == {"sw_nonvanishing_range": None, "spinc_obstructed": False, "citations": []}


def test_presentation_json_round_trip():
    for p in (torus(2), im_kim(2), product_with_circle(im_kim(1)), ghw_search(5).presentation):
        text = json.dumps(p.to_json(), sort_keys=True)
        assert CrystalPresentation.from_json(json.loads(text)) == p


def test_from_json_default_seed():
    data = {"dimension": 1, "generators": [{"A": [["1"]], "v": ["1"]}]}
    p = CrystalPresentation.from_json(data)
    assert p.seed_lattice == ((1,),)


def test_check_report_fields():
    r = check_report(im_kim(2))
    assert r["holonomy_order"] == 8 and r["holonomy_rank"] == 3
    assert r["torsion_free"] and r["torsion_witness"] is None
    assert r["orientable"] and r["diagonal_holonomy"] and not r["ghw"]
    assert r["im_kim_member"] == 2
    json.dumps(r)


def test_group_identity_and_matrix_helpers():
    A = diagonal([1, -1, -1])
    assert mat_mul(A, A) == identity(3)
