from fractions import Fraction
import random

import pytest
from hypothesis import given, strategies as st

from cuspforms.arith import INF, primes_up_to
from cuspforms.errors import ZeroInputError
from cuspforms.forms import DiagonalForm, parse_form, signature
from cuspforms.local import (
    InvariantProfile,
    hasse_witt,
    hilbert,
    profile,
    profile_mismatches,
    relevant_places,
)

from .oracles import hasse_witt_oracle, hilbert_oracle, profile_oracle

F = Fraction
nonzero = st.builds(F, st.integers(-40, 40).filter(bool), st.integers(1, 15))
places = st.sampled_from([INF, 2, 3, 5, 7, 11, 13])
forms = st.lists(nonzero, min_size=1, max_size=7).map(lambda c: DiagonalForm(tuple(c)))


@pytest.mark.parametrize(
    "a,b,v,expected",
    [
        (1, 5, 3, 1),
        (1, -7, INF, 1),
        (-1, -1, INF, -1),
        (-1, -1, 2, -1),
        (3, 3, 3, -1),
        (2, 3, 3, -1),
        (-1, 3, 3, -1),
        (5, 7, 2, 1),
        (3, 7, 2, -1),
        (2, 5, 5, -1),
        (F(2, 9), F(-25, 3), 3, -1),
    ],
)
def test_hilbert_examples(a, b, v, expected):
    assert hilbert(a, b, v) == expected
    assert hilbert_oracle(a, b, v) == expected


def test_hilbert_rejects_zero():
    with pytest.raises(ZeroInputError):
        hilbert(0, 3, 3)


@given(nonzero, nonzero, places)
def test_symmetry(a, b, v):
    assert hilbert(a, b, v) == hilbert(b, a, v)


@given(nonzero, nonzero, nonzero, places)
def test_bimultiplicative(a, b, c, v):
    assert hilbert(a, b * c, v) == hilbert(a, b, v) * hilbert(a, c, v)


@given(nonzero, nonzero, places)
def test_norm_and_square_laws(a, s, v):
    assert hilbert(a, -a, v) == 1
    assert hilbert(a, s * s, v) == 1
    if a != 1:
        assert hilbert(a, 1 - a, v) == 1


@given(nonzero, nonzero)
def test_symbol_reciprocity(a, b):
    # every prime dividing a or b is at most 37
    prod = hilbert(a, b, INF)
    for p in primes_up_to(41):
        prod *= hilbert(a, b, p)
    assert prod == 1


@pytest.mark.parametrize(
    "text,v,expected",
    [
        ("<1,1,1>", 2, 1),
        ("<1,1,1>", 3, 1),
        ("<1,1,1>", INF, 1),
        ("<1,1,1,3,3,3>", 3, -1),
        ("<1,1,1,3,3,3>", 2, -1),
        ("<1,1,1,3,3,3>", INF, 1),
    ],
)
def test_hasse_witt_examples(text, v, expected):
    f = parse_form(text)
    assert hasse_witt(f, v) == expected
    assert hasse_witt_oracle(list(f.coefficients), v) == expected


def test_hasse_witt_trivial_everywhere():
    f = parse_form("<1,1,1,1,1,1,-3>")
    for v in [INF, *primes_up_to(50)]:
        assert hasse_witt(f, v) == 1
    for v in [INF, 2, 3, 5]:
        assert hasse_witt_oracle(list(f.coefficients), v) == 1


@pytest.mark.parametrize(
    "text,expected",
    [
        ("<1,-1>", (2, (1, 1), -1, frozenset())),
        ("<1,1,1,1,1,1,-3>", (7, (6, 1), -3, frozenset())),
        ("<1,1,1,3,3,3>", (6, (6, 0), 3, frozenset({2, 3}))),
        ("<1,1,1,2,6>", (5, (5, 0), 3, frozenset({2, 3}))),
    ],
)
def test_profile_examples(text, expected):
    f = parse_form(text)
    p = profile(f)
    assert (p.rank, tuple(p.signature), p.discriminant, p.negative_places) == expected
    assert profile_oracle(f.coefficients, relevant_places(f)) == expected


@pytest.mark.parametrize(
    "text,expected",
    [
        ("<1,1>", {INF, 2}),
        ("<1,1,1,1,1,1,-3>", {INF, 2, 3}),
        ("<5/6,7>", {INF, 2, 3, 5, 7}),
    ],
)
def test_relevant_places(text, expected):
    assert relevant_places(parse_form(text)) == expected


@given(forms)
def test_reciprocity_for_forms(f):
    assert len(profile(f).negative_places) % 2 == 0
    # no -1 outside the relevant places
    for p in primes_up_to(60):
        if p not in relevant_places(f):
            assert hasse_witt(f, p) == 1


@given(forms)
def test_real_place_matches_signature(f):
    s = signature(f).s
    assert hasse_witt(f, INF) == (-1) ** (s * (s - 1) // 2)


@given(forms, st.randoms(use_true_random=False))
def test_profile_permutation_invariant(f, rnd):
    coeffs = list(f.coefficients)
    rnd.shuffle(coeffs)
    assert profile(DiagonalForm(tuple(coeffs))) == profile(f)


@given(forms, st.integers(0, 6), nonzero)
def test_profile_square_invariant(f, i, s):
    i %= f.rank
    coeffs = list(f.coefficients)
    coeffs[i] *= s * s
    assert profile(DiagonalForm(tuple(coeffs))) == profile(f)


def test_profile_json_round_trip():
    rng = random.Random(7)
    for _ in range(50):
        f = DiagonalForm(tuple(F(rng.choice([-1, 1]) * rng.randint(1, 30), rng.randint(1, 5)) for _ in range(rng.randint(1, 6))))
        p = profile(f)
        assert InvariantProfile.from_json(p.to_json()) == p


def test_profile_json_shape():
    assert profile(parse_form("<1,1,1,3,3,3>")).to_json() == {
        "rank": 6,
        "sig": [6, 0],
        "disc": "3",
        "neg_places": ["2", "3"],
    }


def test_mismatch_names():
    a = profile(parse_form("<1,1,-1>"))
    b = profile(parse_form("<1,1,-3>"))
    assert profile_mismatches(a, b) == ["discriminant"]
    c = profile(parse_form("<1,1,1,3,3,3>"))
    d = profile(parse_form("<1,1,1,1,1,3>"))
    assert profile_mismatches(c, d) == ["hasse_witt@2", "hasse_witt@3"]
    assert profile_mismatches(a, a) == []
