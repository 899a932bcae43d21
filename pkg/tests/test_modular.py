from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from charvar.charspace import Character, kappa
from charvar.modular import (
    ALL_GENERATORS,
    GAMMA2_GENERATORS,
    GammaElement,
    Gen,
    Gl2zClass,
    apply,
    compose,
    differential_at_origin,
    from_gl2z,
    gamma2_word,
    homology,
    in_gamma2,
    parse_word,
    random_element,
    s3_image,
    signed_permutation,
)
from strategies import characters, gen_words, generators

E = GammaElement.from_word


@given(generators, characters)
def test_generators_preserve_kappa(g, c):
    assert kappa(apply(g, c)) == kappa(c)


@given(gen_words, gen_words, characters)
def test_composition_is_function_composition(u, v, c):
    g, h = E(u), E(v)
    assert apply(compose(g, h), c) == apply(g, apply(h, c))


@given(gen_words, characters)
def test_normal_form_determines_action(w, c):
    g = E(w)
    rebuilt = from_gl2z(g.pgl.m, g.signs)
    assert rebuilt.same_action(g)
    assert apply(rebuilt, c) == apply(g, c)


@pytest.mark.parametrize(
    "word",
    [
        "Qx Qx", "Qy Qy", "Qz Qz", "Sigma1 Sigma1", "P12 P12", "P123 P123 P123",
        "Sigma1 Sigma2 Sigma3", "P12 P23 P12 P13", "Nu Nu", "Epsilon",
        "P12 TauY P12 Qz TauX Qz", "Qz TauX Qz TauX",
    ],
)
def test_relations(word):
    g = E(word)
    assert g.is_identity()
    c = Character(Fraction(3, 2), Fraction(-7, 3), Fraction(5))
    assert apply(g, c) == c


def test_homology_of_twists():
    assert homology(Gen.TAUX).m == ((1, 1), (0, 1))
    assert homology(Gen.TAUY).m == ((1, 0), (1, 1))
    assert homology("TauX").m == homology(Gen.TAUX).m


def test_epsilon_is_minus_identity():
    assert homology(Gen.EPSILON).is_identity()
    assert Gl2zClass.of(((-1, 0), (0, -1))) == Gl2zClass.of(((1, 0), (0, 1)))


@pytest.mark.parametrize(
    "g, perm",
    [
        (Gen.P12, (2, 1, 3)), (Gen.P13, (3, 2, 1)), (Gen.P23, (1, 3, 2)),
        (Gen.P123, (2, 3, 1)), (Gen.P132, (3, 1, 2)),
        (Gen.QX, (1, 2, 3)), (Gen.QZ, (1, 2, 3)), (Gen.SIGMA2, (1, 2, 3)),
    ],
)
def test_s3_image_examples(g, perm):
    assert s3_image(g) == perm


@given(gen_words)
def test_s3_image_is_coordinate_permutation_at_origin(w):
    # the differential at the origin is always a signed permutation matching s3_image
    jac = differential_at_origin(E(w))
    assert signed_permutation(jac) == s3_image(E(w))


def test_reflections_have_trivial_permutation():
    for g in (Gen.QX, Gen.QY, Gen.QZ):
        jac = differential_at_origin(g)
        assert signed_permutation(jac) == (1, 2, 3)
        assert [jac[i][i] for i in range(3)].count(-1) == 1


@given(gen_words)
def test_s3_image_is_homomorphism_on_words(w):
    p = (1, 2, 3)
    for g in reversed(w):
        q = s3_image(g)
        p = tuple(q[p[i] - 1] for i in range(3))
    assert s3_image(E(w)) == p


@given(st.lists(st.sampled_from(GAMMA2_GENERATORS), max_size=15))
def test_gamma2_generators_stay_in_gamma2(w):
    assert in_gamma2(E(w))


@given(gen_words)
def test_gamma2_decomposition(w):
    g = E(w)
    if not in_gamma2(g):
        with pytest.raises(ValueError):
            gamma2_word(g.pgl, g.signs)
        return
    h = gamma2_word(g.pgl, g.signs)
    assert set(h.word) <= set(GAMMA2_GENERATORS)
    assert h.same_action(g)


@pytest.mark.parametrize(
    "m", [((1, 0), (0, 1)), ((2, 1), (1, 1)), ((5, 3), (3, 2)), ((0, 1), (-1, 0)), ((7, -4), (-2, 1))]
)
def test_from_gl2z_roundtrip(m):
    g = from_gl2z(m)
    assert g.pgl == Gl2zClass.of(m)
    assert g.signs == (0, 0)


def test_non_unimodular_rejected():
    with pytest.raises(ValueError):
        Gl2zClass.of(((2, 0), (0, 1)))


def test_parse_word():
    assert parse_word("qx  TAUY sigma1") == (Gen.QX, Gen.TAUY, Gen.SIGMA1)
    with pytest.raises(ValueError):
        parse_word("Qw")


def test_random_element_deterministic():
    a, b = random_element(40, 7), random_element(40, 7)
    assert a.word == b.word and len(a) == 40
    assert set(random_element(200, 1).word) <= set(ALL_GENERATORS)
