import cmath
from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from charvar.charspace import Character, kappa
from charvar.traces import (
    KAPPA_POLY,
    FreeWord,
    commutator,
    factorization_check,
    numeric_trace,
    parse_letters,
    reducible_param,
    torus_cover,
    torus_matrix,
    trace_polynomial,
    trace_via_algebra,
)
from charvar.modular import Gl2zClass, apply, from_gl2z
from strategies import free_letters, nonzero_rationals

# frozen from oracles.exact_trace with (x, y, zeta) = (3/2, -2, 3) and (5, 1/3, -2/7)
P1 = Character(F(3, 2), F(-2), F(10, 3))
P2 = Character(F(5), F(1, 3), F(-53, 14))
FROZEN = [
    ("X Y", F(10, 3), F(-53, 14)),
    ("X Y x y", F(913, 36), F(77179, 1764)),
    ("X X", F(1, 4), F(23)),
    ("Y x", F(-19, 3), F(229, 42)),
    ("X X X Y y X Y", F(15, 4), F(-6207, 14)),
    ("X Y X Y", F(82, 9), F(2417, 196)),
    ("X X Y x y y", F(-917, 12), F(397109, 5292)),
    ("X y X Y x Y", F(16339, 108), F(-17146555, 74088)),
]


def _oracle_letters(letters):
    return "".join(g if e > 0 else g.lower() for g, e in letters for _ in range(abs(e)))


@pytest.mark.parametrize("word, v1, v2", FROZEN)
def test_frozen_traces(word, v1, v2):
    p = trace_polynomial(word)
    assert p(P1) == v1
    assert p(P2) == v2


def test_commutator_is_kappa():
    assert trace_polynomial(commutator()) == KAPPA_POLY
    assert str(trace_polynomial("X Y x y")) == "-x*y*z + x^2 + y^2 + z^2 - 2"


@pytest.mark.parametrize(
    "word, text",
    [("X", "x"), ("X^2", "x^2 - 2"), ("X^-1", "x"), ("X^3", "x^3 - 3*x"), ("X y", "x*y - z"), ("1", "2")],
)
def test_small_polynomials(word, text):
    assert str(trace_polynomial(word if word != "1" else FreeWord())) == text


@given(free_letters)
def test_two_algorithms_agree(w):
    assert trace_polynomial(w) == trace_via_algebra(w)


@given(free_letters, st.sampled_from([(F(3, 2), F(-2), F(3)), (F(5), F(1, 3), F(-2, 7))]))
def test_polynomial_matches_exact_matrices(w, pt):
    xv, yv, zeta = pt
    c = Character(xv, yv, zeta + 1 / zeta)
    assert trace_polynomial(w)(c) == oracles.exact_trace(_oracle_letters(FreeWord(w).letters), xv, yv, zeta)


@given(free_letters)
def test_invariant_under_rotation_and_inversion(w):
    fw = FreeWord(w)
    p = trace_polynomial(fw)
    assert trace_polynomial(fw.inverse()) == p
    if len(fw.letters) > 1:
        rot = FreeWord(fw.letters[1:] + fw.letters[:1])
        assert trace_polynomial(rot) == p


def test_numeric_trace_complex_character():
    c = Character(0.3, -1.1, 0.7)  # |z| < 2, so zeta is on the unit circle
    for word, _, _ in FROZEN:
        assert cmath.isclose(numeric_trace(word, c), trace_polynomial(word)(c), abs_tol=1e-10)


def test_parse_letters():
    assert parse_letters("X^3 y X^-2") == (("X", 3), ("Y", -1), ("X", -2))
    assert FreeWord.parse("X x Y").letters == (("Y", 1),)
    with pytest.raises(ValueError):
        parse_letters("X Z")


def test_factorization_identity_symbolic():
    assert oracles.symbolic_factorization() == 0


@given(nonzero_rationals, nonzero_rationals)
def test_reducible_locus(xi, eta):
    assert kappa(reducible_param(xi, eta)) == 2
    assert factorization_check(xi, eta, xi * eta)


def test_reducible_param_rejects_zero():
    with pytest.raises(ValueError):
        reducible_param(F(0), F(1))


@pytest.mark.parametrize("m", [((1, 1), (0, 1)), ((1, 0), (1, 1)), ((2, 1), (1, 1)), ((0, 1), (1, 0)), ((1, 0), (0, -1))])
@given(a=st.floats(0, 1), b=st.floats(0, 1))
def test_torus_cover_equivariance(m, a, b):
    g = from_gl2z(m)
    (p, q), (r, s) = torus_matrix(Gl2zClass.of(m))
    lhs = apply(g, torus_cover((a, b)))
    rhs = torus_cover((p * a + q * b, r * a + s * b))
    assert max(abs(u - v) for u, v in zip(lhs, rhs)) < 1e-9
