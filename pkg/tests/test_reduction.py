from fractions import Fraction as F

import pytest
from hypothesis import given
from hypothesis import strategies as st

from charvar.charspace import Character, kappa
from charvar.modular import GammaElement, apply
from charvar.reduction import (
    ReductionError,
    Verdict,
    descent_holds,
    in_omega,
    reduce,
    sort_normalize,
    step_bound_holds,
    zeta_pm,
)
from strategies import above_two


def C(*v):
    return Character(*(F(u) for u in v))


def test_reduce_worked_example():
    r = reduce(C(3, 24, 9))
    assert r.steps == 2
    assert r.verdict is Verdict.NON_HYPERBOLIC and r.axis == "x"
    assert r.normal_form == C(0, -3, -3)
    assert r.applied.word_str() == "P123 Sigma3 Qz P23 Qz P23"
    assert apply(r.applied, C(3, 24, 9)) == r.normal_form


def test_pants_character_is_fixed():
    r = reduce(C(-3, -3, -3))
    assert r.steps == 0 and r.verdict is Verdict.FRICKE_PANTS
    assert r.applied.is_identity()


def test_reduce_needs_kappa_above_two():
    with pytest.raises(ReductionError):
        reduce(C(0, 0, 0))
    with pytest.raises(ValueError):
        reduce(C(2, 2, 2))


def test_to_json_shape():
    out = reduce(C(3, 24, 9)).to_json()
    assert out["verdict"] == "NonHyperbolicCoordinate(x)"
    assert out["normal_form"] == {"x": "0", "y": "-3", "z": "-3", "mode": "exact"}


def test_zeta_pm_exact_and_float():
    zi = zeta_pm(F(3), F(3))  # disc = 25
    assert (zi.lo, zi.hi) == (F(2), F(7))
    zi = zeta_pm(F(3), F(4))  # disc = 60, irrational
    assert isinstance(zi.lo, float) and abs(zi.lo * zi.hi - (9 + 16 - 4)) < 1e-9
    with pytest.raises(ValueError):
        zeta_pm(F(2), F(5))


def test_sort_normalize():
    c, g = sort_normalize(C(-5, 3, -4))
    assert c == C(3, 4, 5)
    assert apply(g, C(-5, 3, -4)) == c
    with pytest.raises(ReductionError):
        sort_normalize(C(1, 5, 5))
    with pytest.raises(ReductionError):
        sort_normalize(C(-3, 5, 5))


admissible = st.tuples(above_two, above_two, above_two).map(lambda v: Character(*v)).filter(lambda c: kappa(c) > 2)


@given(admissible)
def test_soundness_and_step_bound(c):
    r = reduce(c)
    assert apply(r.applied, c) == r.normal_form
    assert kappa(r.normal_form) == kappa(c)
    assert step_bound_holds(c, r.steps)
    nf = r.normal_form
    if r.verdict is Verdict.FRICKE_PANTS:
        assert all(v <= -2 for v in nf)
    else:
        assert any(-2 <= v <= 2 for v in nf)


@given(admissible)
def test_descent_and_interval(c):
    s, _ = sort_normalize(c)
    assert descent_holds(s)
    zi = zeta_pm(s.x, s.y)
    assert zi.lo < s.y < zi.hi
    assert kappa(Character(s.x, s.y, s.y)) < 2


def test_step_bound_is_tight_enough():
    # exact comparison: 1 step allowed iff the bound is positive
    assert step_bound_holds(C(3, 3, 9), 1)
    assert not step_bound_holds(C(3, 3, 9), 40)


@pytest.mark.parametrize(
    "point, expected",
    [((-3, -3, -3), True), ((3, 3, -3), True), ((3, 24, 9), False), ((-2, -5, -5), False)],
)
def test_in_omega_examples(point, expected):
    assert in_omega(C(*point)) is expected


def test_in_omega_threshold():
    # kappa(3, 3, 8) = 8 lies below 18, where the octant has no points
    assert kappa(C(3, 3, 8)) == 8
    assert not in_omega(C(3, 3, 8))
    assert in_omega(C(-3, -3, -2 - F(1, 10)))
    with pytest.raises(ReductionError):
        in_omega(C(0, 0, 0))


def test_omega_moved_by_gamma2_generator():
    c = C(-3, -3, -3)
    for word in ("Qx", "Qy", "Qz", "Qx Qy"):
        d = apply(GammaElement.from_word(word), c)
        assert not all(v < -2 for v in d)
