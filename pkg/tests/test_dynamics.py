import math
import warnings
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats

import oracles
from charvar.charspace import Character, float_kappa, kappa
from charvar.dynamics import (
    SYMMETRIC_GENERATORS,
    Box,
    OrbitPolicy,
    autocorrelation_time,
    compact_mass,
    compact_x_cdf,
    dehn_rotation_angle,
    ellipse_E,
    equidistribution_stat,
    gl2z_torus_action,
    make_rng,
    orbit,
    orbit_array,
    sample_level_set,
    torus_pushforward_sample,
    twist_matrix,
)
from charvar.modular import Gen, apply
from strategies import small_characters


def test_make_rng_streams():
    a = make_rng(5).random(4)
    assert np.array_equal(a, make_rng(5).random(4))
    assert np.array_equal(make_rng(5, 2).random(4), make_rng(7).random(4))
    assert not np.array_equal(a, make_rng(5, 1).random(4))


def test_box_parse():
    assert Box.parse("3") == Box.cube(3)
    assert Box.parse("0,1,-1,1,2,5/2") == Box((0, -1, 2), (1, 1, 2.5))
    for bad in ("1,2", "1,1,0,1,0,1"):
        with pytest.raises(ValueError):
            Box.parse(bad)
    assert list(Box.cube(1).contains([[0, 0, 0], [0, 2, 0]])) == [True, False]


def test_symmetric_generators_closed_under_inverse():
    from charvar.modular import GammaElement, compose

    for g in SYMMETRIC_GENERATORS:
        e = GammaElement.generator(g)
        assert any(compose(e, GammaElement.generator(h)).is_identity() for h in SYMMETRIC_GENERATORS)


@given(small_characters, st.integers(0, 2**32))
def test_exact_orbit_preserves_kappa(c, seed):
    t = kappa(c)
    for step in orbit(c, OrbitPolicy.uniform(seed), 40):
        assert kappa(step.character) == t


def test_orbit_records_and_cycle():
    c = Character(F(1, 2), F(1, 3), F(1, 5))
    steps = list(orbit(c, OrbitPolicy.cycle("Qz"), 2))
    assert steps[0].character == apply(Gen.QZ, c)
    assert steps[1].character == c
    rec = steps[0].record()
    assert set(rec) == {"step", "x", "y", "z", "kappa", "word"}
    assert rec["word"] == "Qz" and rec["z"] == "-1/30"


def test_reduced_policy_never_backtracks():
    from charvar.modular import GammaElement, compose

    words = [s.word for s in orbit(Character(0.1, 0.2, 0.3), OrbitPolicy.reduced(3, seed=4), 200)]
    flat = [g for w in words for g in reversed(w)]
    for a, b in zip(flat, flat[1:]):
        assert not compose(GammaElement.generator(b), GammaElement.generator(a)).is_identity()


def test_orbit_window_confines():
    box = Box.cube(2.5)
    pts = orbit_array(Character(1.0, 1.0, 1.0), OrbitPolicy.uniform(3, window=box), 2000)
    assert box.contains(pts).all()


def test_float_orbit_overflow_stops():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        pts = orbit_array(Character(-3.0, -3.0, -3.0), OrbitPolicy.uniform(1), 5000)
    assert len(pts) < 5000
    assert any(issubclass(w.category, RuntimeWarning) for w in caught)


def test_orbit_array_matches_orbit():
    c = Character(0.3, -1.2, 0.9)
    pol = OrbitPolicy.uniform(11)
    a = orbit_array(c, pol, 300)
    b = np.array([s.character.as_tuple() for s in orbit(c, pol, 300)])
    assert np.array_equal(a, b)


@pytest.mark.parametrize("x0, t, rhs", [(0, 6, 8.0), (1, 2.5, 3.5), (0.5, 0, 1.75)])
def test_ellipse_rhs(x0, t, rhs):
    e = ellipse_E(x0, t)
    assert math.isclose(e.rhs, rhs)
    y, z = e.point(np.linspace(0, 2 * math.pi, 17))
    assert np.abs(float_kappa(np.full_like(y, x0), y, z) - t).max() < 1e-12


def test_ellipse_errors_and_degeneracy():
    with pytest.raises(ValueError):
        ellipse_E(2.0, 0)
    with pytest.raises(ValueError):
        ellipse_E(1.999, 1)  # t + 2 - x0^2 < 0
    assert not ellipse_E(0, 0).degenerate
    assert ellipse_E(2 - 1e-12, 6).degenerate


@pytest.mark.parametrize("x0, period", [(0.0, 4), (1.0, 6), (math.sqrt(2), 8)])
def test_dehn_twist_closes(x0, period):
    assert math.isclose(dehn_rotation_angle(x0) * period, 2 * math.pi)
    p = np.array([0.7, -0.4])
    m = np.linalg.matrix_power(twist_matrix(x0), period)
    assert np.abs(m @ p - p).max() < 1e-9


@given(st.floats(-1.8, 1.8), st.floats(0, 2 * math.pi))
def test_twist_is_rotation_in_angle(x0, u):
    e = ellipse_E(x0, 1.5)
    y, z = e.point(u)
    y2, z2 = twist_matrix(x0) @ np.array([y, z])
    d = (e.angle(y2, z2) - e.angle(y, z)) % (2 * math.pi)
    theta = dehn_rotation_angle(x0)
    assert min(abs(d - theta), abs(d - (2 * math.pi - theta))) < 1e-9
    assert abs(e.residual(y2, z2)) < 1e-9


def test_twist_matches_generator():
    c = Character(0.6, 0.3, -1.1)
    y, z = twist_matrix(0.6) @ np.array([0.3, -1.1])
    d = apply(Gen.TAUX, c)
    assert math.isclose(d.y, y) and math.isclose(d.z, z)


@pytest.mark.parametrize("t", [-1.5, 0.0, 1.0, 2.0])
def test_compact_mass_matches_quadrature(t):
    assert math.isclose(compact_mass(t), oracles.compact_mass_quadrature(t), rel_tol=1e-6)


def test_compact_mass_frozen():
    assert compact_mass(2) == 1.0
    assert math.isclose(compact_mass(0), 0.5)
    assert math.isclose(compact_mass(-1.5), 0.2300534561, rel_tol=1e-9)
    with pytest.raises(ValueError):
        compact_mass(3)


@pytest.mark.parametrize("t", [-1.0, 0.0, 2.0])
def test_sampler_mass_and_residual(t):
    s = sample_level_set(t, 40000, Box.cube(2), seed=3)
    assert len(s) == 40000
    assert s.kappa_residual() < 1e-9
    assert abs(s.mass - compact_mass(t)) < 0.03
    if t == 0.0:
        x = np.repeat(s.points[:, 0], 1)
        # weights are nearly constant; KS on the unweighted x-marginal
        assert stats.kstest(x, lambda v: compact_x_cdf(t, v)).pvalue > 1e-3


def test_sampler_deterministic_and_parallel():
    a = sample_level_set(0.5, 2000, Box.cube(2), seed=9)
    b = sample_level_set(0.5, 2000, Box.cube(2), seed=9)
    assert np.array_equal(a.points, b.points) and np.array_equal(a.weights, b.weights)
    c = sample_level_set(0.5, 2000, Box.cube(2), seed=9, workers=2)
    assert len(c) == 2000 and abs(c.mass - a.mass) < 0.05


def test_sampler_edge_cases():
    assert len(sample_level_set(0, 0, Box.cube(2))) == 0
    far = sample_level_set(0, 10, Box((10, 10, 10), (11, 11, 11)))
    assert len(far) == 0 and far.diagnostic
    with pytest.raises(ValueError):
        sample_level_set(0, -1, Box.cube(2))


def test_sampler_noncompact_level():
    s = sample_level_set(30.0, 5000, Box.cube(6), seed=1)
    assert s.kappa_residual() < 1e-8
    assert Box.cube(6).contains(s.points).all()


def test_qz_exchanges_sheets():
    s = sample_level_set(0.0, 3000, Box.cube(2), seed=2)
    x, y, z = s.points.T
    side = np.sign(2 * z - x * y)
    q = np.array([apply(Gen.QZ, Character(*p)).as_tuple() for p in s.points])
    assert np.all(np.sign(2 * q[:, 2] - q[:, 0] * q[:, 1]) == -side)


def test_torus_pushforward_on_level_two():
    pts = torus_pushforward_sample(1000, seed=0)
    assert np.abs(float_kappa(*pts.T) - 2).max() < 1e-12


@pytest.mark.parametrize(
    "m, angles, expected",
    [
        (((1, 0), (0, 1)), (F(1, 3), F(1, 4)), (F(1, 3), F(1, 4))),
        (((1, 1), (0, 1)), (F(1, 3), F(1, 4)), (F(7, 12), F(1, 4))),
        (((2, 1), (1, 1)), (F(1, 2), F(2, 3)), (F(2, 3), F(1, 6))),
    ],
)
def test_torus_action_examples(m, angles, expected):
    assert gl2z_torus_action(m, angles) == expected


def test_torus_action_rejects_non_unimodular():
    with pytest.raises(ValueError):
        gl2z_torus_action(((2, 0), (0, 1)), (0.1, 0.2))


def test_cat_map_equidistributes():
    a = np.empty((20000, 2))
    p = (math.sqrt(2) - 1, math.pi - 3)
    for i in range(len(a)):
        p = gl2z_torus_action(((2, 1), (1, 1)), p)
        a[i] = p
    uniform = make_rng(0).random((20000, 2))
    pad = lambda v: np.column_stack([v, np.zeros(len(v))])
    r = equidistribution_stat(pad(a), pad(uniform), 8, window=Box((0, 0, -1), (1, 1, 1)), coords=(0, 1))
    assert r.consistent


def test_equidistribution_basics():
    pts = make_rng(1).random((500, 3))
    r = equidistribution_stat(pts, pts, 4)
    assert r.statistic == 0 and r.consistent
    with pytest.raises(ValueError):
        equidistribution_stat(pts, pts, 1)
    with pytest.raises(ValueError):
        equidistribution_stat(pts, pts[:0], 3)


def test_equidistribution_detects_shift():
    a = make_rng(1).random((5000, 3))
    b = make_rng(2).random((5000, 3)) ** 2
    assert not equidistribution_stat(a, b, 4, window=Box((0, 0, 0), (1, 1, 1))).consistent


def test_autocorrelation_time():
    iid = make_rng(0).random((20000, 3))
    assert autocorrelation_time(iid, 3, Box((0, 0, 0), (1, 1, 1))) < 1.5
    sticky = np.repeat(iid[:2000], 10, axis=0)
    assert autocorrelation_time(sticky, 3, Box((0, 0, 0), (1, 1, 1))) > 5
