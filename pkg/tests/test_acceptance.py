"""Acceptance criteria 1-11, each printing one PASS/FAIL line.

Sizes and tolerances are the full ones; the module takes a few minutes.
"""

import itertools
import math
import os
import random
import subprocess
import sys
import time
from fractions import Fraction as F

import numpy as np
import pytest
from scipy import stats

import oracles
from charvar import charspace as cs
from charvar import dynamics as dyn
from charvar import hyperbolic as hyp
from charvar import modular as mg
from charvar import reduction as red
from charvar import traces as tr
from charvar import verify as vf


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {n}: {detail}")
        assert ok, detail

    return emit


def rand_char(rng, span=12, den=9):
    return cs.Character(*(F(rng.randint(-span * den, span * den), rng.randint(1, den)) for _ in range(3)))


def rand_word(rng, max_len):
    return tuple(rng.choice(mg.ALL_GENERATORS) for _ in range(rng.randint(0, max_len)))


def test_criterion_01_kappa_invariance(report):
    rng = random.Random(101)
    chars = [rand_char(rng) for _ in range(1000)]
    start = time.perf_counter()
    bad = sum(cs.kappa(mg.apply(g, c)) != cs.kappa(c) for g in mg.ALL_GENERATORS for c in chars)
    elapsed = time.perf_counter() - start
    report(1, bad == 0 and elapsed < 10, f"{len(mg.ALL_GENERATORS)} x 1000 exact checks, {bad} violations, {elapsed:.2f} s")


def _matrix_product(word):
    m = ((1, 0), (0, 1))
    for g in word:
        m = mg.matmul(m, mg.homology_of_generator(g).m)
    return mg.Gl2zClass.of(m)


def test_criterion_02_relations(report):
    rng = random.Random(102)
    E = mg.GammaElement.from_word
    identities = ["Qx Qx", "Qy Qy", "Qz Qz", "Sigma1 Sigma1", "Sigma2 Sigma2", "Sigma3 Sigma3", "P123 P123 P123"]
    equal = [("TauY", "P13 Qz"), ("TauX", "P23 Qz"), ("Nu", "P12 Qz")]
    fails = 0
    for _ in range(100):
        c = rand_char(rng)
        fails += sum(mg.apply(E(w), c) != c for w in identities)
        fails += sum(mg.apply(E(a), c) != mg.apply(E(b), c) for a, b in equal)
    hom_fails = 0
    for _ in range(500):
        u, v = rand_word(rng, 8), rand_word(rng, 8)
        g, h = E(u), E(v)
        hom_fails += mg.homology(mg.compose(g, h)) != mg.homology(g) * mg.homology(h)
        hom_fails += _matrix_product(u + v) != mg.homology(E(u + v))
        # the normal form must intertwine the polynomial action with the torus
        # action: linear part from the homology, sign changes as half-translations
        gh = mg.compose(g, h)
        a, b = rng.random(), rng.random()
        (p, q), (r, s) = tr.torus_matrix(mg.homology(gh))
        lhs = mg.apply(gh, tr.torus_cover((a, b)))
        rhs = tr.torus_cover((p * a + q * b + gh.signs[0] / 2, r * a + s * b + gh.signs[1] / 2))
        hom_fails += max(abs(x - y) for x, y in zip(lhs, rhs)) > 1e-8
    ok = fails == 0 and hom_fails == 0
    report(2, ok, f"{fails} relation failures on 100 characters, {hom_fails} homology failures on 500 pairs")


def test_criterion_03_trace_oracle(report):
    rng = random.Random(103)
    chars = [rand_char(rng, span=3, den=5) for _ in range(20)]
    worst = 0.0
    for _ in range(500):
        letters = tuple((rng.choice("XY"), rng.choice((-1, 1))) for _ in range(rng.randint(1, 10)))
        poly = tr.trace_polynomial(letters)
        for c in chars:
            exact = poly(c)
            num = tr.numeric_trace(letters, c.to_float())
            worst = max(worst, abs(num - float(exact)) / max(1.0, abs(float(exact))))
    same = tr.trace_polynomial(tr.commutator()) == tr.KAPPA_POLY
    ok = worst <= 1e-9 and same
    report(3, ok, f"500 words x 20 characters, worst relative error {worst:.2e}; f_[X,Y] == kappa: {same}")


def test_criterion_04_factorization_and_determinant(report):
    rng = random.Random(104)
    fac_bad = 0
    for _ in range(200):
        xi, eta = (F(rng.choice((-1, 1)) * rng.randint(1, 40), rng.randint(1, 40)) for _ in range(2))
        fac_bad += not tr.factorization_check(xi, eta, xi * eta)
    det_bad = 0
    for _ in range(1000):
        c = rand_char(rng)
        det_bad += cs.det3(cs.bilinear_form(c)) != -2 * (cs.kappa(c) - 2)
    sym = oracles.symbolic_factorization() == 0 and oracles.symbolic_det_identity() == 0
    ok = fac_bad == 0 and det_bad == 0 and sym
    report(4, ok, f"factorization failures {fac_bad}/200, determinant failures {det_bad}/1000, symbolic identities hold: {sym}")


def _admissible(rng):
    while True:
        c = cs.Character(*(F(rng.randint(17, 160), 8) for _ in range(3)))
        if cs.kappa(c) > 2:
            return c


def test_criterion_05_reduction(report):
    rng = random.Random(105)
    start = time.perf_counter()
    descent_bad = 0
    for _ in range(1000):
        c, _ = red.sort_normalize(_admissible(rng))
        zi = red.zeta_pm(c.x, c.y)
        descent_bad += not red.descent_holds(c)
        descent_bad += not (zi.lo < c.y < zi.hi and cs.kappa(cs.Character(c.x, c.y, c.y)) < 2)
    bound_bad = sound_bad = 0
    steps = []
    for _ in range(1000):
        c = _admissible(rng)
        r = red.reduce(c)
        steps.append(r.steps)
        bound_bad += not red.step_bound_holds(c, r.steps)
        sound_bad += mg.apply(r.applied, c) != r.normal_form
    elapsed = time.perf_counter() - start
    ok = descent_bad == bound_bad == sound_bad == 0 and elapsed < 30
    report(
        5, ok,
        f"descent/interval failures {descent_bad}, step-bound failures {bound_bad}, unsound {sound_bad} "
        f"(max steps {max(steps)}), {elapsed:.1f} s",
    )


def test_criterion_06_omega_disjointness(report):
    elements = vf.gamma2_elements(4)
    stays = 0
    for t, seed in ((19, 61), (25, 62), (52, 63)):
        for p in vf.omega_points(t, 200, seed):
            for g in elements:
                q = mg.apply_tuple(g.word, p)
                stays += all(v < -2 for v in q)
    rng = random.Random(106)
    low, wrong = 0, 0
    while low < 500:
        c = rand_char(rng, span=6, den=4)
        if not 2 < cs.kappa(c) <= 18:
            continue
        low += 1
        nf = red.reduce(c).normal_form
        wrong += red.in_omega(c) or all(v < -2 for v in nf)
    ok = stays == 0 and wrong == 0
    report(
        6, ok,
        f"{len(elements)} nontrivial level-2 elements x 600 octant points: {stays} stay; "
        f"{wrong} of {low} characters with kappa <= 18 in Omega",
    )


def test_criterion_07_hyperbolic(report):
    err = vf.closed_form_error(1000, 701)
    mism = vf.crossing_mismatches(1000, 702)
    bad, pairing, defect = vf.quadrilateral_report(500, 703)
    pants = vf.pants_worst(100, 704)
    ok = err <= 1e-9 and mism == 0 and bad == 0 and pairing <= 1e-9 and pants <= 1e-6
    report(
        7, ok,
        f"closed forms {err:.1e}, crossing mismatches {mism}/1000, non-embedded quads {bad}/500 "
        f"(pairing {pairing:.1e}), hexagon residual {pants:.1e}",
    )


def test_criterion_08_dehn_twist(report):
    errs = vf.dehn_closure_errors(10**4, seed=801)
    rng = np.random.default_rng(802)
    for x0 in rng.uniform(-1.9, 1.9, 5):
        e = dyn.ellipse_E(x0, 2.0)
        y, z = e.point(rng.uniform(0, 2 * math.pi))
        pts = dyn.orbit_array(cs.Character(float(x0), float(y), float(z)), dyn.OrbitPolicy.cycle("TauX"), 10**4)
        errs[f"x0={x0:.3f}"] = float(np.max(np.abs(e.residual(pts[:, 1], pts[:, 2]))))
    ok = max(errs.values()) <= 1e-9
    report(8, ok, "closure/drift " + ", ".join(f"{k}: {v:.1e}" for k, v in errs.items()))


def test_criterion_09_measure(report):
    start = time.perf_counter()
    ck = dyn.sample_level_set(2.0, 10**6, dyn.Box.cube(2.0), seed=901, workers=4)
    mass_ok = abs(ck.mass - 1) <= 0.02
    s0 = dyn.sample_level_set(0.0, 10**5, dyn.Box.cube(2.0), seed=902)
    pvals = vf.slab_ks_pvalues(s0, 0.0, eps=0.01)
    slab_ok = min(pvals) > 0.01
    push = dyn.torus_pushforward_sample(10**5, seed=903)
    sub = (ck.points[: 10**5], ck.weights[: 10**5])
    res = dyn.equidistribution_stat(sub, push, 6, window=dyn.Box.cube(2.0))
    elapsed = time.perf_counter() - start
    ok = mass_ok and slab_ok and res.consistent and elapsed < 300
    report(
        9, ok,
        f"C_K area {ck.mass:.4f} (n=10^6); slab KS p-values {', '.join(f'{p:.3f}' for p in pvals)}; "
        f"t=2 vs pushforward chi2 {res.statistic:.1f} < {res.critical_1pct:.1f}: {res.consistent}; {elapsed:.0f} s",
    )


def test_criterion_10_ergodicity(report):
    window = dyn.Box.cube(2.0)
    start = dyn.sample_level_set(0.0, 1, window, seed=1001).points[0]
    orb = dyn.orbit_array(cs.Character(*map(float, start)), dyn.OrbitPolicy.uniform(1002), 10**6)
    ref = dyn.sample_level_set(0.0, 10**6, window, seed=1003, workers=4)
    tau = dyn.autocorrelation_time(orb, 6, window)
    compact = dyn.equidistribution_stat(orb, ref, 6, window=window, tau=(tau, 1.0))

    big = dyn.Box.cube(10.0)
    wander = dyn.orbit_array(
        cs.Character(-3.0, -3.0, -3.0), dyn.OrbitPolicy.uniform(1004, window=big), 10**6
    )
    ref52 = dyn.sample_level_set(52.0, 10**5, big, seed=1005)
    tau52 = dyn.autocorrelation_time(wander, 6, big)
    omega = dyn.equidistribution_stat(wander, ref52, 6, window=big, tau=(tau52, 1.0))
    distinct = len(np.unique(np.round(wander, 9), axis=0))
    ok = compact.consistent and not omega.consistent
    report(
        10, ok,
        f"compact orbit chi2 {compact.statistic:.1f} vs 1% critical {compact.critical_1pct:.1f} "
        f"(tau {tau:.2f}): consistent={compact.consistent}; Omega_0 orbit chi2 {omega.statistic:.3g} vs "
        f"{omega.critical_1pct:.1f} ({distinct} distinct points): consistent={omega.consistent}",
    )


def test_criterion_11_cli_determinism(report, tmp_path):
    commands = [
        ["classify", "5/2", "10/3", "37/6"],
        ["reduce", "3", "24", "9"],
        ["orbit", "--t", "0", "--steps", "200", "--seed", "7"],
        ["orbit", "--t", "0.5", "--steps", "200", "--policy", "reduced:3", "--workers", "2", "--format", "csv"],
        ["sample", "--t", "-1", "--n", "300", "--seed", "8"],
        ["render", "--t", "2.1", "--plane", "xy", "--slice", "0.5", "--width", "64", "--height", "64"],
        ["render", "--t", "19", "--region", "--format", "ppm", "--width", "64", "--height", "64"],
        ["tracepoly", "X Y^-2 X^3 y"],
        ["verify", "--suite", "all"],
    ]
    env = dict(os.environ, CHARVAR_SEED="12345")
    differ = []
    for argv in commands:
        outs = [
            subprocess.run([sys.executable, "-m", "charvar", *argv], capture_output=True, env=env, timeout=600)
            for _ in range(2)
        ]
        if outs[0].stdout != outs[1].stdout or outs[0].returncode != 0 or outs[1].returncode != 0:
            differ.append(argv[0])
    ok = not differ
    report(11, ok, f"{len(commands)} invocations run twice, {len(commands) - len(differ)} byte-identical; differing: {differ}")
