"""Registry of property checks run by ``charvar verify``.

Each check returns ``(passed, cases, detail)``.  Seeds are fixed, so a run is
reproducible; sizes are smaller than the test-suite versions to keep the CLI fast.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import stats

from . import charspace as cs
from . import dynamics as dyn
from . import hyperbolic as hyp
from . import modular as mg
from . import reduction as red
from . import render
from . import traces as tr

SUITES = ("group", "trace", "reduction", "hyperbolic", "dynamics")


@dataclass(frozen=True)
class Check:
    suite: str
    name: str
    fn: object


REGISTRY: list = []


def check(suite):
    def deco(fn):
        REGISTRY.append(Check(suite, fn.__name__, fn))
        return fn

    return deco


def rational(rng: random.Random, span=12, den=9) -> Fraction:
    return Fraction(rng.randint(-span * den, span * den), rng.randint(1, den))


def random_character(rng: random.Random, span=12, den=9) -> cs.Character:
    return cs.Character(*(rational(rng, span, den) for _ in range(3)))


def random_word(rng: random.Random, max_len=10) -> tuple:
    out = []
    for _ in range(rng.randint(1, max_len)):
        out.append((rng.choice("XY"), rng.choice((-2, -1, 1, 2))))
    return tr.free_reduce(tuple(out))


# ---------------------------------------------------------------- group / char space


@check("group")
def kappa_identities(n=300):
    rng = random.Random(1)
    for _ in range(n):
        c = random_character(rng)
        t = cs.kappa(c)
        if t != cs.kappa_via_projection(c) or cs.det3(cs.bilinear_form(c)) + 2 * (t - 2) != 0:
            return False, n, f"identity fails at {c}"
        if (cs.classify_form(c) is cs.FormType.DEGENERATE) != (t == 2):
            return False, n, f"degenerate test fails at {c}"
    return True, n, ""


_FLIPS = {mg.Gen.SIGMA1: (1, -1, -1), mg.Gen.SIGMA2: (-1, 1, -1), mg.Gen.SIGMA3: (-1, -1, 1)}


@check("group")
def component_sign_equivariance(n=200):
    rng = random.Random(2)
    pts = [random_character(rng, span=3) for _ in range(n)]
    pts += [tr.reducible_param(rational(rng, 3) or Fraction(1), rational(rng, 3) or Fraction(2)) for _ in range(n)]
    pts += [cs.Character(*p) for p in cs.S0_POINTS]
    s0 = {cs.Character(*p) for p in cs.S0_POINTS}
    for c in pts:
        lab = cs.component_of(c)
        for g, flip in _FLIPS.items():
            img = mg.apply(g, c)
            lab2 = cs.component_of(img)
            if lab.signs is None:
                # unsigned labels are fixed; S0 is preserved as a set
                ok = lab2.tag is lab.tag and (lab.tag is not cs.Tag.SINGULAR_S0 or img in s0)
            else:
                moved = (lab.tag is cs.Tag.TEICH_OCTANT) == (lab2.tag is cs.Tag.TEICH_OCTANT)
                ok = moved and lab2.signs == tuple(a * b for a, b in zip(lab.signs, flip))
            if not ok:
                return False, len(pts), f"{g.value} maps {lab} to {lab2}"
    return True, len(pts), ""


@check("group")
def kappa_invariance(n=200):
    rng = random.Random(3)
    for _ in range(n):
        c = random_character(rng)
        for g in mg.Gen:
            if cs.kappa(mg.apply(g, c)) != cs.kappa(c):
                return False, n * 15, f"{g.value} breaks kappa at {c}"
    return True, n * 15, ""


def relation_failures(chars) -> list:
    G = mg.GammaElement.from_word
    pairs = [(G([q, q]), G([])) for q in (mg.Gen.QX, mg.Gen.QY, mg.Gen.QZ, mg.Gen.SIGMA1, mg.Gen.SIGMA2, mg.Gen.SIGMA3)]
    pairs += [
        (G("P123 P123 P123"), G([])),
        (G("TauY"), G("P13 Qz")),
        (G("TauX"), G("P23 Qz")),
        (G("Nu"), G("P12 Qz")),
    ]
    bad = []
    for lhs, rhs in pairs:
        if any(mg.apply(lhs, c) != mg.apply(rhs, c) for c in chars):
            bad.append(f"{lhs.word_str()} != {rhs.word_str() or 'id'}")
    return bad


@check("group")
def relations(n=100):
    rng = random.Random(4)
    bad = relation_failures([random_character(rng) for _ in range(n)])
    return not bad, n, "; ".join(bad)


def homology_failures(pairs, seed) -> int:
    bad = 0
    for i in range(pairs):
        g = mg.random_element(random.Random(seed + 2 * i).randint(0, 12), seed + 2 * i)
        h = mg.random_element(random.Random(seed + 2 * i + 1).randint(0, 12), seed + 2 * i + 1)
        if mg.homology(mg.compose(g, h)) != mg.homology(g) * mg.homology(h):
            bad += 1
    return bad


@check("group")
def homology_multiplicative(n=200):
    bad = homology_failures(n, 10)
    return bad == 0, n, f"{bad} failures"


@check("group")
def normal_form_soundness(n=60, chars=20):
    rng = random.Random(5)
    pts = [random_character(rng, span=3, den=4) for _ in range(chars)]
    for s in range(n):
        g = mg.random_element(rng.randint(0, 12), 1000 + s)
        h = mg.from_gl2z(g.pgl, g.signs)
        if any(mg.apply(g, c) != mg.apply(h, c) for c in pts):
            return False, n, f"word {g.word_str()}"
    return True, n, ""


@check("group")
def origin_and_differential(n=200):
    origin = cs.Character(0, 0, 0)
    elements = [mg.GammaElement.generator(g) for g in mg.Gen]
    elements += [mg.random_element(8, 2000 + s) for s in range(n)]
    for g in elements:
        if mg.apply(g, origin) != origin:
            return False, len(elements), f"{g.word_str()} moves the origin"
        if mg.signed_permutation(mg.differential_at_origin(g)) != mg.s3_image(g):
            return False, len(elements), f"{g.word_str()} differential disagrees with s3_image"
    return True, len(elements), ""


@check("group")
def gamma2_membership(n=400):
    hits = 0
    for s in range(n):
        g = mg.random_element(14, 3000 + s)
        if mg.in_gamma2(g):
            hits += 1
            h = mg.gamma2_word(g.pgl, g.signs)
            if not h.same_action(g) or not set(h.word) <= set(mg.GAMMA2_GENERATORS):
                return False, n, f"no level-2 word for {g.word_str()}"
        g2 = mg.random_element(10, 4000 + s, alphabet=mg.GAMMA2_GENERATORS)
        if not mg.in_gamma2(g2):
            return False, n, f"{g2.word_str()} rejected"
    return hits > 0, n, f"{hits} level-2 elements decomposed"


# ---------------------------------------------------------------- trace calculus


def trace_oracle_error(words, chars) -> float:
    worst = 0.0
    for w in words:
        f = tr.trace_polynomial(w)
        for c in chars:
            v = f(c)
            nv = tr.numeric_trace(w, c)
            worst = max(worst, abs(complex(v) - nv) / (1 + abs(v)))
    return worst


@check("trace")
def oracle_equivalence(n=100, chars=10):
    rng = random.Random(6)
    words = [random_word(rng) for _ in range(n)]
    pts = [cs.Character(*(rng.uniform(-3, 3) for _ in range(3))) for _ in range(chars)]
    err = trace_oracle_error(words, pts)
    return err <= 1e-9, n * chars, f"worst relative error {err:.2e}"


@check("trace")
def commutator_is_kappa(n=1):
    ok = tr.trace_polynomial(tr.commutator()) == tr.KAPPA_POLY
    return ok, n, ""


@check("trace")
def inversion_cyclic_and_order(n=100):
    rng = random.Random(7)
    for _ in range(n):
        w = random_word(rng)
        f = tr.trace_polynomial(w)
        if tr.trace_polynomial(tr.FreeWord(w).inverse().letters) != f:
            return False, n, f"inversion fails for {w}"
        k = rng.randint(0, max(len(w) - 1, 0))
        if tr.trace_polynomial(w[k:] + w[:k]) != f:
            return False, n, f"rotation fails for {w}"
        if tr.trace_via_algebra(w) != f:
            return False, n, f"reduction order matters for {w}"
    return True, n, ""


@check("trace")
def root_choice_independence(n=50):
    rng = random.Random(8)
    for _ in range(n):
        w = random_word(rng)
        c = cs.Character(*(rng.uniform(-3, 3) for _ in range(3)))
        zeta = tr.zeta_root(c.z)
        a, b = tr.numeric_trace(w, c, zeta), tr.numeric_trace(w, c, 1 / zeta)
        if abs(a - b) > 1e-8 * (1 + abs(a)):
            return False, n, f"root choice changes trace of {w}"
    return True, n, ""


@check("trace")
def reducible_locus(n=200):
    rng = random.Random(9)
    for _ in range(n):
        xi, eta = rational(rng, 5) or Fraction(3), rational(rng, 5) or Fraction(-2)
        c = tr.reducible_param(xi, eta)
        if cs.kappa(c) != 2 or tr.reducible_param(1 / xi, 1 / eta) != c:
            return False, n, f"fails at {xi}, {eta}"
        if not tr.factorization_check(xi, eta, xi * eta):
            return False, n, f"factorization fails at {xi}, {eta}"
    return True, n, ""


def torus_equivariance_error(n, seed) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for g in (mg.Gen.TAUX, mg.Gen.TAUY, mg.Gen.P12):
        m = tr.torus_matrix(mg.homology(g))
        for a, b in rng.random((n, 2)):
            lhs = tr.torus_cover(dyn.gl2z_torus_action(m, (a, b)))
            rhs = mg.apply(g, tr.torus_cover((a, b)))
            worst = max(worst, max(abs(u - v) for u, v in zip(lhs, rhs)))
    return worst


@check("trace")
def torus_equivariance(n=100):
    err = torus_equivariance_error(n, 10)
    return err <= 1e-9, 3 * n, f"worst error {err:.2e}"


# ---------------------------------------------------------------- reduction


def random_admissible(rng: random.Random, hi=20):
    """Exact character in (2, hi]^3 with kappa > 2."""
    while True:
        c = cs.Character(*(Fraction(rng.randint(2 * 8 + 1, hi * 8), 8) for _ in range(3)))
        if cs.kappa(c) > 2:
            return c


@check("reduction")
def descent_and_interval(n=300):
    rng = random.Random(11)
    for _ in range(n):
        c, _ = red.sort_normalize(random_admissible(rng))
        if not red.descent_holds(c):
            return False, n, f"descent fails at {c}"
        x, y = sorted((c.x, c.y))
        zi = red.zeta_pm(x, y)
        if not (zi.lo < y < zi.hi) or not cs.kappa(cs.Character(x, y, y)) < 2:
            return False, n, f"interval sandwich fails at {x}, {y}"
    return True, n, ""


@check("reduction")
def step_bound_and_soundness(n=300):
    rng = random.Random(12)
    for _ in range(n):
        c = random_admissible(rng)
        r = red.reduce(c)
        if mg.apply(r.applied, c) != r.normal_form:
            return False, n, f"unsound at {c}"
        if not red.step_bound_holds(c, r.steps):
            return False, n, f"{r.steps} steps exceed the bound at {c}"
    return True, n, ""


def omega_points(t, n, seed):
    """Float points of the octant (-oo,-2)^3 on kappa = t."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < n:
        x, y = -2 - rng.exponential(2.0, 2)
        disc = (x * x - 4) * (y * y - 4) + 4 * (t - 2)
        if disc < 0:
            continue
        z = (x * y - math.sqrt(disc)) / 2
        if z < -2:
            out.append((x, y, z))
    return out


def gamma2_elements(max_len=4):
    seen = {}
    for n in range(1, max_len + 1):
        for word in itertools.product(mg.GAMMA2_GENERATORS, repeat=n):
            g = mg.GammaElement.from_word(word)
            if not g.is_identity():
                seen.setdefault(g.normal_form, g)
    return list(seen.values())


def omega_disjointness_failures(ts, per_t, seed) -> int:
    elements = gamma2_elements()
    bad = 0
    for t in ts:
        for p in omega_points(t, per_t, seed):
            for g in elements:
                if all(v < -2 for v in mg.apply_tuple(g.word, p)):
                    bad += 1
    return bad


@check("reduction")
def omega_disjointness(per_t=20):
    bad = omega_disjointness_failures((19.0, 25.0, 52.0), per_t, 13)
    return bad == 0, 3 * per_t, f"{bad} images stayed in the octant"


@check("reduction")
def omega_threshold(n=200):
    rng = random.Random(14)
    for _ in range(n):
        c = cs.Character(*(-2 - Fraction(rng.randint(1, 400), 40) for _ in range(3)))
        if not cs.kappa(c) > 18 or not red.in_omega(c):
            return False, n, f"octant point {c} misclassified"
        d = random_admissible(rng, hi=4)
        if cs.kappa(d) <= 18 and red.in_omega(d):
            return False, n, f"{d} with kappa <= 18 accepted"
    eps = [Fraction(1, 10**k) for k in range(1, 6)]
    values = [cs.kappa(cs.Character(*(-2 - e,) * 3)) - 18 for e in eps]
    ok = all(v > 0 for v in values) and values == sorted(values, reverse=True) and values[-1] < Fraction(1, 10**3)
    return ok, n, "infimum 18 approached at (-2,-2,-2)"


# ---------------------------------------------------------------- hyperbolic


def random_sl2(rng: np.random.Generator) -> np.ndarray:
    while True:
        m = rng.normal(size=(2, 2)) * 1.5
        d = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if d > 0.05:
            return m / math.sqrt(d)


def closed_form_error(n, seed) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        eta = random_sl2(rng)
        lam = math.exp(rng.uniform(-2, 2))
        s, th = rng.uniform(-3, 3), rng.uniform(0, 2 * math.pi)
        rot = np.array([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        cases = [
            (hyp.commutator_trace(np.diag([lam, 1 / lam]), eta), hyp.diagonal_closed_form(lam, eta)),
            (hyp.commutator_trace(np.array([[1.0, s], [0.0, 1.0]]), eta), hyp.unipotent_closed_form(s, eta)),
            (hyp.commutator_trace(rot, eta), hyp.rotation_closed_form(th, eta)),
        ]
        a, b, r = rng.uniform(-2, 2, 3)
        xi, et = hyp.crossing_pair(a, b, r)
        cases.append((hyp.commutator_trace(xi, et), hyp.crossing_closed_form(a, b, r)))
        worst = max(worst, max(abs(u - v) / (1 + abs(v)) for u, v in cases))
    return worst


def crossing_mismatches(n, seed) -> int:
    rng = np.random.default_rng(seed)
    bad = done = 0
    while done < n:
        a, b = hyp.Isometry(random_sl2(rng)), hyp.Isometry(random_sl2(rng))
        if a.kind is not hyp.IsometryClass.HYPERBOLIC or b.kind is not hyp.IsometryClass.HYPERBOLIC:
            continue
        done += 1
        bad += (hyp.commutator_trace(a, b) < 2) != hyp.axes_cross(a, b)
    return bad


def quadrilateral_report(n, seed):
    """(non-embedded count, worst side-pairing residual, smallest collinearity defect)."""
    rng = np.random.default_rng(seed)
    bad, worst, defect, done = 0, 0.0, math.inf, 0
    while done < n:
        a, b = random_sl2(rng), random_sl2(rng)
        if not -2 < hyp.commutator_trace(a, b) < 2:
            continue
        done += 1
        q = hyp.quad_vertices(a, b)
        bad += not hyp.is_embedded_quadrilateral(*q)
        worst = max(worst, hyp.side_pairing_residual(a, b, q))
        defect = min(defect, hyp.collinearity_defect(q))
    return bad, worst, defect


def random_omega0(rng: np.random.Generator, n):
    return [cs.Character(*(float(v) for v in -2 - rng.exponential(3.0, 3))) for _ in range(n)]


def pants_worst(n, seed) -> float:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for c in random_omega0(rng, n):
        h = hyp.pants_hexagon(c)
        worst = max(worst, h.max_residual)
    return worst


@check("hyperbolic")
def commutator_closed_forms(n=200):
    err = closed_form_error(n, 21)
    return err <= 1e-9, 4 * n, f"worst error {err:.2e}"


@check("hyperbolic")
def crossing_equivalence(n=200):
    bad = crossing_mismatches(n, 22)
    return bad == 0, n, f"{bad} mismatches"


@check("hyperbolic")
def embedded_quadrilaterals(n=100):
    bad, worst, defect = quadrilateral_report(n, 23)
    ok = bad == 0 and worst <= 1e-9 and defect > 1e-12
    return ok, n, f"{bad} non-embedded, pairing residual {worst:.1e}, min collinearity defect {defect:.1e}"


@check("hyperbolic")
def pants_right_angles(n=20):
    worst = pants_worst(n, 24)
    return worst <= 1e-6, n, f"worst residual {worst:.1e}"


# ---------------------------------------------------------------- dynamics and render


@check("dynamics")
def exact_orbit_kappa(n=1000):
    c = cs.Character(Fraction(1), Fraction(1), Fraction(1))
    policy = dyn.OrbitPolicy.uniform(seed=31)
    ok = all(cs.kappa(s.character) == 0 for s in dyn.orbit(c, policy, n))
    return ok, n, ""


def dehn_closure_errors(steps=10**4, seed=32):
    out = {}
    for x0, k in ((0.0, 4), (1.0, 6), (math.sqrt(2), 8)):
        e = dyn.ellipse_E(x0, 1.0)
        y, z = e.point(0.7)
        start = cs.Character(x0, float(y), float(z))
        last = list(dyn.orbit(start, dyn.OrbitPolicy.cycle("TauX"), k))[-1].character
        out[k] = max(abs(last.y - start.y), abs(last.z - start.z))
    rng = np.random.default_rng(seed)
    x0 = float(rng.uniform(-1.9, 1.9))
    e = dyn.ellipse_E(x0, 1.0)
    y, z = e.point(float(rng.uniform(0, 2 * math.pi)))
    pts = dyn.orbit_array(cs.Character(x0, float(y), float(z)), dyn.OrbitPolicy.cycle("TauX"), steps)
    out["random"] = float(np.max(np.abs(e.residual(pts[:, 1], pts[:, 2]))))
    return out


@check("dynamics")
def dehn_twist_rotation(n=10**4):
    errs = dehn_closure_errors(n)
    return max(errs.values()) <= 1e-9, 3 + n, ", ".join(f"{k}: {v:.1e}" for k, v in errs.items())


def slab_ks_pvalues(samples, t, x0s=(0.0, 0.8, -1.3), eps=0.01, twist=False):
    out = []
    for x0 in x0s:
        sel = np.abs(samples.points[:, 0] - x0) < eps
        pts = samples.points[sel]
        if twist:
            pts = np.array([mg.apply_tuple((mg.Gen.TAUX,), tuple(p)) for p in pts])
        e = dyn.ellipse_E(x0, t)
        ang = e.angle(pts[:, 1], pts[:, 2]) / (2 * math.pi)
        out.append(float(stats.kstest(ang, "uniform").pvalue))
    return out


@check("dynamics")
def disintegration_and_twist_invariance(n=10**5):
    s = dyn.sample_level_set(0.0, n, dyn.Box.cube(2.0), seed=33)
    plain = slab_ks_pvalues(s, 0.0, eps=0.05)
    twisted = slab_ks_pvalues(s, 0.0, eps=0.05, twist=True)
    ok = min(plain + twisted) > 0.001
    return ok, n, f"min KS p-value {min(plain + twisted):.3f}"


@check("dynamics")
def qz_exchanges_sheets(n=2000):
    s = dyn.sample_level_set(5.0, n, dyn.Box.cube(6.0), seed=34)
    x, y, z = s.points.T
    zq = x * y - z
    flips = np.sign(2 * z - x * y) == -np.sign(2 * zq - x * y)
    same = np.abs(cs.float_kappa(x, y, zq) - 5.0) <= 1e-9 * (1 + np.abs(x * y * zq))
    return bool(flips.all() and same.all()), n, ""


@check("dynamics")
def invariant_measure_mass(n=10**5):
    s = dyn.sample_level_set(2.0, n, dyn.Box.cube(2.0), seed=35)
    p = dyn.torus_pushforward_sample(n, seed=36)
    res = dyn.equidistribution_stat(s, p, 6)
    ok = abs(s.mass - 1) <= 0.02 and res.consistent and s.kappa_residual() <= 1e-9
    return ok, n, f"mass {s.mass:.4f}, chi2 {res.statistic:.1f} vs {res.critical_1pct:.1f}"


@check("dynamics")
def torus_action_examples(n=3):
    ok = dyn.gl2z_torus_action([[1, 1], [0, 1]], (Fraction(1, 3), Fraction(1, 4))) == (Fraction(7, 12), Fraction(1, 4))
    ok &= dyn.gl2z_torus_action([[1, 0], [0, 1]], (Fraction(2, 5), Fraction(1, 7))) == (Fraction(2, 5), Fraction(1, 7))
    rng = np.random.default_rng(37)
    ab = tuple(rng.random(2))
    pts = []
    for _ in range(20000):
        ab = dyn.gl2z_torus_action([[2, 1], [1, 1]], ab)
        pts.append(ab)
    counts, _, _ = np.histogram2d(*np.array(pts).T, bins=5, range=[[0, 1], [0, 1]])
    p = stats.chisquare(counts.ravel()).pvalue
    return ok and p > 0.001, n, f"cat-map histogram p-value {p:.3f}"


@check("dynamics")
def render_determinism_and_filter(n=2):
    canvas = render.Canvas(64, 64, (-3.0, 3.0, -3.0, 3.0))
    a = render.render_level_contour(0.5, "xy", 0.3, canvas).data
    b = render.render_level_contour(0.5, "xy", 0.3, canvas).data
    pts = np.array([[1.0, 1.0, 1.0], [1.0, 1.0, 1.5]])
    img = render.render_orbit_scatter(pts, "xy", canvas, t=0.0)
    ok = a == b and img.dropped == 1 and len(img.points) == 1
    return ok, n, ""


# ---------------------------------------------------------------- runner


def run(suite="all"):
    """Yield (check, passed, cases, detail) for the selected suite."""
    if suite != "all" and suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}")
    for c in REGISTRY:
        if suite in ("all", c.suite):
            try:
                passed, cases, detail = c.fn()
            except Exception as exc:  # a crash is a failed check, reported with its message
                passed, cases, detail = False, 0, f"{type(exc).__name__}: {exc}"
            yield c, bool(passed), cases, detail
