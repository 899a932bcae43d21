"""Orbits of Gamma, invariant-measure sampling on level sets, and equidistribution tests.

Sampling coordinates
--------------------
On kappa^{-1}(t) the invariant area form, normalised so that the reducible
component at t = 2 has area 1, is ``dx dy / (2 pi^2 |2z - xy|)`` on each sheet
over the (x, y) plane.  Write ``a = x^2 - 4`` and ``c = t + 2 - x^2``; then
``(2z - xy)^2 = a y^2 + 4c``.  With

* ``x = 2 sin s`` for |x| < 2 and ``x = +-2 cosh s`` for |x| > 2, and
* ``y = 2 sqrt(c/|a|) sin u`` (ellipse), ``y = 2 sqrt(c/a) sinh u`` (a, c > 0) or
  ``y = +-2 sqrt(|c|/a) cosh u`` (a > 0 > c),

the measure becomes ``ds du / (2 pi^2)``.  The sampler draws s uniformly, accepts
with probability ``min(1, L(s)/L_cap)`` where ``L(s)`` is the length of the
admissible u-set, and corrects with weights, so it is exact even where
``L(s)`` has its logarithmic peaks at ``c = 0``.
"""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy import stats

from .charspace import EPS, Character, float_kappa, kappa
from .modular import Gen, GammaElement, apply_tuple, compose

TWO_PI_SQ = 2 * math.pi**2

# involutions plus the 3-cycle pair: closed under inverses, so the uniform walk
# over this set is reversible for every Gamma-invariant measure
SYMMETRIC_GENERATORS = (
    Gen.SIGMA1, Gen.SIGMA2, Gen.SIGMA3,
    Gen.P12, Gen.P13, Gen.P23, Gen.P123, Gen.P132,
    Gen.QX, Gen.QY, Gen.QZ, Gen.NU,
)


def make_rng(seed: int, worker: int = 0) -> np.random.Generator:
    """Counter-based stream for one worker; streams are seed + worker."""
    return np.random.Generator(np.random.Philox(int(seed) + int(worker)))


# ---------------------------------------------------------------- windows


@dataclass(frozen=True)
class Box:
    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        if len(lo) != 3 or len(hi) != 3:
            raise ValueError("a box needs three lower and three upper bounds")
        if not all(math.isfinite(v) for v in lo + hi):
            raise ValueError("window must be bounded")
        if not all(a < b for a, b in zip(lo, hi)):
            raise ValueError(f"degenerate window {lo} .. {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def cube(cls, r: float) -> "Box":
        return cls((-r, -r, -r), (r, r, r))

    @classmethod
    def parse(cls, text: str) -> "Box":
        """``"r"`` for the cube [-r, r]^3 or six comma-separated bounds x0,x1,y0,y1,z0,z1."""
        parts = [float(Fraction(p)) for p in text.replace(" ", "").split(",")]
        if len(parts) == 1:
            return cls.cube(parts[0])
        if len(parts) != 6:
            raise ValueError("window needs 1 or 6 numbers")
        return cls(tuple(parts[0::2]), tuple(parts[1::2]))

    def contains(self, pts) -> np.ndarray:
        pts = np.atleast_2d(np.asarray(pts, dtype=float))
        return np.all((pts >= np.array(self.lo)) & (pts <= np.array(self.hi)), axis=1)


# ---------------------------------------------------------------- orbits


@dataclass(frozen=True)
class OrbitPolicy:
    """How the next group element is chosen at each orbit step.

    kind ``cycle`` applies ``word`` at every step; ``uniform`` applies one
    generator drawn from ``alphabet``; ``reduced`` applies a fresh random word of
    ``length`` letters with no letter undoing the previous one.  A ``window``
    makes the walk reject (and repeat the current point for) moves leaving it.
    """

    kind: str = "uniform"
    seed: int = 0
    word: tuple = ()
    length: int = 4
    alphabet: tuple = SYMMETRIC_GENERATORS
    window: Box | None = None

    def __post_init__(self):
        if self.kind not in ("cycle", "uniform", "reduced"):
            raise ValueError(f"unknown orbit policy {self.kind!r}")
        if self.kind == "cycle" and not self.word:
            raise ValueError("cycle policy needs a word")
        if self.kind == "reduced" and self.length < 1:
            raise ValueError("reduced policy needs length >= 1")

    @classmethod
    def cycle(cls, word, **kw) -> "OrbitPolicy":
        if isinstance(word, str):
            word = GammaElement.from_word(word).word
        return cls(kind="cycle", word=tuple(Gen(g) for g in word), **kw)

    @classmethod
    def uniform(cls, seed=0, **kw) -> "OrbitPolicy":
        return cls(kind="uniform", seed=seed, **kw)

    @classmethod
    def reduced(cls, length, seed=0, **kw) -> "OrbitPolicy":
        return cls(kind="reduced", length=length, seed=seed, **kw)


@dataclass(frozen=True)
class OrbitStep:
    step: int
    character: Character
    word: tuple

    def record(self) -> dict:
        c = self.character
        return {
            "step": self.step,
            "x": _num(c.x),
            "y": _num(c.y),
            "z": _num(c.z),
            "kappa": _num(kappa(c)),
            "word": " ".join(g.value for g in self.word),
        }


def _num(v):
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return float(v)


def _cancels(prev: Gen, nxt: Gen) -> bool:
    return compose(GammaElement.generator(nxt), GammaElement.generator(prev)).is_identity()


def _words(policy: OrbitPolicy, n: int):
    if policy.kind == "cycle":
        for _ in range(n):
            yield policy.word
        return
    rng = make_rng(policy.seed)
    alphabet = tuple(Gen(g) for g in policy.alphabet)
    k = len(alphabet)
    if policy.kind == "uniform":
        done = 0
        while done < n:
            batch = rng.integers(0, k, size=min(65536, n - done))
            for i in batch:
                yield (alphabet[i],)
            done += len(batch)
        return
    prev = None
    for _ in range(n):
        word = []
        while len(word) < policy.length:
            g = alphabet[int(rng.integers(0, k))]
            if prev is not None and _cancels(prev, g):
                continue
            word.append(g)
            prev = g
        # words act right to left; reversing makes the letters act in drawing order
        yield tuple(reversed(word))


def orbit(c: Character, policy: OrbitPolicy, n: int):
    """Yield the n successive images of ``c`` as :class:`OrbitStep` records.

    Float orbits stop early, with a warning, if a coordinate overflows.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    lo = hi = None
    if policy.window is not None:
        lo, hi = policy.window.lo, policy.window.hi
    cur = c.as_tuple()
    exact = c.is_exact
    for i, word in enumerate(_words(policy, n), start=1):
        nxt = apply_tuple(word, cur)
        if lo is not None and not all(a <= v <= b for v, a, b in zip(nxt, lo, hi)):
            word = ()
        else:
            cur = nxt
        if not exact and not all(math.isfinite(v) for v in cur):
            warnings.warn(f"orbit left the floating-point range at step {i}; stopping", RuntimeWarning)
            return
        yield OrbitStep(i, Character(*cur), word)


def orbit_array(c: Character, policy: OrbitPolicy, n: int) -> np.ndarray:
    """Float orbit as an (m, 3) array, m <= n (fast path without Character objects)."""
    c = c.to_float()
    out = np.empty((n, 3))
    lo = hi = None
    if policy.window is not None:
        lo, hi = policy.window.lo, policy.window.hi
    cur = c.as_tuple()
    m = 0
    for word in _words(policy, n):
        nxt = apply_tuple(word, cur)
        if lo is None or all(a <= v <= b for v, a, b in zip(nxt, lo, hi)):
            cur = nxt
        if not all(math.isfinite(v) for v in cur):
            warnings.warn(f"orbit left the floating-point range at step {m + 1}; stopping", RuntimeWarning)
            break
        out[m] = cur
        m += 1
    return out[:m]


# ---------------------------------------------------------------- ellipses and twists


@dataclass(frozen=True)
class Ellipse:
    """Fibre {x = x0} of kappa^{-1}(t): cp (y+z)^2 + cm (y-z)^2 = rhs."""

    x0: float
    t: float
    coef_plus: float
    coef_minus: float
    rhs: float
    degenerate: bool

    @property
    def semi_axes(self) -> tuple:
        """Half-lengths along the (y+z) and (y-z) directions."""
        a = math.inf if self.coef_plus == 0 else math.sqrt(self.rhs / self.coef_plus)
        return (a, math.sqrt(self.rhs / self.coef_minus))

    def point(self, u):
        """(y, z) at angle u: y+z = A cos u, y-z = B sin u."""
        a, b = self.semi_axes
        p, m = a * np.cos(u), b * np.sin(u)
        return (p + m) / 2, (p - m) / 2

    def angle(self, y, z):
        """Angle parameter in which tau_X acts as a rotation (inverse of ``point``)."""
        y, z = np.asarray(y, dtype=float), np.asarray(z, dtype=float)
        return np.mod(np.arctan2(math.sqrt(self.coef_minus) * (y - z), math.sqrt(self.coef_plus) * (y + z)), 2 * math.pi)

    def residual(self, y, z):
        return self.coef_plus * (y + z) ** 2 + self.coef_minus * (y - z) ** 2 - self.rhs


def ellipse_E(x0, t) -> Ellipse:
    x0, t = float(x0), float(t)
    if not -2 < x0 < 2:
        raise ValueError("ellipse needs -2 < x0 < 2")
    rhs = t + 2 - x0 * x0
    if rhs <= 0:
        raise ValueError(f"empty fibre: t + 2 - x0^2 = {rhs} <= 0")
    cp, cm = (2 - x0) / 4, (2 + x0) / 4
    return Ellipse(x0, t, cp, cm, rhs, degenerate=min(cp, cm) <= EPS)


def dehn_rotation_angle(x0) -> float:
    x0 = float(x0)
    if not -2 < x0 < 2:
        raise ValueError("rotation angle needs -2 < x0 < 2")
    return math.acos(x0 / 2)


def twist_matrix(x0) -> np.ndarray:
    """Linear map of tau_X on the (y, z) plane over x = x0."""
    return np.array([[float(x0), -1.0], [1.0, 0.0]])


# ---------------------------------------------------------------- level-set sampling


@dataclass(frozen=True)
class LevelSample:
    character: Character
    weight: float


@dataclass
class LevelSamples:
    t: float
    points: np.ndarray
    weights: np.ndarray
    proposals: int
    diagnostic: str = ""

    def __len__(self):
        return len(self.weights)

    def __iter__(self):
        for p, w in zip(self.points, self.weights):
            yield LevelSample(Character(*(float(v) for v in p)), float(w))

    @property
    def mass(self) -> float:
        """Estimated invariant measure of the level set inside the window."""
        return float(self.weights.sum())

    def kappa_residual(self) -> float:
        if not len(self):
            return 0.0
        x, y, z = self.points.T
        return float(np.max(np.abs(float_kappa(x, y, z) - self.t)))


@dataclass(frozen=True)
class _Piece:
    kind: int  # 0: |x| < 2, +1: x > 2, -1: x < -2
    s0: float
    s1: float


def _x_pieces(x0, x1):
    pieces = []
    lo, hi = max(x0, -2.0), min(x1, 2.0)
    if lo < hi:
        pieces.append(_Piece(0, math.asin(lo / 2), math.asin(hi / 2)))
    lo, hi = max(x0, 2.0), x1
    if lo < hi:
        pieces.append(_Piece(1, math.acosh(lo / 2), math.acosh(hi / 2)))
    lo, hi = max(-x1, 2.0), -x0
    if lo < hi:
        pieces.append(_Piece(-1, math.acosh(lo / 2), math.acosh(hi / 2)))
    return pieces


def _x_of(kind, s):
    if kind == 0:
        return 2 * np.sin(s)
    return kind * 2 * np.cosh(s)


def _fibre_slots(x, t, y0, y1):
    """Up to four admissible u-intervals over each x, as (lo, hi) arrays of shape (4, m)."""
    m = len(x)
    lo = np.zeros((4, m))
    hi = np.zeros((4, m))
    a = x * x - 4
    c = t + 2 - x * x
    ell = (a < 0) & (c > 0)
    pos = (a > 0) & (c > 0)
    neg = (a > 0) & (c < 0)
    with np.errstate(divide="ignore", invalid="ignore"):
        r_ell = 2 * np.sqrt(np.where(ell, c / np.where(ell, -a, 1), 1))
        p = np.clip(y0 / r_ell, -1, 1)
        q = np.clip(y1 / r_ell, -1, 1)
        lo[0] = np.where(ell, np.arcsin(p), 0)
        hi[0] = np.where(ell, np.arcsin(q), 0)
        lo[1] = np.where(ell, math.pi - np.arcsin(q), 0)
        hi[1] = np.where(ell, math.pi - np.arcsin(p), 0)

        r_pos = 2 * np.sqrt(np.where(pos, c / np.where(pos, a, 1), 1))
        for k in (0, 1):
            lo[k] = np.where(pos, np.arcsinh(y0 / r_pos), lo[k])
            hi[k] = np.where(pos, np.arcsinh(y1 / r_pos), hi[k])

        r_neg = 2 * np.sqrt(np.where(neg, -c / np.where(neg, a, 1), 1))
        for sign, k in ((1, 0), (-1, 2)):
            # y = sign * r cosh u in [y0, y1]  <=>  cosh u in [b0, b1]
            b0, b1 = (y0 / r_neg, y1 / r_neg) if sign > 0 else (-y1 / r_neg, -y0 / r_neg)
            ok = neg & (b1 > 1)
            v0 = np.arccosh(np.maximum(b0, 1))
            v1 = np.arccosh(np.maximum(b1, 1))
            lo[k] = np.where(ok, v0, lo[k])
            hi[k] = np.where(ok, v1, hi[k])
            lo[k + 1] = np.where(ok, -v1, lo[k + 1])
            hi[k + 1] = np.where(ok, -v0, hi[k + 1])
    hi = np.maximum(hi, lo)
    case = np.where(ell, 0, np.where(pos, 1, np.where(neg, 2, -1)))
    return lo, hi, case


def _fibre_point(x, t, case, slot, u):
    a = x * x - 4
    c = t + 2 - x * x
    rc = np.sqrt(np.abs(c))
    ra = np.sqrt(np.abs(a))
    y = np.empty_like(x)
    d = np.empty_like(x)  # 2z - xy
    e = case == 0
    y[e] = 2 * rc[e] / ra[e] * np.sin(u[e])
    d[e] = 2 * rc[e] * np.cos(u[e])
    p = case == 1
    sheet = np.where(slot == 0, 1.0, -1.0)
    y[p] = 2 * rc[p] / ra[p] * np.sinh(u[p])
    d[p] = sheet[p] * 2 * rc[p] * np.cosh(u[p])
    n = case == 2
    branch = np.where(slot < 2, 1.0, -1.0)
    y[n] = branch[n] * 2 * rc[n] / ra[n] * np.cosh(u[n])
    d[n] = 2 * rc[n] * np.sinh(u[n])
    z = (x * y + d) / 2
    # one Newton step on z removes the cancellation error in kappa
    with np.errstate(divide="ignore", invalid="ignore"):
        f = float_kappa(x, y, z) - t
        g = 2 * z - x * y
        z = np.where(np.abs(g) > 1e-8, z - f / g, z)
    return y, z


@dataclass(frozen=True)
class SamplerPlan:
    t: float
    window: Box
    pieces: tuple
    s_total: float
    l_cap: float


GRID = 4097
CAP_FACTOR = 1.25


def plan_sampler(t: float, window: Box) -> SamplerPlan:
    pieces = tuple(_x_pieces(window.lo[0], window.hi[0]))
    s_total = sum(p.s1 - p.s0 for p in pieces)
    l_max = 0.0
    for p in pieces:
        s = np.linspace(p.s0, p.s1, GRID)
        lo, hi, _ = _fibre_slots(_x_of(p.kind, s), t, window.lo[1], window.hi[1])
        l_max = max(l_max, float((hi - lo).sum(axis=0).max()))
    return SamplerPlan(float(t), window, pieces, s_total, CAP_FACTOR * l_max)


def _sample_worker(plan: SamplerPlan, n: int, seed: int, worker: int, max_proposals: int):
    rng = make_rng(seed, worker)
    t, win = plan.t, plan.window
    edges = np.cumsum([0.0] + [p.s1 - p.s0 for p in plan.pieces])
    pts, factors = [], []
    got = proposals = 0
    batch = max(1024, min(1 << 18, 2 * n))
    while got < n and proposals < max_proposals:
        r = rng.random((3, batch))
        proposals += batch
        v = r[0] * plan.s_total
        idx = np.clip(np.searchsorted(edges, v, side="right") - 1, 0, len(plan.pieces) - 1)
        x = np.empty(batch)
        for k, p in enumerate(plan.pieces):
            sel = idx == k
            x[sel] = _x_of(p.kind, p.s0 + (v[sel] - edges[k]))
        lo, hi, case = _fibre_slots(x, t, win.lo[1], win.hi[1])
        lengths = hi - lo
        total = lengths.sum(axis=0)
        keep = (total > 0) & (r[1] * plan.l_cap < total)
        # choose a slot in proportion to its length, then u uniformly inside it
        w = r[2] * total
        cum = np.cumsum(lengths, axis=0)
        slot = np.minimum((w[None, :] >= cum).sum(axis=0), 3)
        cols = np.arange(batch)
        prev = np.where(slot > 0, cum[np.maximum(slot - 1, 0), cols], 0.0)
        u = lo[slot, cols] + (w - prev)
        x, u, slot, case, total = x[keep], u[keep], slot[keep], case[keep], total[keep]
        y, z = _fibre_point(x, t, case, slot, u)
        inside = (z >= win.lo[2]) & (z <= win.hi[2]) & (y >= win.lo[1]) & (y <= win.hi[1])
        block = np.column_stack([x, y, z])[inside]
        fac = np.maximum(1.0, total[inside] / plan.l_cap)
        room = n - got
        if len(block) > room:
            # truncate to exactly n and count only the proposals that were used
            last = np.flatnonzero(keep)[np.flatnonzero(inside)[room - 1]]
            proposals -= batch - (last + 1)
            block, fac = block[:room], fac[:room]
        pts.append(block)
        factors.append(fac)
        got += len(block)
    pts = np.concatenate(pts) if pts else np.empty((0, 3))
    factors = np.concatenate(factors) if factors else np.empty(0)
    return pts, factors, proposals


def sample_level_set(t, n: int, window: Box, seed: int = 0, workers: int = 1, max_proposals: int | None = None) -> LevelSamples:
    """Weighted samples of the invariant measure on kappa^{-1}(t) inside ``window``.

    ``sum(weights)`` estimates the measure of the level set in the window (area of
    the reducible component at t = 2 is 1).
    """
    t = float(t)
    if n < 0:
        raise ValueError("n must be non-negative")
    if not isinstance(window, Box):
        window = Box(*window)
    if n == 0:
        return LevelSamples(t, np.empty((0, 3)), np.empty(0), 0)
    plan = plan_sampler(t, window)
    if plan.s_total <= 0 or plan.l_cap <= 0:
        return LevelSamples(t, np.empty((0, 3)), np.empty(0), 0, "window misses the projection of the level set")
    if max_proposals is None:
        max_proposals = 1000 * n + 10**6
    workers = max(1, int(workers))
    counts = [n // workers + (i < n % workers) for i in range(workers)]
    jobs = [(plan, counts[i], seed, i, max_proposals // workers + 1) for i in range(workers)]
    if workers == 1:
        results = [_sample_worker(*jobs[0])]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, os.cpu_count() or 1)) as ex:
            results = list(ex.map(_sample_worker, *zip(*jobs)))
    pts = np.concatenate([r[0] for r in results])
    factors = np.concatenate([r[1] for r in results])
    proposals = sum(r[2] for r in results)
    weights = plan.s_total * plan.l_cap * factors / (proposals * TWO_PI_SQ)
    diagnostic = ""
    if len(pts) < n:
        diagnostic = f"only {len(pts)} of {n} samples after {proposals} proposals; the window barely meets the level set"
    return LevelSamples(t, pts, weights, proposals, diagnostic)


# ---------------------------------------------------------------- oracles


def compact_mass(t) -> float:
    """Invariant measure of the compact component of kappa^{-1}(t), -2 <= t <= 2."""
    if not -2 <= t <= 2:
        raise ValueError("compact component exists for -2 <= t <= 2")
    return (2 / math.pi) * math.asin(math.sqrt(t + 2) / 2)


def compact_x_cdf(t, x):
    """CDF of the x-coordinate under the normalised invariant measure on the compact component."""
    alpha = math.asin(math.sqrt(t + 2) / 2)
    xc = np.clip(np.asarray(x, dtype=float), -2 * math.sin(alpha), 2 * math.sin(alpha))
    return (np.arcsin(xc / 2) + alpha) / (2 * alpha)


def torus_pushforward_sample(n: int, seed: int = 0) -> np.ndarray:
    """Lebesgue-uniform angles on the torus pushed to the reducible component at t = 2."""
    r = make_rng(seed).random((2, n))
    a, b = 2 * math.pi * r
    return np.column_stack([2 * np.cos(a), 2 * np.cos(b), 2 * np.cos(a + b)])


def gl2z_torus_action(m, angles):
    """(a, b) -> m (a, b)^T mod 1; exact for Fraction angles."""
    (p, q), (r, s) = ((int(v) for v in row) for row in (m.m if hasattr(m, "m") else m))
    if abs(p * s - q * r) != 1:
        raise ValueError(f"matrix {m} is not unimodular")
    a, b = angles
    return ((p * a + q * b) % 1, (r * a + s * b) % 1)


# ---------------------------------------------------------------- statistics


@dataclass(frozen=True)
class EquidistributionResult:
    statistic: float
    dof: int
    p_value: float
    critical_1pct: float
    cells: int
    n_eff: tuple = field(default=(0.0, 0.0))

    @property
    def consistent(self) -> bool:
        """Consistent with equidistribution at the 1% level (not a proof of it)."""
        return self.statistic <= self.critical_1pct


def _as_weighted(samples):
    if isinstance(samples, LevelSamples):
        return samples.points, samples.weights
    if isinstance(samples, tuple) and len(samples) == 2:
        pts, w = samples
        return np.asarray(pts, dtype=float), np.asarray(w, dtype=float)
    pts = np.asarray(samples, dtype=float)
    return pts, np.ones(len(pts))


def equidistribution_stat(
    samples_a, samples_b, bins: int, window: Box | None = None, coords=(0, 1, 2), tau=(1.0, 1.0)
) -> EquidistributionResult:
    """Two-sample chi-square between binned weighted histograms.

    Samples are arrays of points, ``(points, weights)`` pairs or
    :class:`LevelSamples`.  Per-cell variances use the Kish effective sample size
    of each set, divided by ``tau`` (an autocorrelation time, see
    :func:`autocorrelation_time`; 1 for independent samples).  Points outside
    ``window`` (default: joint bounding box) are dropped.
    """
    if bins < 2:
        raise ValueError("need at least 2 bins")
    pa, wa = _as_weighted(samples_a)
    pb, wb = _as_weighted(samples_b)
    if not len(pa) or not len(pb):
        raise ValueError("both sample sets must be nonempty")
    coords = list(coords)
    if window is None:
        both = np.vstack([pa, pb])
        lo, hi = both.min(axis=0), both.max(axis=0)
        hi = np.where(hi > lo, hi, lo + 1)
    else:
        lo, hi = np.array(window.lo), np.array(window.hi)
    edges = [np.linspace(lo[k], hi[k], bins + 1) for k in coords]

    def hist(p, w):
        inside = np.all((p >= lo) & (p <= hi), axis=1)
        h, _ = np.histogramdd(p[inside][:, coords], bins=edges, weights=w[inside])
        w_in = w[inside]
        neff = w_in.sum() ** 2 / (w_in**2).sum() if len(w_in) else 0.0
        return h.ravel(), neff

    ha, na = hist(pa, wa)
    hb, nb = hist(pb, wb)
    na, nb = na / max(tau[0], 1.0), nb / max(tau[1], 1.0)
    if na == 0 or nb == 0:
        raise ValueError("a sample set has no points inside the window")
    fa, fb = ha / ha.sum(), hb / hb.sum()
    pooled = (na * fa + nb * fb) / (na + nb)
    live = pooled > 0
    stat = float(np.sum((fa[live] - fb[live]) ** 2 / (pooled[live] * (1 / na + 1 / nb))))
    dof = max(int(live.sum()) - 1, 1)
    return EquidistributionResult(
        statistic=stat,
        dof=dof,
        p_value=float(stats.chi2.sf(stat, dof)),
        critical_1pct=float(stats.chi2.isf(0.01, dof)),
        cells=int(live.sum()),
        n_eff=(float(na), float(nb)),
    )


def autocorrelation_time(points, bins: int, window: Box, coords=(0, 1, 2), batches: int = 200) -> float:
    """Batch-means estimate of the integrated autocorrelation time of cell indicators.

    Ratio of the batch variance of the cell frequencies to their iid variance,
    pooled over cells.  Close to 1 for independent draws.
    """
    pts = np.asarray(points, dtype=float)
    lo, hi = np.array(window.lo), np.array(window.hi)
    pts = pts[np.all((pts >= lo) & (pts <= hi), axis=1)][:, list(coords)]
    m = len(pts) // batches
    if m < 2:
        raise ValueError("too few points for batch means")
    lo, hi = lo[list(coords)], hi[list(coords)]
    idx = np.clip(((pts - lo) / (hi - lo) * bins).astype(int), 0, bins - 1)
    cell = np.ravel_multi_index(idx.T, (bins,) * len(coords))
    ncell = bins ** len(coords)
    freq = np.stack([np.bincount(cell[b * m:(b + 1) * m], minlength=ncell) / m for b in range(batches)])
    p = freq.mean(axis=0)
    iid = (p * (1 - p)).sum()
    return max(1.0, float(freq.var(axis=0, ddof=1).sum() * m / iid)) if iid > 0 else 1.0
