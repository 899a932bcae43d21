"""Trace reduction for characters with kappa > 2.

Repeatedly sort the coordinates into 2 < x <= y <= z with linear moves
(permutations and double sign changes) and replace z by xy - z.  Each reflection
lowers x + y + z by more than 2 sqrt(kappa - 2), so the loop ends with either a
coordinate in [-2, 2] or all coordinates <= -2 (a pair-of-pants character).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .charspace import Character, Scalar, kappa
from .modular import Gen, GammaElement, apply, compose

MAX_STEPS = 10**6


class ReductionError(ValueError):
    pass


class Verdict(str, Enum):
    FRICKE_PANTS = "FrickePants"
    NON_HYPERBOLIC = "NonHyperbolicCoordinate"


@dataclass(frozen=True)
class ReductionResult:
    input: Character
    normal_form: Character
    applied: GammaElement
    steps: int
    verdict: Verdict
    axis: str | None = None

    def to_json(self) -> dict:
        verdict = self.verdict.value if self.axis is None else f"{self.verdict.value}({self.axis})"
        return {
            "input": self.input.to_json(),
            "normal_form": self.normal_form.to_json(),
            "word": self.applied.word_str(),
            "steps": self.steps,
            "verdict": verdict,
        }


@dataclass(frozen=True)
class ZetaInterval:
    lo: Scalar
    hi: Scalar


def _exact_sqrt(q: Fraction):
    """Square root of a non-negative rational if it is rational, else None."""
    n, d = q.numerator, q.denominator
    rn, rd = math.isqrt(n), math.isqrt(d)
    if rn * rn == n and rd * rd == d:
        return Fraction(rn, rd)
    return None


def zeta_pm(x, y) -> ZetaInterval:
    """Roots of z -> kappa(x, y, z) - 2: (xy -+ sqrt((x^2-4)(y^2-4))) / 2.

    Exact inputs give exact roots when the discriminant is a rational square and
    float roots otherwise.
    """
    if x <= 2 or y <= 2:
        raise ValueError("zeta_pm needs x > 2 and y > 2")
    disc = (x * x - 4) * (y * y - 4)
    if isinstance(disc, Fraction):
        root = _exact_sqrt(disc)
        if root is not None:
            return ZetaInterval((x * y - root) / 2, (x * y + root) / 2)
        x, y, disc = float(x), float(y), float(disc)
    root = math.sqrt(disc)
    return ZetaInterval((x * y - root) / 2, (x * y + root) / 2)


def qz_step(c: Character) -> Character:
    return Character(c.x, c.y, c.x * c.y - c.z)


# permutation generators, and the identity, keyed by where each output coordinate comes from
_PERMS = {
    (0, 1, 2): None,
    (1, 0, 2): Gen.P12,
    (2, 1, 0): Gen.P13,
    (0, 2, 1): Gen.P23,
    (2, 0, 1): Gen.P123,
    (1, 2, 0): Gen.P132,
}
# sign change flipping the two listed coordinates
_FLIP = {(0, 1): Gen.SIGMA3, (0, 2): Gen.SIGMA2, (1, 2): Gen.SIGMA1}


def _permute(c: Character, descending=False):
    """Stable sort of the coordinates, returned with the permutation generator used."""
    vals = c.as_tuple()
    order = tuple(sorted(range(3), key=lambda i: -vals[i] if descending else vals[i]))
    gen = _PERMS[order]
    return Character(*(vals[i] for i in order)), gen


def _flip_pair(c: Character, pair):
    g = _FLIP[pair]
    return apply(g, c), g


def sort_normalize(c: Character):
    """Equivalent character with 2 < x <= y <= z, and the linear element used."""
    if any(abs(v) <= 2 for v in c):
        raise ReductionError(f"{c} has a coordinate in [-2, 2]; no linear move gives (2, oo)^3")
    if c.x * c.y * c.z < 0:
        raise ReductionError(f"{c} has an odd number of negative coordinates")
    element = GammaElement.identity()
    negatives = tuple(i for i, v in enumerate(c) if v < 0)
    if negatives:
        c, g = _flip_pair(c, negatives)
        element = compose(GammaElement.generator(g), element)
    c, g = _permute(c)
    if g is not None:
        element = compose(GammaElement.generator(g), element)
    return c, element


def _axis_in_box(c: Character):
    for name, v in zip("xyz", c):
        if -2 <= v <= 2:
            return name
    return None


def reduce(c: Character, max_steps: int = MAX_STEPS) -> ReductionResult:
    """Normal form of a kappa > 2 character under Gamma."""
    if kappa(c) <= 2:
        raise ReductionError("reduction needs kappa > 2")
    start = c
    element = GammaElement.identity()
    steps = 0

    def push(g):
        nonlocal element
        if g is not None:
            element = compose(GammaElement.generator(g), element)

    while True:
        if all(v <= -2 for v in c):
            return ReductionResult(start, c, element, steps, Verdict.FRICKE_PANTS)
        axis = _axis_in_box(c)
        if axis is not None:
            return ReductionResult(start, c, element, steps, Verdict.NON_HYPERBOLIC, axis)
        if c.x * c.y * c.z < 0:
            positives = tuple(i for i, v in enumerate(c) if v > 0)
            c, g = _flip_pair(c, positives)
            push(g)
            continue
        if steps >= max_steps:
            raise ReductionError(f"no normal form after {max_steps} reflections (kappa - 2 ~ {float(kappa(c)) - 2:.3g})")
        c, lin = sort_normalize(c)
        element = compose(lin, element)
        c = qz_step(c)
        push(Gen.QZ)
        steps += 1
        if c.z <= 2:
            c, g = _flip_pair(c, (0, 1))
            push(g)
            c, g = _permute(c, descending=True)
            push(g)


def in_omega(c: Character) -> bool:
    """Whether c lies in the Gamma-orbit of the open octant (-oo, -2)^3."""
    t = kappa(c)
    if t <= 2:
        raise ReductionError("membership in Omega is decided by reduction, which needs kappa > 2")
    if t <= 18:
        return False
    result = reduce(c)
    return result.verdict is Verdict.FRICKE_PANTS and all(v < -2 for v in result.normal_form)


def step_bound_holds(c: Character, steps: int) -> bool:
    """Exact check of steps <= ceil((x + y + z - 6) / (2 sqrt(kappa - 2))) for c in (2, oo)^3."""
    s = c.x + c.y + c.z - 6
    if steps == 0:
        return True
    if s <= 0:
        return False
    # steps <= ceil(B)  <=>  steps - 1 < B  <=>  4 (steps-1)^2 (kappa-2) < s^2
    return 4 * (steps - 1) ** 2 * (kappa(c) - 2) < s * s


def descent_holds(c: Character) -> bool:
    """z - z' > 2 sqrt(kappa - 2) for sorted 2 < x <= y <= z, compared exactly via squares."""
    gap = c.z - (c.x * c.y - c.z)
    return gap > 0 and gap * gap > 4 * (kappa(c) - 2)
