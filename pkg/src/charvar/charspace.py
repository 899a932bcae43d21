"""Character points (x, y, z), the Markoff-type invariant kappa, and component labels.

A character is stored in one of two arithmetic modes: ``exact`` (coordinates are
:class:`fractions.Fraction`) or ``float``.  Python ints are mode neutral and are
promoted to whatever the other coordinates use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from numbers import Rational
from typing import Union

import numpy as np

Scalar = Union[Fraction, float]

EPS = 1e-9

EXACT = "exact"
FLOAT = "float"


class ModeError(TypeError):
    """Raised when exact and float scalars are mixed in one computation."""


def to_scalar(value, mode: str) -> Scalar:
    """Coerce ``value`` (number or string such as ``"3/4"``) into ``mode``."""
    if isinstance(value, str):
        value = value.strip()
        if mode == EXACT:
            return Fraction(value)
        if "/" in value:
            return float(Fraction(value))
        return float(value)
    if mode == EXACT:
        if isinstance(value, (float, np.floating)):
            raise ModeError(f"float {value!r} given in exact mode")
        return Fraction(value)
    return float(value)


def _infer_mode(values) -> str:
    has_float = any(isinstance(v, (float, np.floating)) for v in values)
    has_exact = any(isinstance(v, Fraction) for v in values)
    if has_float and has_exact:
        raise ModeError("cannot mix exact rationals and floats in one character")
    return FLOAT if has_float else EXACT


@dataclass(frozen=True)
class Character:
    """Traces (tr X, tr Y, tr XY) of a representation of the free group <X, Y>."""

    x: Scalar
    y: Scalar
    z: Scalar

    def __post_init__(self):
        values = (self.x, self.y, self.z)
        for v in values:
            if not isinstance(v, (Rational, float, np.floating)):
                raise TypeError(f"unsupported coordinate type {type(v).__name__}")
        mode = _infer_mode(values)
        for name, v in zip("xyz", values):
            object.__setattr__(self, name, to_scalar(v, mode))

    @classmethod
    def of(cls, x, y, z, mode: str = EXACT) -> "Character":
        """Build a character from numbers or strings in an explicit mode."""
        if mode not in (EXACT, FLOAT):
            raise ValueError(f"unknown mode {mode!r}")
        return cls(to_scalar(x, mode), to_scalar(y, mode), to_scalar(z, mode))

    @property
    def mode(self) -> str:
        return EXACT if isinstance(self.x, Fraction) else FLOAT

    @property
    def is_exact(self) -> bool:
        return self.mode == EXACT

    def as_tuple(self) -> tuple:
        return (self.x, self.y, self.z)

    def to_float(self) -> "Character":
        return Character(float(self.x), float(self.y), float(self.z))

    def __iter__(self):
        return iter((self.x, self.y, self.z))

    def to_json(self) -> dict:
        return {
            "x": format_scalar(self.x),
            "y": format_scalar(self.y),
            "z": format_scalar(self.z),
            "mode": self.mode,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Character":
        mode = data.get("mode", EXACT)
        return cls.of(data["x"], data["y"], data["z"], mode=mode)

    def __str__(self):
        return f"({format_scalar(self.x)}, {format_scalar(self.y)}, {format_scalar(self.z)})"


def format_scalar(v: Scalar) -> str:
    if isinstance(v, Fraction):
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return repr(float(v))


def kappa(c: Character) -> Scalar:
    """Trace of the commutator: x^2 + y^2 + z^2 - xyz - 2."""
    x, y, z = c.x, c.y, c.z
    return x * x + y * y + z * z - x * y * z - 2


def kappa_via_projection(c: Character) -> Scalar:
    """kappa written through the (x, y) projection: 2 + ((2z - xy)^2 - (x^2-4)(y^2-4)) / 4."""
    x, y, z = c.x, c.y, c.z
    num = (2 * z - x * y) ** 2 - (x * x - 4) * (y * y - 4)
    if c.is_exact:
        return 2 + Fraction(num) / 4
    return 2.0 + num / 4.0


def bilinear_form(c: Character) -> list:
    """Symmetric 3x3 matrix with diagonal 2 and off-diagonal entries z, y, x."""
    x, y, z = c.x, c.y, c.z
    two = Fraction(2) if c.is_exact else 2.0
    return [[two, z, y], [z, two, x], [y, x, two]]


def det3(m) -> Scalar:
    return (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )


class FormType(str, Enum):
    DEFINITE = "Definite"
    INDEFINITE = "Indefinite"
    DEGENERATE = "Degenerate"


def _eq(a: Scalar, b, exact: bool) -> bool:
    return a == b if exact else abs(a - b) <= EPS


def _in_box(c: Character) -> bool:
    tol = 0 if c.is_exact else EPS
    return all(-2 - tol <= v <= 2 + tol for v in c)


def classify_form(c: Character) -> FormType:
    t = kappa(c)
    if _eq(t, 2, c.is_exact):
        return FormType.DEGENERATE
    if t < 2 and _in_box(c):
        return FormType.DEFINITE
    return FormType.INDEFINITE


class Tag(str, Enum):
    SU2_COMPACT = "Su2Compact"
    TEICH_OCTANT = "TeichOctant"
    REDUCIBLE_CK = "ReducibleCK"
    REDUCIBLE_C0 = "ReducibleC0"
    REDUCIBLE_C1 = "ReducibleC1"
    REDUCIBLE_C2 = "ReducibleC2"
    REDUCIBLE_C3 = "ReducibleC3"
    SINGULAR_S0 = "SingularS0"
    CONNECTED_ABOVE_TWO = "ConnectedAboveTwo"
    ORIGIN = "Origin"


S0_POINTS = ((2, 2, 2), (2, -2, -2), (-2, 2, -2), (-2, -2, 2))

# sign pattern -> reducible SL(2,R) component; C_i = sigma_i C_0
_REDUCIBLE_BY_SIGNS = {
    (1, 1, 1): Tag.REDUCIBLE_C0,
    (1, -1, -1): Tag.REDUCIBLE_C1,
    (-1, 1, -1): Tag.REDUCIBLE_C2,
    (-1, -1, 1): Tag.REDUCIBLE_C3,
}


@dataclass(frozen=True)
class ComponentLabel:
    tag: Tag
    signs: tuple | None = None
    ambiguous: bool = False

    def __str__(self):
        if self.tag is Tag.TEICH_OCTANT:
            pattern = "".join("+" if s > 0 else "-" for s in self.signs)
            return f"TeichOctant({pattern})"
        return self.tag.value


def _sign(v) -> int:
    return 1 if v > 0 else -1


def _near_boundary(c: Character, t) -> bool:
    """Float-mode points whose label could flip under an EPS perturbation."""
    if c.is_exact:
        return False
    near_two = any(abs(abs(v) - 2) <= EPS for v in c)
    near_zero = any(abs(v) <= EPS for v in c)
    return near_two or near_zero or abs(t - 2) <= EPS


def component_of(c: Character) -> ComponentLabel:
    """Label of the connected component of kappa^{-1}(t) in R^3 containing ``c``."""
    exact = c.is_exact
    t = kappa(c)
    ambiguous = _near_boundary(c, t)
    if all(_eq(v, 0, exact) for v in c):
        return ComponentLabel(Tag.ORIGIN, ambiguous=ambiguous)
    signs = tuple(_sign(v) for v in c)
    if _eq(t, 2, exact):
        if any(all(_eq(v, w, exact) for v, w in zip(c, p)) for p in S0_POINTS):
            return ComponentLabel(Tag.SINGULAR_S0, ambiguous=ambiguous)
        if _in_box(c):
            return ComponentLabel(Tag.REDUCIBLE_CK, ambiguous=ambiguous)
        tag = _REDUCIBLE_BY_SIGNS.get(signs)
        if tag is None:
            # only reachable through float noise; product of signs is positive on kappa=2
            return ComponentLabel(Tag.REDUCIBLE_CK, ambiguous=True)
        return ComponentLabel(tag, signs=signs, ambiguous=ambiguous)
    if t > 2:
        return ComponentLabel(Tag.CONNECTED_ABOVE_TWO, ambiguous=ambiguous)
    if _in_box(c):
        return ComponentLabel(Tag.SU2_COMPACT, ambiguous=ambiguous)
    return ComponentLabel(Tag.TEICH_OCTANT, signs=signs, ambiguous=ambiguous)


def parse_scalar(text: str, mode: str) -> Scalar:
    return to_scalar(text, mode)


def float_kappa(x, y, z):
    """Vectorised kappa for numpy arrays."""
    return x * x + y * y + z * z - x * y * z - 2.0


def is_finite(c: Character) -> bool:
    return c.is_exact or all(math.isfinite(v) for v in c)
