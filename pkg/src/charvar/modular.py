"""The group Gamma of polynomial automorphisms preserving kappa.

Gamma is PGL(2,Z) acting through mapping classes, extended by the sign-change
group Sigma = Z/2 + Z/2.  Elements carry the generator word they were built
from together with the normal form ``(pgl, signs)``; the action of the element
on characters is ``sigma_signs o P(pgl)`` where ``P`` is the mapping-class
action.

Words compose like functions: the word ``g1 g2 g3`` acts as ``g1 o g2 o g3``
(``g3`` first).
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from .charspace import Character


class Gen(str, Enum):
    SIGMA1 = "Sigma1"
    SIGMA2 = "Sigma2"
    SIGMA3 = "Sigma3"
    P12 = "P12"
    P13 = "P13"
    P23 = "P23"
    P123 = "P123"
    P132 = "P132"
    QX = "Qx"
    QY = "Qy"
    QZ = "Qz"
    TAUX = "TauX"
    TAUY = "TauY"
    NU = "Nu"
    EPSILON = "Epsilon"


ALL_GENERATORS = tuple(Gen)
GAMMA2_GENERATORS = (Gen.QX, Gen.QY, Gen.QZ, Gen.SIGMA1, Gen.SIGMA2, Gen.SIGMA3)

# polynomial actions on (x, y, z), copied from the character tables
_ACTIONS = {
    Gen.SIGMA1: lambda x, y, z: (x, -y, -z),
    Gen.SIGMA2: lambda x, y, z: (-x, y, -z),
    Gen.SIGMA3: lambda x, y, z: (-x, -y, z),
    Gen.P12: lambda x, y, z: (y, x, z),
    Gen.P13: lambda x, y, z: (z, y, x),
    Gen.P23: lambda x, y, z: (x, z, y),
    Gen.P123: lambda x, y, z: (z, x, y),
    Gen.P132: lambda x, y, z: (y, z, x),
    Gen.QX: lambda x, y, z: (y * z - x, y, z),
    Gen.QY: lambda x, y, z: (x, x * z - y, z),
    Gen.QZ: lambda x, y, z: (x, y, x * y - z),
    Gen.TAUX: lambda x, y, z: (x, x * y - z, y),
    Gen.TAUY: lambda x, y, z: (x * y - z, y, x),
    Gen.NU: lambda x, y, z: (y, x, x * y - z),
    Gen.EPSILON: lambda x, y, z: (x, y, z),
}

_HOMOLOGY = {
    Gen.SIGMA1: ((1, 0), (0, 1)),
    Gen.SIGMA2: ((1, 0), (0, 1)),
    Gen.SIGMA3: ((1, 0), (0, 1)),
    Gen.P12: ((0, 1), (1, 0)),
    Gen.P13: ((-1, 0), (-1, 1)),
    Gen.P23: ((1, -1), (0, -1)),
    Gen.P123: ((0, -1), (1, -1)),
    Gen.P132: ((-1, 1), (-1, 0)),
    Gen.QX: ((1, 0), (2, -1)),
    Gen.QY: ((1, -2), (0, -1)),
    Gen.QZ: ((1, 0), (0, -1)),
    Gen.TAUX: ((1, 1), (0, 1)),
    Gen.TAUY: ((1, 0), (1, 1)),
    Gen.NU: ((0, 1), (-1, 0)),
    Gen.EPSILON: ((-1, 0), (0, -1)),
}

# sign characters (value on X, value on Y) in additive Z/2 notation
_SIGNS = {Gen.SIGMA1: (0, 1), Gen.SIGMA2: (1, 0), Gen.SIGMA3: (1, 1)}
_SIGN_GENERATOR = {v: k for k, v in _SIGNS.items()}


def generator_action(g: Gen):
    return _ACTIONS[Gen(g)]


# ---------------------------------------------------------------- PGL(2,Z)


@dataclass(frozen=True)
class Gl2zClass:
    """A matrix in GL(2,Z) up to sign, stored as its canonical representative."""

    m: tuple

    def __post_init__(self):
        (a, b), (c, d) = self.m
        if abs(a * d - b * c) != 1:
            raise ValueError(f"matrix {self.m} is not unimodular")
        object.__setattr__(self, "m", _canonical(((a, b), (c, d))))

    @classmethod
    def of(cls, m) -> "Gl2zClass":
        return cls(tuple(tuple(int(v) for v in row) for row in m))

    @property
    def det(self) -> int:
        (a, b), (c, d) = self.m
        return a * d - b * c

    def __mul__(self, other: "Gl2zClass") -> "Gl2zClass":
        return Gl2zClass(matmul(self.m, other.m))

    def inverse(self) -> "Gl2zClass":
        return Gl2zClass(inverse(self.m))

    def is_identity(self) -> bool:
        return self.m == ((1, 0), (0, 1))

    def mod2(self) -> tuple:
        return tuple(tuple(v % 2 for v in row) for row in self.m)

    def as_list(self) -> list:
        return [list(row) for row in self.m]


def _canonical(m):
    (a, b), (c, d) = m
    first = next((v for v in (a, b, c, d) if v != 0), 0)
    if first < 0:
        return ((-a, -b), (-c, -d))
    return ((a, b), (c, d))


def matmul(p, q):
    (a, b), (c, d) = p
    (e, f), (g, h) = q
    return ((a * e + b * g, a * f + b * h), (c * e + d * g, c * f + d * h))


def inverse(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    return ((d * det, -b * det), (-c * det, a * det))


IDENTITY = Gl2zClass(((1, 0), (0, 1)))


def homology_of_generator(g: Gen) -> Gl2zClass:
    return Gl2zClass(_HOMOLOGY[Gen(g)])


# ---------------------------------------------------------------- elements


def _sign_add(s, t):
    return ((s[0] + t[0]) % 2, (s[1] + t[1]) % 2)


def _sign_transport(t, m: Gl2zClass):
    """t o phi^{-1} for a sign character t (row vector) and phi with homology m."""
    (a, b), (c, d) = inverse(m.m)
    return ((t[0] * a + t[1] * c) % 2, (t[0] * b + t[1] * d) % 2)


@dataclass(frozen=True)
class GammaElement:
    """Element of Gamma: generator word plus semidirect normal form."""

    word: tuple = ()
    pgl: Gl2zClass = IDENTITY
    signs: tuple = (0, 0)

    @classmethod
    def identity(cls) -> "GammaElement":
        return cls()

    @classmethod
    def generator(cls, g) -> "GammaElement":
        g = Gen(g)
        signs = _SIGNS.get(g, (0, 0))
        return cls((g,), homology_of_generator(g), signs)

    @classmethod
    def from_word(cls, word) -> "GammaElement":
        if isinstance(word, str):
            word = parse_word(word)
        out = cls.identity()
        for g in word:
            out = compose(out, cls.generator(g))
        return out

    @property
    def normal_form(self) -> tuple:
        return (self.pgl, self.signs)

    def same_action(self, other: "GammaElement") -> bool:
        return self.normal_form == other.normal_form

    def is_identity(self) -> bool:
        return self.pgl.is_identity() and self.signs == (0, 0)

    def word_str(self) -> str:
        return format_word(self.word)

    def normal_form_json(self) -> dict:
        return {"m": self.pgl.as_list(), "signs": list(self.signs)}

    def __len__(self):
        return len(self.word)


def compose(g: GammaElement, h: GammaElement) -> GammaElement:
    """g o h: act by h first, then g."""
    signs = _sign_add(g.signs, _sign_transport(h.signs, g.pgl))
    return GammaElement(g.word + h.word, g.pgl * h.pgl, signs)


def _as_element(g) -> GammaElement:
    if isinstance(g, GammaElement):
        return g
    return GammaElement.generator(g)


def apply(g, c: Character) -> Character:
    """Image of the character ``c`` under ``g`` (an element or generator id)."""
    word = _as_element(g).word
    x, y, z = c.x, c.y, c.z
    for gen in reversed(word):
        x, y, z = _ACTIONS[gen](x, y, z)
    return Character(x, y, z)


def apply_tuple(word, xyz):
    """Apply a generator word to a raw coordinate tuple (no Character overhead)."""
    x, y, z = xyz
    for gen in reversed(word):
        x, y, z = _ACTIONS[gen](x, y, z)
    return (x, y, z)


def homology(g) -> Gl2zClass:
    return _as_element(g).pgl


# points of P^1(Z/2), labelled 1, 2, 3 like the coordinates x, y, z
_P1_Z2 = ((1, 0), (0, 1), (1, 1))


def s3_image(g) -> tuple:
    """Permutation of {1,2,3} induced by the homology matrix mod 2.

    Returned as a tuple ``p`` with ``p[i-1]`` the image of ``i``.
    """
    (a, b), (c, d) = homology(g).m
    out = []
    for v in _P1_Z2:
        w = ((a * v[0] + b * v[1]) % 2, (c * v[0] + d * v[1]) % 2)
        out.append(_P1_Z2.index(w) + 1)
    return tuple(out)


def in_gamma2(g) -> bool:
    return s3_image(g) == (1, 2, 3)


# ---------------------------------------------------------------- from_gl2z

_T = ((1, 1), (0, 1))  # TauX
_U = ((1, 0), (1, 1))  # TauY
_S = ((0, 1), (1, 0))  # P12
_R = ((1, 0), (0, -1))  # Qz


def _power_word(base: Gen, k: int) -> list:
    # Qz conjugates each Dehn twist to its inverse
    if k >= 0:
        return [base] * k
    return [Gen.QZ] + [base] * (-k) + [Gen.QZ]


def pgl_word(m) -> list:
    """Generator word over {TauX, TauY, Qz, P12} whose homology is +-m."""
    cur = tuple(tuple(int(v) for v in row) for row in m)
    if abs(cur[0][0] * cur[1][1] - cur[0][1] * cur[1][0]) != 1:
        raise ValueError(f"matrix {m} is not unimodular")
    right = []  # factors F with m = cur . F_k ... F_1, prepended as found
    while cur[0][0] != 0 and cur[0][1] != 0:
        a, b = cur[0]
        if abs(a) >= abs(b):
            k = -(a // b)
            cur = matmul(cur, ((1, 0), (k, 1)))
            right = _power_word(Gen.TAUY, -k) + right
        else:
            k = -(b // a)
            cur = matmul(cur, ((1, k), (0, 1)))
            right = _power_word(Gen.TAUX, -k) + right
    if cur[0][0] == 0:
        cur = matmul(cur, _S)
        right = [Gen.P12] + right
    (a, _), (c, d) = cur
    k = -c * d
    if k:
        cur = matmul(cur, ((1, 0), (k, 1)))
        right = _power_word(Gen.TAUY, -k) + right
    left = [] if cur[0][0] * cur[1][1] == 1 else [Gen.QZ]
    return left + right


def from_gl2z(m, signs=(0, 0)) -> GammaElement:
    """Element with normal form (m, signs), realised by a Euclidean decomposition."""
    if isinstance(m, Gl2zClass):
        m = m.m
    signs = (int(signs[0]) % 2, int(signs[1]) % 2)
    word = pgl_word(m)
    if signs != (0, 0):
        word = [_SIGN_GENERATOR[signs]] + word
    out = GammaElement.from_word(word)
    assert out.pgl == Gl2zClass.of(m) and out.signs == signs
    return out


def _even_power_word(base: str, m: int) -> list:
    # TauX^2 = Qy Qz and TauY^2 = Qx Qz on homology; the reversed pair gives the inverse
    q = Gen.QY if base == "T" else Gen.QX
    pair = [q, Gen.QZ] if m > 0 else [Gen.QZ, q]
    return pair * abs(m)


def gamma2_word(m, signs=(0, 0)) -> GammaElement:
    """Element over {Qx, Qy, Qz, Sigma1, Sigma2, Sigma3} with normal form (m, signs).

    Requires m = I mod 2 up to sign; uses a Euclidean descent with even powers of
    the Dehn twists.
    """
    if isinstance(m, Gl2zClass):
        m = m.m
    cur = tuple(tuple(int(v) for v in row) for row in m)
    if Gl2zClass.of(cur).mod2() != ((1, 0), (0, 1)):
        raise ValueError(f"{m} is not in the level-2 congruence subgroup")
    right = []
    while cur[0][1] != 0:
        a, b = cur[0]
        k = -round(Fraction(b, 2 * a))
        cur = matmul(cur, ((1, 2 * k), (0, 1)))
        right = _even_power_word("T", -k) + right
        a, b = cur[0]
        if b == 0:
            break
        k = -round(Fraction(a, 2 * b))
        cur = matmul(cur, ((1, 0), (2 * k, 1)))
        right = _even_power_word("U", -k) + right
    (a, _), (c, d) = cur
    k = -c * d // 2
    if k:
        cur = matmul(cur, ((1, 0), (2 * k, 1)))
        right = _even_power_word("U", -k) + right
    left = [] if cur[0][0] * cur[1][1] == 1 else [Gen.QZ]
    signs = (int(signs[0]) % 2, int(signs[1]) % 2)
    word = left + right
    if signs != (0, 0):
        word = [_SIGN_GENERATOR[signs]] + word
    out = GammaElement.from_word(word)
    assert out.pgl == Gl2zClass.of(m) and out.signs == signs
    return out


def random_element(length: int, seed, alphabet=ALL_GENERATORS) -> GammaElement:
    """Uniformly random word of the given length, deterministic in ``seed``."""
    if length < 0:
        raise ValueError("length must be non-negative")
    rng = random.Random(seed)
    return GammaElement.from_word([rng.choice(alphabet) for _ in range(length)])


# ---------------------------------------------------------------- words as text


def parse_word(text: str) -> tuple:
    names = {g.value.lower(): g for g in Gen}
    out = []
    for token in text.split():
        try:
            out.append(names[token.lower()])
        except KeyError:
            raise ValueError(f"unknown generator {token!r}") from None
    return tuple(out)


def format_word(word) -> str:
    return " ".join(Gen(g).value for g in word)


def differential_at_origin(g) -> tuple:
    """Jacobian of the action of g at (0, 0, 0), as rows of integers.

    Every generator is linear plus products of distinct coordinates, so the
    image of a unit vector is exactly the corresponding column.
    """
    cols = [apply_tuple(_as_element(g).word, tuple(int(i == j) for i in range(3))) for j in range(3)]
    return tuple(tuple(cols[j][i] for j in range(3)) for i in range(3))


def signed_permutation(jac) -> tuple | None:
    """Permutation p (p[j-1] = image of j) if jac is a signed permutation matrix, else None."""
    perm = []
    for j in range(3):
        col = [jac[i][j] for i in range(3)]
        nonzero = [i for i, v in enumerate(col) if v != 0]
        if len(nonzero) != 1 or abs(col[nonzero[0]]) != 1:
            return None
        perm.append(nonzero[0] + 1)
    return tuple(perm) if sorted(perm) == [1, 2, 3] else None
