"""Trace polynomials of free-group words and the reducible locus kappa = 2.

Words in the free group <X, Y> are tuples of ``(letter, exponent)`` syllables.
``trace_polynomial`` reduces a word with the SL(2) identities

    tr(UV) = tr(U) tr(V) - tr(U V^-1),   A^n = tr(A) A^(n-1) - A^(n-2),

memoised on a canonical representative of the word up to cyclic rotation and
inversion.  ``numeric_trace`` multiplies explicit complex matrices and is the
independent oracle for it.
"""

from __future__ import annotations

import cmath
import math
import re
import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .charspace import Character, kappa

# ---------------------------------------------------------------- words


@dataclass(frozen=True)
class FreeWord:
    letters: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "letters", free_reduce(self.letters))

    @classmethod
    def parse(cls, text: str) -> "FreeWord":
        return cls(parse_letters(text))

    def inverse(self) -> "FreeWord":
        return FreeWord(tuple((g, -e) for g, e in reversed(self.letters)))

    def __mul__(self, other: "FreeWord") -> "FreeWord":
        return FreeWord(self.letters + other.letters)

    def __len__(self):
        return sum(abs(e) for _, e in self.letters)

    def __str__(self):
        if not self.letters:
            return "1"
        return " ".join(g if e == 1 else f"{g}^{e}" for g, e in self.letters)


def free_reduce(letters) -> tuple:
    out = []
    for g, e in letters:
        if g not in ("X", "Y"):
            raise ValueError(f"unknown letter {g!r}")
        e = int(e)
        if e == 0:
            continue
        if out and out[-1][0] == g:
            e += out[-1][1]
            out.pop()
            if e == 0:
                continue
        out.append((g, e))
    return tuple(out)


_TOKEN = re.compile(r"([XYxy])(?:\^(-?\d+))?")


def parse_letters(text: str) -> tuple:
    """Parse ``"X Y^-2 X^3"``; a lower-case letter stands for the inverse."""
    text = text.replace("*", " ")
    pos, out = 0, []
    for m in _TOKEN.finditer(text):
        if text[pos:m.start()].strip():
            raise ValueError(f"cannot parse word {text!r}")
        letter, exp = m.group(1), int(m.group(2) or 1)
        if letter.islower():
            letter, exp = letter.upper(), -exp
        out.append((letter, exp))
        pos = m.end()
    if text[pos:].strip():
        raise ValueError(f"cannot parse word {text!r}")
    return tuple(out)


def commutator() -> FreeWord:
    return FreeWord((("X", 1), ("Y", 1), ("X", -1), ("Y", -1)))


# ---------------------------------------------------------------- polynomials


class TracePolynomial:
    """Sparse integer polynomial in x, y, z keyed by exponent triples."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {k: v for k, v in (terms or {}).items() if v != 0}

    @classmethod
    def const(cls, c: int) -> "TracePolynomial":
        return cls({(0, 0, 0): c})

    @classmethod
    def var(cls, name: str) -> "TracePolynomial":
        return cls({{"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[name]: 1})

    def __add__(self, other):
        out = dict(self.terms)
        for k, v in other.terms.items():
            out[k] = out.get(k, 0) + v
        return TracePolynomial(out)

    def __neg__(self):
        return TracePolynomial({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        out = {}
        for (a, b, c), u in self.terms.items():
            for (d, e, f), v in other.terms.items():
                k = (a + d, b + e, c + f)
                out[k] = out.get(k, 0) + u * v
        return TracePolynomial(out)

    def __eq__(self, other):
        return isinstance(other, TracePolynomial) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self) -> int:
        return max((sum(k) for k in self.terms), default=0)

    def __call__(self, x, y=None, z=None):
        if isinstance(x, Character):
            x, y, z = x.as_tuple()
        total = 0
        for (i, j, k), c in self.terms.items():
            total += c * x**i * y**j * z**k
        return total

    def sorted_terms(self):
        # degree-lexicographic, highest first
        return sorted(self.terms.items(), key=lambda kv: (-sum(kv[0]), tuple(-e for e in kv[0])))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for n, ((i, j, k), c) in enumerate(self.sorted_terms()):
            factors = [
                f"{v}^{e}" if e > 1 else v for v, e in zip("xyz", (i, j, k)) if e
            ]
            mono = "*".join(factors)
            mag = abs(c)
            body = mono if (mag == 1 and mono) else (f"{mag}*{mono}" if mono else str(mag))
            sign = "-" if c < 0 else "+"
            parts.append((f"-{body}" if sign == "-" else body) if n == 0 else f" {sign} {body}")
        return "".join(parts)

    __repr__ = __str__


X_POLY = TracePolynomial.var("x")
Y_POLY = TracePolynomial.var("y")
Z_POLY = TracePolynomial.var("z")
TWO = TracePolynomial.const(2)
KAPPA_POLY = X_POLY * X_POLY + Y_POLY * Y_POLY + Z_POLY * Z_POLY - X_POLY * Y_POLY * Z_POLY - TWO


# ---------------------------------------------------------------- trace reduction


def _cyclic_reduce(letters: tuple) -> tuple:
    letters = list(free_reduce(letters))
    while len(letters) >= 2 and letters[0][0] == letters[-1][0]:
        g, e = letters[0][0], letters[0][1] + letters[-1][1]
        letters = letters[1:-1]
        if e:
            letters = [(g, e)] + letters
        letters = list(free_reduce(tuple(letters)))
    return tuple(letters)


def _canonical_key(letters: tuple) -> tuple:
    """Minimal rotation of the word or its inverse; traces agree on all of them."""
    letters = _cyclic_reduce(letters)
    if len(letters) <= 1:
        return letters
    inv = tuple((g, -e) for g, e in reversed(letters))
    n = len(letters)
    cands = [w[i:] + w[:i] for w in (letters, inv) for i in range(n)]
    return min(cands)


def _chebyshev(poly_a: TracePolynomial, n: int) -> TracePolynomial:
    """tr(A^n) from tr(A)."""
    n = abs(n)
    prev, cur = TWO, poly_a
    if n == 0:
        return TWO
    for _ in range(n - 1):
        prev, cur = cur, poly_a * cur - prev
    return cur


class _Memo:
    """Memo table: concurrent readers, inserts serialised under a lock."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()
        self.enabled = True

    def get(self, key):
        return self._data.get(key) if self.enabled else None

    def put(self, key, value):
        if self.enabled:
            with self._lock:
                self._data.setdefault(key, value)

    def clear(self):
        with self._lock:
            self._data.clear()


MEMO = _Memo()


def _trace(letters: tuple) -> TracePolynomial:
    key = _canonical_key(letters)
    hit = MEMO.get(key)
    if hit is not None:
        return hit
    result = _trace_uncached(key)
    MEMO.put(key, result)
    return result


def _trace_uncached(w: tuple) -> TracePolynomial:
    if not w:
        return TWO
    if len(w) == 1:
        g, e = w[0]
        return _chebyshev(X_POLY if g == "X" else Y_POLY, e)

    # Cayley-Hamilton on the syllable with the largest exponent
    idx = max(range(len(w)), key=lambda i: abs(w[i][1]))
    g, e = w[idx]
    if abs(e) >= 2:
        rot = w[idx + 1:] + w[:idx]  # the rest of the cyclic word, V in tr(V A^e)
        s = 1 if e > 0 else -1
        base = X_POLY if g == "X" else Y_POLY
        one_less = rot + ((g, e - s),)
        two_less = rot + ((g, e - 2 * s),) if e - 2 * s else rot
        return base * _trace(one_less) - _trace(two_less)

    # every exponent is +-1 and the syllables alternate between X and Y
    if len(w) == 2:
        (_, a), (_, b) = w
        return Z_POLY if a == b else X_POLY * Y_POLY - Z_POLY

    # split at two occurrences of the same letter with the same sign: w = A V1 A V2
    n = len(w)
    for i in range(n):
        for j in range(i + 1, n):
            if w[i] == w[j]:
                rot = w[i:] + w[:i]
                k = j - i
                u, v = rot[:k], rot[k:]
                v_inv = tuple((h, -f) for h, f in reversed(v))
                return _trace(u) * _trace(v) - _trace(u + v_inv)

    # commutator shape A B A^-1 B^-1: tr(UV) with U = AB, V = A^-1 B^-1
    u, v = w[:2], w[2:]
    v_inv = tuple((h, -f) for h, f in reversed(v))
    return _trace(u) * _trace(v) - _trace(u + v_inv)


def trace_polynomial(w) -> TracePolynomial:
    """Integer polynomial f_w with tr(rho(w)) = f_w(tr X, tr Y, tr XY)."""
    if isinstance(w, str):
        w = FreeWord.parse(w)
    if isinstance(w, FreeWord):
        w = w.letters
    return _trace(free_reduce(tuple(w)))


def trace_via_algebra(w) -> TracePolynomial:
    """Second route: multiply in the algebra spanned by I, X, Y, XY over Z[x,y,z].

    Used only as a cross-check of ``trace_polynomial`` in tests.
    """
    if isinstance(w, str):
        w = FreeWord.parse(w)
    if isinstance(w, FreeWord):
        w = w.letters
    zero = TracePolynomial()
    one = TracePolynomial.const(1)
    # element = a I + b X + c Y + d XY
    elem = (one, zero, zero, zero)

    def times_x(e):
        a, b, c, d = e
        # XX = xX - I,  YX = -XY + yX + xY + (z - xy)I,  XYX = Y - yI + zX
        na, nb, nc, nd = zero, a, zero, zero
        na, nb = na - b, nb + b * X_POLY
        nd = nd - c
        nb = nb + c * Y_POLY
        nc = nc + c * X_POLY
        na = na + c * (Z_POLY - X_POLY * Y_POLY)
        nc = nc + d
        na = na - d * Y_POLY
        nb = nb + d * Z_POLY
        return (na, nb, nc, nd)

    def times_y(e):
        a, b, c, d = e
        # YY = yY - I,  XYY = y XY - X
        na = -c
        nb = -d
        nc = a + c * Y_POLY
        nd = b + d * Y_POLY
        return (na, nb, nc, nd)

    def times_inv(e, g):
        # X^-1 = xI - X, Y^-1 = yI - Y
        t = X_POLY if g == "X" else Y_POLY
        step = times_x if g == "X" else times_y
        m = step(e)
        return tuple(t * p - q for p, q in zip(e, m))

    for g, e in w:
        for _ in range(abs(e)):
            if e > 0:
                elem = times_x(elem) if g == "X" else times_y(elem)
            else:
                elem = times_inv(elem, g)
    a, b, c, d = elem
    return a * TWO + b * X_POLY + c * Y_POLY + d * Z_POLY


# ---------------------------------------------------------------- numeric oracle


def zeta_root(z) -> complex:
    """Root of t^2 - z t + 1 with |t| >= 1 (ties: non-negative imaginary part)."""
    z = complex(z)
    disc = cmath.sqrt(z * z - 4)
    r1, r2 = (z + disc) / 2, (z - disc) / 2
    if abs(abs(r1) - abs(r2)) <= 1e-12 * max(1.0, abs(r1)):
        return r1 if r1.imag >= r2.imag else r2
    return r1 if abs(r1) > abs(r2) else r2


def explicit_rep(c: Character, zeta=None):
    """Complex matrices rho(X), rho(Y) realising the character."""
    x, y, z = (complex(v) for v in c)
    if zeta is None:
        zeta = zeta_root(z)
    X = np.array([[x, -1], [1, 0]], dtype=complex)
    Y = np.array([[0, 1 / zeta], [-zeta, y]], dtype=complex)
    return X, Y


def _inv2(m):
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=m.dtype)


def numeric_trace(w, c: Character, zeta=None) -> complex:
    if isinstance(w, str):
        w = FreeWord.parse(w)
    if isinstance(w, FreeWord):
        w = w.letters
    X, Y = explicit_rep(c, zeta)
    mats = {("X", 1): X, ("Y", 1): Y, ("X", -1): _inv2(X), ("Y", -1): _inv2(Y)}
    acc = np.eye(2, dtype=complex)
    for g, e in w:
        m = mats[(g, 1 if e > 0 else -1)]
        for _ in range(abs(e)):
            acc = acc @ m
    return complex(acc[0, 0] + acc[1, 1])


# ---------------------------------------------------------------- reducible locus


def _inv(v):
    if v == 0:
        raise ValueError("reducible parameters must be nonzero")
    return 1 / v


def reducible_param(xi, eta) -> Character:
    """(xi + 1/xi, eta + 1/eta, xi eta + 1/(xi eta)), a character on kappa = 2."""
    if isinstance(xi, int):
        xi = Fraction(xi)
    if isinstance(eta, int):
        eta = Fraction(eta)
    a, b = _inv(xi), _inv(eta)
    coords = (xi + a, eta + b, xi * eta + a * b)
    if any(isinstance(v, complex) for v in coords):
        if max(abs(v.imag) for v in coords) > 1e-9:
            raise ValueError("parameters do not give a real character")
        coords = tuple(v.real for v in coords)
    return Character(*coords)


def factorization_check(xi, eta, zeta) -> bool:
    """Exact check that kappa - 2 factors as zeta^-2 (1-xi eta zeta)(1-eta zeta/xi)(1-xi zeta/eta)(1-xi eta/zeta)."""
    xi, eta, zeta = Fraction(xi), Fraction(eta), Fraction(zeta)
    if 0 in (xi, eta, zeta):
        raise ValueError("parameters must be nonzero")
    if zeta != xi * eta:
        raise ValueError("zeta must equal xi * eta")
    lhs = kappa(Character(xi + 1 / xi, eta + 1 / eta, zeta + 1 / zeta)) - 2
    rhs = (
        (1 - xi * eta * zeta)
        * (1 - eta * zeta / xi)
        * (1 - xi * zeta / eta)
        * (1 - xi * eta / zeta)
        / zeta**2
    )
    return lhs == rhs


def torus_cover(angles) -> Character:
    """Image of (a, b) in (R/Z)^2 under exp(2 pi i .) followed by the reducible map."""
    a, b = (float(v) for v in angles)
    tau = 2 * math.pi
    return Character(2 * math.cos(tau * a), 2 * math.cos(tau * b), 2 * math.cos(tau * (a + b)))


def torus_matrix(m):
    """Linear map on angles intertwining torus_cover with a mapping class of homology m.

    This is the inverse transpose of m; the character action is by rho o phi^{-1}.
    """
    (a, b), (c, d) = m.m if hasattr(m, "m") else m
    det = a * d - b * c
    return ((d * det, -c * det), (-b * det, a * det))
