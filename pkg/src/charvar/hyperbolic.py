"""Isometries of the upper half-plane and numeric checks on commutators.

Points of H^2 are complex numbers with positive imaginary part; boundary points
are floats with ``math.inf`` for the point at infinity.  Intersection tests run
in the Klein disk (after a Cayley transform), where geodesics are chords.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

import numpy as np

from .charspace import Character
from .traces import zeta_root

TRACE_TOL = 1e-9
DET_TOL = 1e-12
SEG_TOL = 1e-10
INF = math.inf


class IsometryClass(str, Enum):
    CENTRAL = "Central"
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


class GeometryError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Isometry:
    m: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.m, dtype=float).reshape(2, 2)
        det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
        if abs(det - 1) > DET_TOL * max(1.0, float(np.abs(m).max()) ** 2):
            raise GeometryError(f"determinant {det} is not 1")
        object.__setattr__(self, "m", m)

    @property
    def trace(self) -> float:
        return float(self.m[0, 0] + self.m[1, 1])

    @property
    def kind(self) -> IsometryClass:
        if np.allclose(self.m, np.eye(2), atol=DET_TOL) or np.allclose(self.m, -np.eye(2), atol=DET_TOL):
            return IsometryClass.CENTRAL
        t = abs(self.trace)
        if abs(t - 2) <= TRACE_TOL:
            return IsometryClass.PARABOLIC
        return IsometryClass.ELLIPTIC if t < 2 else IsometryClass.HYPERBOLIC

    def inverse(self) -> "Isometry":
        (a, b), (c, d) = self.m
        return Isometry(np.array([[d, -b], [-c, a]]))

    def __matmul__(self, other: "Isometry") -> "Isometry":
        return Isometry(self.m @ other.m)

    def __call__(self, z):
        return mobius(self.m, z)


def mobius(m, z):
    """Act on a point of H^2 (complex) or of the boundary (float, inf allowed)."""
    (a, b), (c, d) = m
    if isinstance(z, float) and math.isinf(z):
        return a / c if c != 0 else INF
    den = c * z + d
    if den == 0:
        return INF
    out = (a * z + b) / den
    return out


@dataclass(frozen=True)
class Geodesic:
    """Complete geodesic given by its two ideal endpoints."""

    p: float
    q: float

    def __post_init__(self):
        if self.p == self.q:
            raise GeometryError("geodesic endpoints must differ")

    def endpoints(self):
        return (self.p, self.q)


# ---------------------------------------------------------------- commutators


def _mat(a):
    return a.m if isinstance(a, Isometry) else np.asarray(a)


def _inv2(m):
    return np.array([[m[1, 1], -m[0, 1]], [-m[1, 0], m[0, 0]]], dtype=m.dtype)


def commutator(a, b):
    a, b = _mat(a), _mat(b)
    return a @ b @ _inv2(a) @ _inv2(b)


def commutator_trace(a, b):
    """tr(a b a^-1 b^-1); complex input (e.g. SU(2) matrices) is accepted."""
    k = commutator(a, b)
    t = k[0, 0] + k[1, 1]
    if np.iscomplexobj(t):
        return complex(t) if abs(t.imag) > TRACE_TOL else float(t.real)
    return float(t)


def diagonal_closed_form(lam, eta) -> float:
    (_, b), (c, _) = _mat(eta)
    return 2 - b * c * (lam - 1 / lam) ** 2


def unipotent_closed_form(s, eta) -> float:
    c = _mat(eta)[1, 0]
    return 2 + s * s * c * c


def rotation_closed_form(theta, eta) -> float:
    (a, b), (c, d) = _mat(eta)
    return 2 + math.sin(theta) ** 2 * (a * a + b * b + c * c + d * d - 2)


def crossing_pair(theta, phi, r):
    """Hyperbolic pair with axes (-1, 1) and (r, oo)."""
    xi = np.array([[math.cosh(theta), math.sinh(theta)], [math.sinh(theta), math.cosh(theta)]])
    eta = np.array([[math.exp(phi), -2 * r * math.sinh(phi)], [0.0, math.exp(-phi)]])
    return Isometry(xi), Isometry(eta)


def crossing_closed_form(theta, phi, r) -> float:
    return 2 + 4 * (r * r - 1) * math.sinh(theta) ** 2 * math.sinh(phi) ** 2


def quaternion_pair():
    return (np.array([[1j, 0], [0, -1j]]), np.array([[0, -1], [1, 0]], dtype=complex))


# ---------------------------------------------------------------- axes


def fixed_points(a):
    """Boundary fixed points of a hyperbolic or parabolic isometry."""
    (p, q), (r, s) = _mat(a)
    if abs(r) <= 1e-15:
        if abs(s - p) <= 1e-15:
            return (INF,)
        return (q / (s - p), INF)
    disc = (s - p) ** 2 + 4 * q * r
    root = math.sqrt(max(disc, 0.0))
    return ((p - s - root) / (2 * r), (p - s + root) / (2 * r))


def axis(a) -> Geodesic:
    a = a if isinstance(a, Isometry) else Isometry(a)
    if a.kind is not IsometryClass.HYPERBOLIC:
        raise GeometryError(f"{a.kind.value} isometry has no invariant axis")
    return Geodesic(*fixed_points(a))


def _boundary_angle(u) -> float:
    return math.pi if math.isinf(u) else 2 * math.atan(u)


def _angle_gap(s, t):
    d = abs(s - t) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


def geodesic_relation(g: Geodesic, h: Geodesic, tol=TRACE_TOL) -> str:
    """'cross', 'disjoint' (ultraparallel) or 'asymptotic' by endpoint interleaving."""
    ga = [_boundary_angle(u) for u in g.endpoints()]
    ha = [_boundary_angle(u) for u in h.endpoints()]
    if any(_angle_gap(s, t) <= tol for s in ga for t in ha):
        return "asymptotic"
    lo, hi = sorted(ga)
    inside = [lo < t < hi for t in ha]
    return "cross" if inside[0] != inside[1] else "disjoint"


def axes_relation(a, b) -> str:
    for m in (a, b):
        m = m if isinstance(m, Isometry) else Isometry(m)
        if m.kind is not IsometryClass.HYPERBOLIC:
            raise GeometryError("axes_cross needs two hyperbolic isometries")
    return geodesic_relation(axis(a), axis(b))


def axes_cross(a, b) -> bool:
    return axes_relation(a, b) == "cross"


# ---------------------------------------------------------------- quadrilaterals


def elliptic_fixed_point(a) -> complex:
    (p, q), (r, s) = _mat(a)
    # r z^2 + (s - p) z - q = 0, root in the upper half-plane
    disc = complex((s - p) ** 2 + 4 * q * r)
    root = np.sqrt(disc)
    for z in ((p - s + root) / (2 * r), (p - s - root) / (2 * r)):
        if z.imag > 0:
            return complex(z)
    raise GeometryError("no fixed point in the upper half-plane")


def quad_vertices(a, b):
    """p1..p4 = (b a^-1 b^-1 p, a^-1 b^-1 p, b^-1 p, p) with p fixed by [a, b]."""
    a, b = _mat(a), _mat(b)
    t = commutator_trace(a, b)
    if isinstance(t, complex) or not -2 < t < 2:
        raise GeometryError(f"commutator trace {t} is not elliptic")
    p = elliptic_fixed_point(commutator(a, b))
    ai, bi = _inv2(a), _inv2(b)
    p4 = p
    p3 = mobius(bi, p4)
    p2 = mobius(ai, p3)
    p1 = mobius(b, p2)
    return (complex(p1), complex(p2), complex(p3), complex(p4))


def to_klein(z: complex) -> complex:
    w = (z - 1j) / (z + 1j)
    return 2 * w / (1 + abs(w) ** 2)


def _orient(a: complex, b: complex, c: complex) -> float:
    return (b - a).real * (c - a).imag - (b - a).imag * (c - a).real


def _on_segment(a, b, c, tol) -> bool:
    return (
        min(a.real, b.real) - tol <= c.real <= max(a.real, b.real) + tol
        and min(a.imag, b.imag) - tol <= c.imag <= max(a.imag, b.imag) + tol
    )


def _segments_meet(a, b, c, d, tol=SEG_TOL) -> bool:
    d1, d2 = _orient(c, d, a), _orient(c, d, b)
    d3, d4 = _orient(a, b, c), _orient(a, b, d)
    if ((d1 > tol and d2 < -tol) or (d1 < -tol and d2 > tol)) and (
        (d3 > tol and d4 < -tol) or (d3 < -tol and d4 > tol)
    ):
        return True
    if abs(d1) <= tol and _on_segment(c, d, a, tol):
        return True
    if abs(d2) <= tol and _on_segment(c, d, b, tol):
        return True
    if abs(d3) <= tol and _on_segment(a, b, c, tol):
        return True
    if abs(d4) <= tol and _on_segment(a, b, d, tol):
        return True
    return False


def _adjacent_overlap(shared, u, v, tol=SEG_TOL) -> bool:
    """Segments shared-u and shared-v overlap beyond the shared vertex."""
    if abs(_orient(shared, u, v)) > tol:
        return False
    du, dv = u - shared, v - shared
    return (du.real * dv.real + du.imag * dv.imag) > 0


def _normalized_klein(points) -> list:
    """Klein images of the points, recentred and scaled to unit diameter.

    The centroid is first moved to i by z -> (z - Re c) / Im c, then the Klein
    coordinates are translated and scaled; neither step bends segments, so
    incidence is preserved while small or boundary-hugging configurations
    become well conditioned.
    """
    pts = [complex(p) for p in points]
    c = sum(pts) / len(pts)
    k = [to_klein((p - c.real) / c.imag) for p in pts]
    diam = max(abs(a - b) for a, b in combinations(k, 2))
    return [(z - k[0]) / diam for z in k]


def is_embedded_quadrilateral(p1, p2, p3, p4) -> bool:
    pts = [complex(p) for p in (p1, p2, p3, p4)]
    if any(p.imag <= 0 for p in pts):
        raise GeometryError("points must lie in the upper half-plane")
    for a, b in combinations(pts, 2):
        if abs(a - b) <= 1e-12 * max(1.0, abs(a)):
            raise GeometryError("quadrilateral vertices must be distinct")
    k = _normalized_klein(pts)
    if _segments_meet(k[0], k[1], k[2], k[3]) or _segments_meet(k[1], k[2], k[3], k[0]):
        return False
    for i in range(4):
        prev, cur, nxt = k[i - 1], k[i], k[(i + 1) % 4]
        if _adjacent_overlap(cur, prev, nxt):
            return False
    return True


def collinearity_defect(points) -> float:
    """Largest triangle area among triples after normalising to unit diameter; 0 iff all collinear."""
    k = _normalized_klein(points)
    return max(abs(_orient(a, b, c)) for a, b, c in combinations(k, 3))


def side_pairing_residual(a, b, quad) -> float:
    """max distance in the disk for a: p1->p4, p2->p3 and b: p2->p1, p3->p4."""
    p1, p2, p3, p4 = quad
    a, b = _mat(a), _mat(b)
    pairs = [(mobius(a, p1), p4), (mobius(a, p2), p3), (mobius(b, p2), p1), (mobius(b, p3), p4)]
    return max(abs(to_klein(u) - to_klein(v)) for u, v in pairs)


# ---------------------------------------------------------------- pants


def lift_character(c: Character):
    """Real SL(2,R) matrices with traces x, y and trace of the product z (|z| >= 2)."""
    x, y, z = (float(v) for v in c)
    if abs(z) < 2:
        raise GeometryError("|z| < 2: the explicit representation is not real")
    zeta = zeta_root(z).real
    X = np.array([[x, -1.0], [1.0, 0.0]])
    Y = np.array([[0.0, 1 / zeta], [-zeta, y]])
    return Isometry(X), Isometry(Y)


def _normalizer(g: Geodesic):
    """Matrix taking g.p to 0 and g.q to infinity."""
    p, q = g.p, g.q
    if math.isinf(p):
        return np.array([[0.0, 1.0], [1.0, -q]])
    if math.isinf(q):
        return np.array([[1.0, -p], [0.0, 1.0]])
    return np.array([[1.0, -p], [1.0, -q]])


def _inverse_real(m):
    (a, b), (c, d) = m
    det = a * d - b * c
    return np.array([[d, -b], [-c, a]]) / det


def _as_real(u):
    return u if isinstance(u, float) else float(u.real) if isinstance(u, complex) else float(u)


def common_perpendicular(g: Geodesic, h: Geodesic) -> Geodesic:
    if geodesic_relation(g, h) != "disjoint":
        raise GeometryError("common perpendicular needs ultraparallel geodesics")
    n = _normalizer(g)
    u, v = (_as_real(mobius(n, e)) for e in h.endpoints())
    r = math.sqrt(u * v)
    back = _inverse_real(n)
    return Geodesic(_as_real(mobius(back, -r)), _as_real(mobius(back, r)))


def right_angle_residual(g: Geodesic, h: Geodesic) -> float:
    """|angle(g, h) - pi/2| at their intersection point."""
    n = _normalizer(g)
    u, v = (_as_real(mobius(n, e)) for e in h.endpoints())
    if math.isinf(u) or math.isinf(v) or u * v >= 0:
        raise GeometryError("geodesics do not cross")
    return math.asin(min(1.0, abs(u + v) / abs(v - u)))


@dataclass
class Hexagon:
    sides: list
    residuals: list
    ultraparallel: bool
    perpendiculars_disjoint: bool = field(default=True)

    @property
    def max_residual(self) -> float:
        return max(self.residuals)


def pants_hexagon(c: Character) -> Hexagon:
    """Right-angled hexagon cut out by the axes of X, Y, XY and their common perpendiculars."""
    if not all(float(v) < -2 for v in c):
        raise GeometryError(f"{c} is not in the octant (-oo, -2)^3")
    X, Y = lift_character(c)
    axes = [axis(X), axis(Y), axis(X @ Y)]
    for g, h in combinations(axes, 2):
        if geodesic_relation(g, h) != "disjoint":
            raise GeometryError("axes are not pairwise ultraparallel")
    perps = [common_perpendicular(axes[i], axes[(i + 1) % 3]) for i in range(3)]
    sides, residuals = [], []
    for i in range(3):
        sides += [axes[i], perps[i]]
        residuals.append(right_angle_residual(axes[i], perps[i]))
        residuals.append(right_angle_residual(axes[(i + 1) % 3], perps[i]))
    disjoint = all(geodesic_relation(g, h) == "disjoint" for g, h in combinations(perps, 2))
    return Hexagon(sides, residuals, True, disjoint)
