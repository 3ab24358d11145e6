"""
geom_core.py -- Planar primitives, tolerance-aware predicates, 2x2 matrices.

All comparisons go through one global tolerance EPS (default 1e-9). It can
be overridden with the FINITE_VEECH_EPSILON environment variable (a .env
file is honoured) or at runtime with set_epsilon().
"""

import math
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from dotenv import load_dotenv

from .errors import DegeneratePolygon, DependentInput, NonUnitDeterminant

load_dotenv()

_EPSILON = float(os.getenv("FINITE_VEECH_EPSILON", "1e-9"))

TWO_PI = 2.0 * math.pi


def get_epsilon() -> float:
    return _EPSILON


def set_epsilon(value: float) -> None:
    global _EPSILON
    if not value > 0:
        raise ValueError(f"epsilon must be positive, got {value}")
    _EPSILON = float(value)


# Vectors


class Vec2(NamedTuple):
    x: float
    y: float

    def __add__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x + other[0], self.y + other[1])

    def __sub__(self, other: "Vec2") -> "Vec2":
        return Vec2(self.x - other[0], self.y - other[1])

    def __mul__(self, s: float) -> "Vec2":
        return Vec2(self.x * s, self.y * s)

    __rmul__ = __mul__

    def __truediv__(self, s: float) -> "Vec2":
        return Vec2(self.x / s, self.y / s)

    def __neg__(self) -> "Vec2":
        return Vec2(-self.x, -self.y)

    def dot(self, other: "Vec2") -> float:
        return self.x * other[0] + self.y * other[1]

    def cross(self, other: "Vec2") -> float:
        return self.x * other[1] - self.y * other[0]

    def norm(self) -> float:
        return math.hypot(self.x, self.y)

    def unit(self) -> "Vec2":
        n = self.norm()
        return Vec2(self.x / n, self.y / n)

    def angle(self) -> float:
        """Polar angle in [0, 2pi)."""
        a = math.atan2(self.y, self.x)
        return a + TWO_PI if a < 0 else a

    def rotated(self, angle: float) -> "Vec2":
        c, s = math.cos(angle), math.sin(angle)
        return Vec2(c * self.x - s * self.y, s * self.x + c * self.y)

    def is_zero(self) -> bool:
        return self.norm() <= _EPSILON


ORIGIN = Vec2(0.0, 0.0)


def approx_eq(a: float, b: float, tol: Optional[float] = None) -> bool:
    return abs(a - b) <= (_EPSILON if tol is None else tol)


def vec_close(u: Sequence[float], v: Sequence[float], tol: Optional[float] = None) -> bool:
    t = _EPSILON if tol is None else tol
    return abs(u[0] - v[0]) <= t and abs(u[1] - v[1]) <= t


def ccw_angle(u: Vec2, v: Vec2) -> float:
    """Counterclockwise angle from u to v, in [0, 2pi)."""
    a = math.atan2(u.cross(v), u.dot(v))
    return a + TWO_PI if a < 0 else a


def orientation(a: Vec2, b: Vec2, c: Vec2) -> int:
    """+1 for a left turn a->b->c, -1 for a right turn, 0 if colinear within EPS."""
    ab, ac = b - a, c - a
    scale = max(ab.norm(), ac.norm(), 1.0)
    d = ab.cross(ac)
    if d > _EPSILON * scale:
        return 1
    if d < -_EPSILON * scale:
        return -1
    return 0


def point_segment_distance(p: Vec2, a: Vec2, b: Vec2) -> float:
    ab = b - a
    denom = ab.dot(ab)
    if denom == 0.0:
        return (p - a).norm()
    s = min(1.0, max(0.0, (p - a).dot(ab) / denom))
    return (p - (a + ab * s)).norm()


# Matrices


class MatrixClass(str, Enum):
    ELLIPTIC = "Elliptic"
    PARABOLIC = "Parabolic"
    HYPERBOLIC = "Hyperbolic"


class PlanarMatrix(NamedTuple):
    """Row-major 2x2 matrix [[a, b], [c, d]]."""

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def identity(cls) -> "PlanarMatrix":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def rotation(cls, angle: float) -> "PlanarMatrix":
        c, s = math.cos(angle), math.sin(angle)
        return cls(c, -s, s, c)

    @classmethod
    def reflection(cls, axis_angle: float) -> "PlanarMatrix":
        """Reflection across the line through the origin at axis_angle."""
        c, s = math.cos(2 * axis_angle), math.sin(2 * axis_angle)
        return cls(c, s, s, -c)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "PlanarMatrix":
        return cls(float(arr[0, 0]), float(arr[0, 1]), float(arr[1, 0]), float(arr[1, 1]))

    def to_array(self) -> np.ndarray:
        return np.array([[self.a, self.b], [self.c, self.d]], dtype=float)

    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def trace(self) -> float:
        return self.a + self.d

    def apply(self, v: Sequence[float]) -> Vec2:
        return Vec2(self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1])

    def __matmul__(self, other: "PlanarMatrix") -> "PlanarMatrix":
        return PlanarMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "PlanarMatrix":
        det = self.det()
        return PlanarMatrix(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def is_close(self, other: "PlanarMatrix", tol: Optional[float] = None) -> bool:
        t = _EPSILON if tol is None else tol
        return all(abs(x - y) <= t for x, y in zip(self, other))

    def is_orthogonal(self, tol: Optional[float] = None) -> bool:
        t = _EPSILON if tol is None else tol
        mtm = self.to_array().T @ self.to_array()
        return bool(np.all(np.abs(mtm - np.eye(2)) <= t))

    def rotation_angle(self) -> float:
        """Angle of the rotation part, in [0, 2pi).

        For det = -1 this is twice the angle of the reflection axis.
        """
        a = math.atan2(self.c, self.a)
        return a + TWO_PI if a < 0 else a


def classify_matrix(m: PlanarMatrix) -> MatrixClass:
    """Elliptic / parabolic / hyperbolic trichotomy by |trace|.

    Orientation-reversing matrices are classified through their square.
    +-I and involutions count as elliptic: they have finite order.
    """
    det = m.det()
    if abs(abs(det) - 1.0) > _EPSILON:
        raise NonUnitDeterminant(f"|det| = {abs(det):.12g}, expected 1")
    if det < 0:
        m = m @ m
    if m.is_close(PlanarMatrix.identity()) or m.is_close(PlanarMatrix(-1.0, 0.0, 0.0, -1.0)):
        return MatrixClass.ELLIPTIC
    tr = abs(m.trace())
    if tr < 2.0 - _EPSILON:
        return MatrixClass.ELLIPTIC
    if tr <= 2.0 + _EPSILON:
        return MatrixClass.PARABOLIC
    return MatrixClass.HYPERBOLIC


def solve_pair_map(u1: Vec2, u2: Vec2, v1: Vec2, v2: Vec2) -> Optional[PlanarMatrix]:
    """The matrix M with M u1 = v1 and M u2 = v2, or None unless |det M| = 1."""
    if abs(Vec2(*u1).cross(u2)) <= _EPSILON * max(1.0, Vec2(*u1).norm() * Vec2(*u2).norm()):
        raise DependentInput(f"{tuple(u1)} and {tuple(u2)} are linearly dependent")
    u = np.array([[u1[0], u2[0]], [u1[1], u2[1]]], dtype=float)
    v = np.array([[v1[0], v2[0]], [v1[1], v2[1]]], dtype=float)
    m = PlanarMatrix.from_array(np.linalg.solve(u.T, v.T).T)
    if abs(abs(m.det()) - 1.0) > _EPSILON:
        return None
    return m


# Polygons


@dataclass(frozen=True)
class PlanarPolygon:
    vertices: Tuple[Vec2, ...]
    convex: bool = False

    def __post_init__(self):
        verts = tuple(Vec2(float(p[0]), float(p[1])) for p in self.vertices)
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise DegeneratePolygon(f"polygon needs >= 3 vertices, got {len(verts)}")
        if polygon_area(verts) <= _EPSILON**2:
            raise DegeneratePolygon("polygon must be counterclockwise with positive area")
        if self.convex and not is_convex(verts):
            raise DegeneratePolygon("polygon flagged convex is not strictly convex")
        if not is_simple(verts):
            raise DegeneratePolygon("polygon is self-intersecting")

    def __len__(self) -> int:
        return len(self.vertices)

    def edge(self, i: int) -> Tuple[Vec2, Vec2]:
        n = len(self.vertices)
        return self.vertices[i % n], self.vertices[(i + 1) % n]

    def edge_vector(self, i: int) -> Vec2:
        p, q = self.edge(i)
        return q - p

    def interior_angle(self, i: int) -> float:
        n = len(self.vertices)
        v = self.vertices[i % n]
        nxt = self.vertices[(i + 1) % n] - v
        prv = self.vertices[(i - 1) % n] - v
        return ccw_angle(nxt, prv)

    def transformed(self, m: PlanarMatrix, t: Vec2 = ORIGIN) -> "PlanarPolygon":
        pts = [m.apply(p) + t for p in self.vertices]
        if m.det() < 0:
            pts = pts[::-1]
        return PlanarPolygon(tuple(pts), self.convex)

    def translated(self, t: Vec2) -> "PlanarPolygon":
        return PlanarPolygon(tuple(p + t for p in self.vertices), self.convex)


def polygon_area(vertices: Sequence[Sequence[float]]) -> float:
    pts = np.asarray(vertices, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def polygon_centroid(polygon: PlanarPolygon) -> Vec2:
    """Area centroid of the polygonal region."""
    pts = np.asarray(polygon.vertices, dtype=float)
    x, y = pts[:, 0], pts[:, 1]
    xn, yn = np.roll(x, -1), np.roll(y, -1)
    cross = x * yn - xn * y
    area = 0.5 * cross.sum()
    if area <= _EPSILON**2:
        raise DegeneratePolygon(f"area {area:.3g} too small for a centroid")
    cx = ((x + xn) * cross).sum() / (6.0 * area)
    cy = ((y + yn) * cross).sum() / (6.0 * area)
    return Vec2(float(cx), float(cy))


def is_convex(vertices: Sequence[Vec2]) -> bool:
    n = len(vertices)
    return all(
        orientation(vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]) > 0
        for i in range(n)
    )


def _segments_cross(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool:
    d1 = orientation(q1, q2, p1)
    d2 = orientation(q1, q2, p2)
    d3 = orientation(p1, p2, q1)
    d4 = orientation(p1, p2, q2)
    if d1 * d2 < 0 and d3 * d4 < 0:
        return True
    for d, a, b, c in ((d1, q1, q2, p1), (d2, q1, q2, p2), (d3, p1, p2, q1), (d4, p1, p2, q2)):
        if d == 0 and point_segment_distance(c, a, b) <= _EPSILON:
            return True
    return False


def is_simple(vertices: Sequence[Vec2]) -> bool:
    n = len(vertices)
    for i in range(n):
        a1, a2 = vertices[i], vertices[(i + 1) % n]
        for j in range(i + 1, n):
            if j == i or (j + 1) % n == i or j == (i + 1) % n:
                continue
            b1, b2 = vertices[j], vertices[(j + 1) % n]
            if _segments_cross(a1, a2, b1, b2):
                return False
    return True


def strict_corners(vertices: Sequence[Vec2]) -> List[Vec2]:
    """Drop vertices where the boundary goes straight on."""
    n = len(vertices)
    return [
        vertices[i]
        for i in range(n)
        if orientation(vertices[i - 1], vertices[i], vertices[(i + 1) % n]) != 0
    ]


def diameter(vertices: Iterable[Vec2]) -> float:
    pts = np.asarray(list(vertices), dtype=float)
    diffs = pts[:, None, :] - pts[None, :, :]
    return float(np.sqrt((diffs**2).sum(axis=-1)).max())


def point_in_polygon(p: Vec2, polygon: PlanarPolygon, strict: bool = False) -> bool:
    """Closed (or open, if strict) containment test for a simple polygon."""
    verts = polygon.vertices
    n = len(verts)
    for i in range(n):
        if point_segment_distance(p, verts[i], verts[(i + 1) % n]) <= _EPSILON:
            return not strict
    inside = False
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        if (a.y > p.y) != (b.y > p.y):
            x_cross = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y)
            if p.x < x_cross:
                inside = not inside
    return inside


def regular_polygon(n: int, side: float, center: Vec2 = ORIGIN, start_angle: float = 0.0) -> PlanarPolygon:
    """Regular n-gon with the given side length; first edge along start_angle."""
    circumradius = side / (2.0 * math.sin(math.pi / n))
    first = center + Vec2(0.0, -circumradius).rotated(start_angle - math.pi / n)
    verts = [first]
    edge = Vec2(side, 0.0).rotated(start_angle)
    for k in range(n - 1):
        verts.append(verts[-1] + edge.rotated(k * TWO_PI / n))
    return PlanarPolygon(tuple(verts), convex=True)


def congruence_map(p: PlanarPolygon, q: PlanarPolygon) -> Optional[Tuple[PlanarMatrix, Vec2]]:
    """An isometry x -> A x + t carrying p onto q vertex-by-vertex, if any.

    Tries orientation-preserving matches first, then reflections; within
    each, cyclic offsets in increasing order. The first match wins.
    """
    ps = strict_corners(p.vertices)
    qs = strict_corners(q.vertices)
    n = len(ps)
    if n != len(qs):
        return None
    flip = PlanarMatrix(1.0, 0.0, 0.0, -1.0)
    # reflected copy kept counterclockwise: vertex i is F p_{-i}
    candidates = [
        (PlanarMatrix.identity(), ps),
        (flip, [flip.apply(ps[(-i) % n]) for i in range(n)]),
    ]
    tol = _EPSILON * max(1.0, diameter(qs))
    for pre, pts in candidates:
        e0 = pts[1] - pts[0]
        for k in range(n):
            f0 = qs[(k + 1) % n] - qs[k]
            if abs(e0.norm() - f0.norm()) > tol:
                continue
            rot = PlanarMatrix.rotation(math.atan2(f0.y, f0.x) - math.atan2(e0.y, e0.x))
            t = qs[k] - rot.apply(pts[0])
            if all(vec_close(rot.apply(pts[i]) + t, qs[(i + k) % n], tol) for i in range(n)):
                return rot @ pre, t
    return None
