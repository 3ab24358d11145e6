"""
triangulation.py -- Triangulations of translation surfaces.

Each triangle lives in its own chart: three counterclockwise Vec2 corners,
three vertex ids and three neighbour half-edges. Edge e joins corner e to
corner e+1. Gluings are translations, recovered from the coordinates.

Every corner also carries an angular coordinate alpha in [0, total angle)
of its vertex, the position of its outgoing edge around the cone point.
The next corner counterclockwise around a vertex is the neighbour across
the incoming edge, and its alpha is this alpha plus the corner angle.
Insertions and flips keep alpha consistent, so two triangulations of the
same surface can exchange directions at shared vertices.
"""

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .errors import DegeneratePolygon, SurfaceError
from .geom_core import (
    TWO_PI,
    Vec2,
    ccw_angle,
    get_epsilon,
    orientation,
    point_segment_distance,
)

HalfEdge = Tuple[int, int]

# Flip loop guard, per triangle.
_MAX_FLIPS_PER_TRIANGLE = 10000


@dataclass
class VertexInfo:
    """One vertex of a triangulation: a cone class or an inserted point."""

    kind: str  # "sigma" | "flat" | "marked"
    angle: float
    name: str = ""

    @property
    def stops(self) -> bool:
        """Geodesics end here."""
        return self.kind == "sigma"

    @property
    def label(self) -> str:
        if self.kind == "sigma":
            return f"sigma:{int(round(self.angle / TWO_PI))}"
        if self.kind == "marked":
            return "marked:" + self.name.rstrip("0123456789")
        return "flat"


@dataclass
class Cell:
    """A Delaunay cell: triangles merged across co-circular edges, developed
    into one chart. Boundary half-edges run counterclockwise."""

    index: int
    triangles: List[int]
    shifts: Dict[int, Vec2]
    half_edges: List[HalfEdge]
    starts: List[Vec2]
    labels: List[int]

    def __len__(self) -> int:
        return len(self.half_edges)

    @property
    def edge_vectors(self) -> List[Vec2]:
        n = len(self.starts)
        return [self.starts[(k + 1) % n] - self.starts[k] for k in range(n)]


def _wrap(value: float, total: float) -> float:
    value = math.fmod(value, total)
    if value < 0:
        value += total
    if value > total - 1e-12:
        value = 0.0
    return value


def _point_in_triangle(p: Vec2, a: Vec2, b: Vec2, c: Vec2, tol: float) -> bool:
    for u, v in ((a, b), (b, c), (c, a)):
        e = v - u
        if e.cross(p - u) < -tol * max(1.0, e.norm()):
            return False
    return True


def _min_angle(a: Vec2, b: Vec2, c: Vec2) -> float:
    return min(ccw_angle(b - a, c - a), ccw_angle(c - b, a - b), ccw_angle(a - c, b - c))


def ear_clip(vertices: Sequence[Vec2]) -> List[Tuple[int, int, int]]:
    """Triangulate a simple counterclockwise polygon by its own vertices.

    Among the valid ears the best-shaped one (largest minimum angle) is cut
    first. Straight-angle vertices are never ear tips.
    """
    eps = get_epsilon()
    remaining = list(range(len(vertices)))
    triangles: List[Tuple[int, int, int]] = []
    while len(remaining) > 3:
        best = None
        best_quality = -1.0
        m = len(remaining)
        for p in range(m):
            ia, ib, ic = remaining[p - 1], remaining[p], remaining[(p + 1) % m]
            a, b, c = vertices[ia], vertices[ib], vertices[ic]
            if orientation(a, b, c) <= 0:
                continue
            blocked = False
            for iq in remaining:
                if iq in (ia, ib, ic):
                    continue
                if _point_in_triangle(vertices[iq], a, b, c, eps):
                    blocked = True
                    break
            if blocked:
                continue
            quality = _min_angle(a, b, c)
            if quality > best_quality + 1e-12:
                best, best_quality = p, quality
        if best is None:
            raise DegeneratePolygon("ear clipping found no ear; polygon is not simple")
        ia, ib, ic = remaining[best - 1], remaining[best], remaining[(best + 1) % m]
        triangles.append((ia, ib, ic))
        remaining.pop(best)
    triangles.append((remaining[0], remaining[1], remaining[2]))
    return triangles


class Triangulation:
    """Mutable triangulation of a translation surface.

    Triangles produced by ear clipping or point insertion keep the chart of
    the polygon they lie in (`polygon[t]`); a flip clears it.
    """

    def __init__(self, vertices: List[VertexInfo]):
        self.vertices = vertices
        self.pts: List[List[Vec2]] = []
        self.labels: List[List[int]] = []
        self.nbr: List[List[HalfEdge]] = []
        self.alpha: List[List[float]] = []
        self.polygon: List[Optional[int]] = []

    def __len__(self) -> int:
        return len(self.pts)

    def __repr__(self) -> str:
        return f"Triangulation with {len(self.pts)} triangles, {len(self.vertices)} vertices"

    def copy(self) -> "Triangulation":
        other = Triangulation(self.vertices)
        other.pts = [list(p) for p in self.pts]
        other.labels = [list(l) for l in self.labels]
        other.nbr = [list(n) for n in self.nbr]
        other.alpha = [list(a) for a in self.alpha]
        other.polygon = list(self.polygon)
        return other

    # Construction

    @classmethod
    def from_polygons(
        cls,
        polygons: Sequence[Sequence[Vec2]],
        partner: Dict[HalfEdge, HalfEdge],
        corner_vertex: Dict[HalfEdge, int],
        corner_offset: Dict[HalfEdge, float],
        vertices: List[VertexInfo],
    ) -> "Triangulation":
        """Ear-clip every polygon and glue the pieces.

        partner maps polygon edge (i, k) to its paired edge; corner_vertex and
        corner_offset give, per polygon corner, its vertex id and the alpha
        of the polygon edge leaving it.
        """
        tri = cls(vertices)
        boundary: Dict[HalfEdge, HalfEdge] = {}
        for i, verts in enumerate(polygons):
            n = len(verts)
            diagonal: Dict[Tuple[int, int], HalfEdge] = {}
            for ia, ib, ic in ear_clip(verts):
                t = len(tri.pts)
                ids = (ia, ib, ic)
                tri.pts.append([verts[ia], verts[ib], verts[ic]])
                tri.labels.append([corner_vertex[(i, u)] for u in ids])
                tri.nbr.append([(-1, -1)] * 3)
                tri.polygon.append(i)
                alphas = []
                for e, u in enumerate(ids):
                    poly_edge = verts[(u + 1) % n] - verts[u]
                    tri_edge = verts[ids[(e + 1) % 3]] - verts[u]
                    vid = corner_vertex[(i, u)]
                    offset = corner_offset[(i, u)] + ccw_angle(poly_edge, tri_edge)
                    alphas.append(_wrap(offset, vertices[vid].angle))
                tri.alpha.append(alphas)
                for e in range(3):
                    u, w = ids[e], ids[(e + 1) % 3]
                    if w == (u + 1) % n:
                        boundary[(i, u)] = (t, e)
                    elif (w, u) in diagonal:
                        t2, e2 = diagonal.pop((w, u))
                        tri.nbr[t][e] = (t2, e2)
                        tri.nbr[t2][e2] = (t, e)
                    else:
                        diagonal[(u, w)] = (t, e)
            if diagonal:
                raise DegeneratePolygon(f"polygon {i}: unmatched diagonals after ear clipping")
        for ref, half in boundary.items():
            tri.nbr[half[0]][half[1]] = boundary[partner[ref]]
        return tri

    # Geometry helpers

    def edge(self, t: int, e: int) -> Vec2:
        p = self.pts[t]
        return p[(e + 1) % 3] - p[e]

    def angle(self, t: int, i: int) -> float:
        p = self.pts[t]
        return ccw_angle(p[(i + 1) % 3] - p[i], p[(i + 2) % 3] - p[i])

    def shift_across(self, t: int, e: int) -> Vec2:
        """Translation carrying the neighbour's chart into t's chart."""
        t2, e2 = self.nbr[t][e]
        return self.pts[t][e] - self.pts[t2][(e2 + 1) % 3]

    def opposite(self, t: int, e: int) -> Vec2:
        t2, e2 = self.nbr[t][e]
        return self.pts[t2][(e2 + 2) % 3] + self.shift_across(t, e)

    def circumcircle(self, t: int) -> Tuple[Vec2, float]:
        a, b, c = self.pts[t]
        bx, by = b.x - a.x, b.y - a.y
        cx, cy = c.x - a.x, c.y - a.y
        d = 2.0 * (bx * cy - by * cx)
        ux = (cy * (bx * bx + by * by) - by * (cx * cx + cy * cy)) / d
        uy = (bx * (cx * cx + cy * cy) - cx * (bx * bx + by * by)) / d
        return Vec2(a.x + ux, a.y + uy), math.hypot(ux, uy)

    def contains(self, t: int, p: Vec2) -> bool:
        a, b, c = self.pts[t]
        return _point_in_triangle(p, a, b, c, get_epsilon())

    def locate(self, polygon_index: int, p: Vec2) -> Tuple[int, Vec2]:
        """Triangle of a polygon-chart triangulation containing p."""
        for t, poly in enumerate(self.polygon):
            if poly == polygon_index and self.contains(t, p):
                return t, p
        raise SurfaceError(f"point {tuple(p)} is not inside polygon {polygon_index}")

    def vertex_at(self, t: int, p: Vec2) -> Optional[int]:
        """Corner index of t within tolerance of p, if any."""
        tol = get_epsilon() * 10
        for i in range(3):
            if (self.pts[t][i] - p).norm() <= tol:
                return i
        return None

    # Corners and angular positions

    def corners_of(self, vid: int) -> List[HalfEdge]:
        return [(t, i) for t in range(len(self.pts)) for i in range(3) if self.labels[t][i] == vid]

    def vertex_ids(self) -> Set[int]:
        """Ids of the vertices that still have corners."""
        return {v for labels in self.labels for v in labels}

    def position(self, t: int, i: int, direction: Vec2) -> float:
        """Angular position around vertex labels[t][i] of a direction leaving corner (t, i).

        The direction is clamped into the corner's sector, so a direction a
        rounding error clockwise of the outgoing edge reads as that edge and
        not a full turn further on.
        """
        vid = self.labels[t][i]
        offset = ccw_angle(self.edge(t, i), direction)
        width = self.angle(t, i)
        if offset > width:
            offset = 0.0 if TWO_PI - offset < offset - width else width
        return _wrap(self.alpha[t][i] + offset, self.vertices[vid].angle)

    def find_corner(self, vid: int, phi: float) -> Tuple[int, int, Vec2]:
        """Corner of vertex vid whose sector holds angular position phi,
        with the chart direction of phi there."""
        total = self.vertices[vid].angle
        phi = _wrap(phi, total)
        tol = get_epsilon() * 100
        best = None
        best_gap = math.inf
        for t, i in self.corners_of(vid):
            offset = _wrap(phi - self.alpha[t][i], total)
            if offset > total - tol:
                offset = 0.0
            width = self.angle(t, i)
            if offset < width - tol:
                return t, i, self.edge(t, i).rotated(offset).unit()
            gap = min(abs(offset - width), abs(total - offset))
            if gap < best_gap:
                best, best_gap = (t, i, offset), gap
        if best is None:
            raise SurfaceError(f"vertex {vid} has no corners")
        t, i, offset = best
        return t, i, self.edge(t, i).rotated(offset).unit()

    # Local modifications

    def _relink(self, old_to_new: Dict[HalfEdge, HalfEdge], outer: Dict[HalfEdge, HalfEdge]) -> None:
        """Point the new half-edges at their outer neighbours and back."""
        for new_half, old_nbr in outer.items():
            target = old_to_new.get(old_nbr, old_nbr)
            self.nbr[new_half[0]][new_half[1]] = target
            self.nbr[target[0]][target[1]] = new_half

    def _rotated(self, t: int, e: int):
        """Corners of t listed so that edge e comes first."""
        idx = [e % 3, (e + 1) % 3, (e + 2) % 3]
        return (
            [self.pts[t][k] for k in idx],
            [self.labels[t][k] for k in idx],
            [self.nbr[t][k] for k in idx],
            [self.alpha[t][k] for k in idx],
            idx,
        )

    def _set(self, t: int, pts, labels, alphas, polygon: Optional[int]) -> None:
        self.pts[t] = list(pts)
        self.labels[t] = list(labels)
        self.alpha[t] = [_wrap(a, self.vertices[v].angle) for a, v in zip(alphas, labels)]
        self.nbr[t] = [(-1, -1)] * 3
        self.polygon[t] = polygon

    def _new(self) -> int:
        self.pts.append([])
        self.labels.append([])
        self.nbr.append([(-1, -1)] * 3)
        self.alpha.append([])
        self.polygon.append(None)
        return len(self.pts) - 1

    def insert_point(self, t: int, z: Vec2, vid: int) -> None:
        """Make z (in t's chart) a vertex with id vid."""
        tol = get_epsilon() * 10
        for e in range(3):
            a, b = self.pts[t][e], self.pts[t][(e + 1) % 3]
            if point_segment_distance(z, a, b) <= tol:
                self._split_edge(t, e, z, vid)
                return
        self._split_face(t, z, vid)

    def _split_face(self, t: int, z: Vec2, vid: int) -> None:
        (p0, p1, p2), (l0, l1, l2), (n0, n1, n2), (a0, a1, a2), _ = self._rotated(t, 0)
        poly = self.polygon[t]
        zang = lambda w: (w - z).angle()
        t1, t2 = self._new(), self._new()
        # (p0,p1,z) (p1,p2,z) (p2,p0,z)
        ang = lambda u, v, w: ccw_angle(v - u, w - u)
        self._set(t, (p0, p1, z), (l0, l1, vid), (a0, a1 + ang(p1, p2, z), zang(p0)), poly)
        self._set(t1, (p1, p2, z), (l1, l2, vid), (a1, a2 + ang(p2, p0, z), zang(p1)), poly)
        self._set(t2, (p2, p0, z), (l2, l0, vid), (a2, a0 + ang(p0, p1, z), zang(p2)), poly)
        self.nbr[t][1], self.nbr[t1][2] = (t1, 2), (t, 1)
        self.nbr[t1][1], self.nbr[t2][2] = (t2, 2), (t1, 1)
        self.nbr[t2][1], self.nbr[t][2] = (t, 2), (t2, 1)
        old_to_new = {(t, 0): (t, 0), (t, 1): (t1, 0), (t, 2): (t2, 0)}
        self._relink(old_to_new, {(t, 0): n0, (t1, 0): n1, (t2, 0): n2})

    def _split_edge(self, t: int, e: int, z: Vec2, vid: int) -> None:
        u, f = self.nbr[t][e]
        if u == t:
            raise SurfaceError("cannot split an edge glued to its own triangle")
        (p0, p1, p2), (l0, l1, l2), (_, tn1, tn2), (a0, a1, a2), tidx = self._rotated(t, e)
        (q0, q1, q2), (m0, m1, m2), (_, un1, un2), (b0, b1, b2), uidx = self._rotated(u, f)
        zq = z - (p0 - q1)
        tpoly, upoly = self.polygon[t], self.polygon[u]
        ang = lambda x, y, w: ccw_angle(y - x, w - x)
        zt = lambda w: (w - z).angle()
        zu = lambda w: (w - zq).angle()
        B, D = self._new(), self._new()
        # A=(p0,z,p2) in t, B=(z,p1,p2), C=(q0,zq,q2) in u, D=(zq,q1,q2)
        self._set(t, (p0, z, p2), (l0, vid, l2), (a0, zt(p2), a2), tpoly)
        self._set(B, (z, p1, p2), (vid, l1, l2), (zt(p1), a1, a2 + ang(p2, p0, z)), tpoly)
        self._set(u, (q0, zq, q2), (m0, vid, m2), (b0, zu(q2), b2), upoly)
        self._set(D, (zq, q1, q2), (vid, m1, m2), (zu(q1), b1, b2 + ang(q2, q0, zq)), upoly)
        inner = [((t, 0), (D, 0)), ((B, 0), (u, 0)), ((t, 1), (B, 2)), ((u, 1), (D, 2))]
        for h1, h2 in inner:
            self.nbr[h1[0]][h1[1]] = h2
            self.nbr[h2[0]][h2[1]] = h1
        old_to_new = {
            (t, tidx[1]): (B, 1),
            (t, tidx[2]): (t, 2),
            (u, uidx[1]): (D, 1),
            (u, uidx[2]): (u, 2),
        }
        self._relink(old_to_new, {(t, 2): tn2, (B, 1): tn1, (u, 2): un2, (D, 1): un1})

    def flip(self, t: int, e: int) -> None:
        """Replace the diagonal (t, e) of the quadrilateral t + neighbour."""
        u, f = self.nbr[t][e]
        if u == t:
            raise SurfaceError("cannot flip an edge glued to its own triangle")
        tau = self.shift_across(t, e)
        (p0, p1, p2), (l0, l1, l2), (_, tn1, tn2), (a0, a1, a2), tidx = self._rotated(t, e)
        (_, _, q2), (_, _, m2), (_, un1, un2), (_, b1, b2), uidx = self._rotated(u, f)
        x = q2 + tau
        # T1=(p0,x,p2) in slot t, T2=(x,p1,p2) in slot u
        ang = lambda o, v, w: ccw_angle(v - o, w - o)
        self._set(t, (p0, x, p2), (l0, m2, l2), (b1, b2 + ang(x, p1, p2), a2), None)
        self._set(u, (x, p1, p2), (m2, l1, l2), (b2, a1, a2 + ang(p2, p0, x)), None)
        self.nbr[t][1], self.nbr[u][2] = (u, 2), (t, 1)
        old_to_new = {
            (u, uidx[1]): (t, 0),
            (u, uidx[2]): (u, 0),
            (t, tidx[1]): (u, 1),
            (t, tidx[2]): (t, 2),
        }
        self._relink(old_to_new, {(t, 0): un1, (u, 0): un2, (u, 1): tn1, (t, 2): tn2})

    # Vertex removal

    def _star(self, vid: int) -> List[HalfEdge]:
        """Corners of vid in counterclockwise order."""
        corners = self.corners_of(vid)
        if not corners:
            raise SurfaceError(f"vertex {vid} has no corners")
        ring = [corners[0]]
        while True:
            t, i = ring[-1]
            nxt = tuple(self.nbr[t][(i + 2) % 3])
            if nxt == ring[0]:
                return ring
            if len(ring) >= len(corners):
                raise SurfaceError(f"corners of vertex {vid} do not close up")
            ring.append(nxt)

    def _shrink_star(self, vid: int) -> bool:
        """Flip one edge at vid that lowers its corner count; False if none can."""
        corners = sorted(self.corners_of(vid), key=lambda c: -self.labels[c[0]].count(vid))
        for t, i in corners:
            for e in (i, (i + 2) % 3):
                u, f = self.nbr[t][e]
                if u == t:
                    continue
                p0, p1, p2 = (self.pts[t][(e + k) % 3] for k in range(3))
                x = self.opposite(t, e)
                if orientation(p0, x, p2) <= 0 or orientation(x, p1, p2) <= 0:
                    continue
                l0, l1, l2 = (self.labels[t][(e + k) % 3] for k in range(3))
                m2 = self.labels[u][(f + 2) % 3]
                before = self.labels[t].count(vid) + self.labels[u].count(vid)
                if [l0, m2, l2].count(vid) + [m2, l1, l2].count(vid) < before:
                    self.flip(t, e)
                    return True
        return False

    def _drop(self, dead: Iterable[int]) -> None:
        """Delete triangles nothing points at any more and renumber the rest."""
        dead = set(dead)
        keep = [t for t in range(len(self.pts)) if t not in dead]
        index = {t: k for k, t in enumerate(keep)}
        self.pts = [self.pts[t] for t in keep]
        self.labels = [self.labels[t] for t in keep]
        self.alpha = [self.alpha[t] for t in keep]
        self.polygon = [self.polygon[t] for t in keep]
        self.nbr = [[(index[u], f) for u, f in self.nbr[t]] for t in keep]

    def remove_vertex(self, vid: int) -> None:
        """Delete a vertex of total angle 2pi.

        Edges at the vertex are flipped until no triangle holds it twice;
        its star is then developed into one chart and ear-clipped again.
        Alpha of the surviving corners is kept.
        """
        if abs(self.vertices[vid].angle - TWO_PI) > 1e-9:
            raise SurfaceError(f"vertex {vid} is a cone point and cannot be removed")
        for _ in range(_MAX_FLIPS_PER_TRIANGLE):
            ring = self._star(vid)
            if len({t for t, _ in ring}) == len(ring):
                break
            if not self._shrink_star(vid):
                raise SurfaceError(f"no flip clears the star of vertex {vid}")
        else:
            raise SurfaceError(f"star of vertex {vid} did not clear")

        shifts = [Vec2(0.0, 0.0)]
        for t, i in ring:
            shifts.append(shifts[-1] + self.shift_across(t, (i + 2) % 3))
        if shifts.pop().norm() > get_epsilon() * 1000:
            raise SurfaceError(f"star of vertex {vid} does not develop around a flat point")

        k = len(ring)
        ring_pts = [self.pts[t][(i + 1) % 3] + s for (t, i), s in zip(ring, shifts)]
        ring_labels = [self.labels[t][(i + 1) % 3] for t, i in ring]
        ring_alpha = [self.alpha[t][(i + 1) % 3] for t, i in ring]
        old = [(t, (i + 1) % 3) for t, i in ring]
        outer = [tuple(self.nbr[t][e]) for t, e in old]
        ears = ear_clip(ring_pts)
        slots = [t for t, _ in ring]

        old_to_new: Dict[HalfEdge, HalfEdge] = {}
        links: Dict[HalfEdge, HalfEdge] = {}
        diagonal: Dict[Tuple[int, int], HalfEdge] = {}
        for slot, ids in zip(slots, ears):
            alphas = []
            for e, u in enumerate(ids):
                side = ring_pts[(u + 1) % k] - ring_pts[u]
                alphas.append(ring_alpha[u] + ccw_angle(side, ring_pts[ids[(e + 1) % 3]] - ring_pts[u]))
            self._set(slot, [ring_pts[u] for u in ids], [ring_labels[u] for u in ids], alphas, None)
            for e in range(3):
                u, w = ids[e], ids[(e + 1) % 3]
                if w == (u + 1) % k:
                    old_to_new[old[u]] = (slot, e)
                    links[(slot, e)] = outer[u]
                elif (w, u) in diagonal:
                    other = diagonal.pop((w, u))
                    self.nbr[slot][e] = other
                    self.nbr[other[0]][other[1]] = (slot, e)
                else:
                    diagonal[(u, w)] = (slot, e)
        self._relink(old_to_new, links)
        self._drop(slots[len(ears):])

    # Delaunay

    def _circle_tolerance(self, radius: float) -> float:
        return get_epsilon() * 100 * max(1.0, radius)

    def edge_status(self, t: int, e: int) -> int:
        """-1 if the edge must flip, 0 if co-circular, +1 if strictly Delaunay."""
        u, _ = self.nbr[t][e]
        if u == t:
            return 1
        center, radius = self.circumcircle(t)
        dist = (self.opposite(t, e) - center).norm()
        tol = self._circle_tolerance(radius)
        if dist < radius - tol:
            return -1
        if dist <= radius + tol:
            return 0
        return 1

    def make_delaunay(self) -> int:
        """Flip until every edge is Delaunay. Returns the number of flips."""
        stack = [(t, e) for t in range(len(self.pts)) for e in range(3)]
        flips = 0
        limit = _MAX_FLIPS_PER_TRIANGLE * max(1, len(self.pts))
        while stack:
            t, e = stack.pop()
            if self.edge_status(t, e) >= 0:
                continue
            u, _ = self.nbr[t][e]
            self.flip(t, e)
            flips += 1
            if flips > limit:
                raise SurfaceError("Delaunay flip loop did not terminate")
            stack.extend((t, k) for k in range(3))
            stack.extend((u, k) for k in range(3))
        return flips

    def is_delaunay(self) -> bool:
        return all(self.edge_status(t, e) >= 0 for t in range(len(self.pts)) for e in range(3))

    def cells(self) -> Tuple[List[Cell], Dict[HalfEdge, Tuple[int, int]]]:
        """Merge triangles across co-circular edges.

        Returns the cells and a map from boundary half-edge to
        (cell index, boundary position).
        """
        n = len(self.pts)
        parent = list(range(n))

        def find(a: int) -> int:
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        merged = set()
        for t in range(n):
            for e in range(3):
                u, f = self.nbr[t][e]
                if u != t and self.edge_status(t, e) == 0:
                    merged.add((t, e))
                    merged.add((u, f))
                    ra, rb = find(t), find(u)
                    if ra != rb:
                        parent[max(ra, rb)] = min(ra, rb)

        groups: Dict[int, List[int]] = {}
        for t in range(n):
            groups.setdefault(find(t), []).append(t)

        cells: List[Cell] = []
        lookup: Dict[HalfEdge, Tuple[int, int]] = {}
        for members in sorted(groups.values()):
            shifts: Dict[int, Vec2] = {members[0]: Vec2(0.0, 0.0)}
            queue = [members[0]]
            while queue:
                t = queue.pop(0)
                for e in range(3):
                    if (t, e) not in merged:
                        continue
                    u, f = self.nbr[t][e]
                    if u not in shifts:
                        shifts[u] = shifts[t] + self.pts[t][e] - self.pts[u][(f + 1) % 3]
                        queue.append(u)
            edges = []
            for t in members:
                for e in range(3):
                    if (t, e) not in merged:
                        edges.append(((t, e), self.pts[t][e] + shifts[t], self.pts[t][(e + 1) % 3] + shifts[t]))
            edges.sort(key=lambda item: item[0])
            ordered = [edges.pop(0)]
            tol = get_epsilon() * 1000
            while edges:
                end = ordered[-1][2]
                k = next((j for j, item in enumerate(edges) if (item[1] - end).norm() <= tol), None)
                if k is None:
                    raise SurfaceError("Delaunay cell boundary does not close")
                ordered.append(edges.pop(k))
            index = len(cells)
            cell = Cell(
                index=index,
                triangles=members,
                shifts=shifts,
                half_edges=[item[0] for item in ordered],
                starts=[item[1] for item in ordered],
                labels=[self.labels[h[0]][h[1]] for h, _, _ in ordered],
            )
            for pos, half in enumerate(cell.half_edges):
                lookup[half] = (index, pos)
            cells.append(cell)
        return cells, lookup

    def iter_edges(self) -> Iterator[HalfEdge]:
        """Each undirected edge once."""
        for t in range(len(self.pts)):
            for e in range(3):
                if (t, e) <= self.nbr[t][e]:
                    yield t, e

    def num_edges(self) -> int:
        return sum(1 for _ in self.iter_edges())
