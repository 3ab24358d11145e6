"""
convex.py -- Embedded convex copies of a planar polygon, and their centroids.

Every edge of a copy starts at a cone point with a saddle connection, so
each candidate is anchored at the start of a saddle connection no longer
than the longest side. The polygon (or its mirror image) is laid along the
connection and the surface is developed across it triangle by triangle:
a candidate survives if no cone point lies inside, the developed pieces
never overlap on the surface, and every corner is a cone point.
"""

import math
import sys
from collections import deque
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from shapely import affinity
from shapely.geometry import LineString, Point
from shapely.geometry import Polygon as ShapelyPolygon

from .errors import DegeneratePolygon, NoConePoints
from .geom_core import (
    TWO_PI,
    PlanarMatrix,
    PlanarPolygon,
    Vec2,
    ccw_angle,
    diameter,
    get_epsilon,
    is_convex,
    polygon_centroid,
    strict_corners,
)
from .saddle import SaddleConnection, connection_from_walk, enumerate_saddle_connections, fan_out
from .surface import SurfacePoint, TranslationSurface
from .tracing import walk
from .triangulation import Triangulation

# Developed triangles per candidate before giving up.
_MAX_TRIANGLES = 20000

# (triangle, shift into the developed frame)
Placed = Tuple[int, Vec2]


@dataclass(frozen=True)
class ConvexCopy:
    region: Tuple[Tuple[int, Tuple[Vec2, ...]], ...]  # (polygon, fragment) in polygon charts
    boundary: Tuple[SaddleConnection, ...]
    developed: PlanarPolygon  # centroid at the origin
    centroid: SurfacePoint
    corner_classes: Tuple[int, ...]

    @property
    def area(self) -> float:
        return sum(ShapelyPolygon(frag).area for _, frag in self.region)


def _shapes(polygon: PlanarPolygon) -> List[List[Vec2]]:
    """Strict corners of the polygon and of its mirror image, both ccw."""
    ps = strict_corners(polygon.vertices)
    n = len(ps)
    flip = PlanarMatrix(1.0, 0.0, 0.0, -1.0)
    return [ps, [flip.apply(ps[(-i) % n]) for i in range(n)]]


def _key(t: int, shift: Vec2) -> Tuple[int, float, float]:
    return t, round(shift.x, 6) + 0.0, round(shift.y, 6) + 0.0


class _Candidate:
    """One placement of the developed polygon R with a corner at a cone point."""

    def __init__(self, surface: TranslationSurface, corners: List[Vec2]):
        self.surface = surface
        self.tri: Triangulation = surface.triangulation
        self.corners = corners
        self.region = ShapelyPolygon(corners)
        scale = max(1.0, diameter(corners))
        self.tol = get_epsilon() * 1000 * scale
        self.area_tol = get_epsilon() * 100 * scale * scale
        self.inner = self.region.buffer(-self.tol)
        self.placed: List[Placed] = []
        self.fragments: List[Tuple[int, Vec2, ShapelyPolygon]] = []

    def develop(self, t0: int, i0: int) -> bool:
        """Flood the triangles meeting the interior of R; False if R is not
        an embedded cone-point-free region."""
        tri = self.tri
        if self.inner.is_empty:
            return False
        start = (t0, -tri.pts[t0][i0])
        seen = {_key(*start)}
        queue = deque([start])
        local: Dict[int, List[ShapelyPolygon]] = {}
        while queue:
            t, shift = queue.popleft()
            self.placed.append((t, shift))
            dev = [p + shift for p in tri.pts[t]]
            for i in range(3):
                if tri.vertices[tri.labels[t][i]].stops and self.inner.contains(Point(dev[i])):
                    return False
            frag = ShapelyPolygon(dev).intersection(self.region)
            if frag.area > self.area_tol and frag.geom_type == "Polygon":
                moved = affinity.translate(frag, -shift.x, -shift.y)
                if any(moved.intersection(other).area > self.area_tol for other in local.get(t, [])):
                    return False
                local.setdefault(t, []).append(moved)
                self.fragments.append((t, shift, frag))
            for e in range(3):
                if not LineString([dev[e], dev[(e + 1) % 3]]).intersects(self.inner):
                    continue
                t2, _ = tri.nbr[t][e]
                nxt = (t2, shift + tri.shift_across(t, e))
                if _key(*nxt) in seen:
                    continue
                if len(seen) > _MAX_TRIANGLES:
                    return False
                seen.add(_key(*nxt))
                queue.append(nxt)
        covered = sum(frag.area for _, _, frag in self.fragments)
        return abs(covered - self.region.area) <= self.area_tol * max(1, len(self.fragments))

    def corner_at(self, r: Vec2, direction: Vec2) -> Optional[Tuple[int, int, Vec2]]:
        """A developed triangle corner at r whose sector holds direction."""
        tri = self.tri
        for t, shift in self.placed:
            for i in range(3):
                if ((tri.pts[t][i] + shift) - r).norm() > self.tol:
                    continue
                offset = ccw_angle(tri.edge(t, i), direction)
                if offset <= tri.angle(t, i) + 1e-9 or offset >= TWO_PI - 1e-9:
                    return t, i, shift
        return None

    def boundary(self) -> Optional[Tuple[List[SaddleConnection], List[int]]]:
        """Trace each side of R as a chain of saddle connections."""
        tri = self.tri
        n = len(self.corners)
        connections: List[SaddleConnection] = []
        classes: List[int] = []
        for k in range(n):
            side = self.corners[(k + 1) % n] - self.corners[k]
            found = self.corner_at(self.corners[k], side)
            if found is None:
                return None
            t, i, _ = found
            vid = tri.labels[t][i]
            if not tri.vertices[vid].stops:
                return None
            classes.append(vid)
            phi = tri.position(t, i, side)
            remaining = side.norm()
            while remaining > self.tol:
                t1, i1, direction = tri.find_corner(vid, phi)
                w = walk(tri, t1, tri.pts[t1][i1], direction, remaining + self.tol, corner=i1)
                if w.hit is None:
                    return None
                connections.append(connection_from_walk(self.surface, tri, vid, phi, w))
                remaining -= w.length
                vid = w.hit[0]
                phi = math.fmod(w.arrival_position(tri) - math.pi + tri.vertices[vid].angle, tri.vertices[vid].angle)
        return connections, classes

    def locate(self, p: Vec2) -> SurfacePoint:
        for t, shift, frag in self.fragments:
            if frag.buffer(self.tol).contains(Point(p)):
                return self.surface.canonical_point(SurfacePoint(self.tri.polygon[t], p - shift))
        raise DegeneratePolygon(f"developed point {tuple(p)} is outside every fragment")

    def result(self) -> Optional[ConvexCopy]:
        traced = self.boundary()
        if traced is None:
            return None
        connections, classes = traced
        developed = PlanarPolygon(tuple(self.corners), convex=True)
        c = polygon_centroid(developed)
        region = tuple(
            (self.tri.polygon[t], tuple(Vec2(x, y) - shift for x, y in list(frag.exterior.coords)[:-1]))
            for t, shift, frag in self.fragments
        )
        return ConvexCopy(
            region=region,
            boundary=tuple(connections),
            developed=developed.translated(-c),
            centroid=self.locate(c),
            corner_classes=tuple(classes),
        )


def _try_anchor(
    surface: TranslationSurface, start: int, phi: float, h: Vec2, shape: Sequence[Vec2], j: int
) -> Optional[ConvexCopy]:
    n = len(shape)
    edge = shape[(j + 1) % n] - shape[j]
    rot = PlanarMatrix.rotation(h.angle() - edge.angle())
    corners = [rot.apply(shape[(j + k) % n] - shape[j]) for k in range(n)]
    candidate = _Candidate(surface, corners)
    t0, i0, _ = surface.triangulation.find_corner(start, phi)
    if not candidate.develop(t0, i0):
        return None
    return candidate.result()


def _copy_key(copy: ConvexCopy) -> Tuple:
    p = copy.centroid
    shape = sorted((round(v.x, 6) + 0.0, round(v.y, 6) + 0.0) for v in copy.developed.vertices)
    return (p.polygon, round(p.position.x, 6) + 0.0, round(p.position.y, 6) + 0.0, tuple(shape))


def find_copies(
    surface: TranslationSurface,
    polygon: PlanarPolygon,
    max_workers: int = 1,
    verbose: bool = False,
) -> List[ConvexCopy]:
    """Maximal embedded convex regions of the surface congruent to polygon."""
    if not surface.sigma:
        raise NoConePoints("the surface has no cone points")
    if not is_convex(strict_corners(polygon.vertices)):
        raise DegeneratePolygon("find_copies needs a convex polygon")
    shapes = _shapes(polygon)
    longest = diameter(polygon.vertices)
    tol = get_epsilon() * 1000 * max(1.0, longest)
    connections = enumerate_saddle_connections(surface, longest + tol, max_workers=max_workers)

    anchors = []
    seen = set()
    for c in connections:
        for start, phi, h in (
            (c.cone_classes[0], c.positions[0], c.holonomy),
            (c.cone_classes[1], c.positions[1], -c.holonomy),
        ):
            for s, shape in enumerate(shapes):
                n = len(shape)
                for j in range(n):
                    if h.norm() > (shape[(j + 1) % n] - shape[j]).norm() + tol:
                        continue
                    key = (start, round(phi, 7), s, j)
                    if key not in seen:
                        seen.add(key)
                        anchors.append((start, phi, h, shapes[s], j))

    results = fan_out(lambda a: _try_anchor(surface, *a), anchors, max_workers)
    copies: Dict[Tuple, ConvexCopy] = {}
    for copy in results:
        if copy is not None:
            copies.setdefault(_copy_key(copy), copy)
    ordered = [copies[k] for k in sorted(copies)]
    if verbose:
        print(
            f"[Convex] {len(ordered)} embedded copies from {len(anchors)} anchor(s), "
            f"{len(connections)} connection(s) up to {longest:.6g}",
            file=sys.stderr,
        )
    return ordered


def centroids(surface: TranslationSurface, polygon: PlanarPolygon, max_workers: int = 1) -> List[SurfacePoint]:
    points: List[SurfacePoint] = []
    for copy in find_copies(surface, polygon, max_workers=max_workers):
        if not any(surface.same_point(copy.centroid, q) for q in points):
            points.append(copy.centroid)
    return sorted(points, key=lambda p: (p.polygon, round(p.position.x, 9), round(p.position.y, 9)))
