"""
tracing.py -- Straight-line flow across edge identifications.

walk() follows a ray through a Triangulation, crossing glued edges by
translation. A ray that meets a vertex stops there if the vertex is in
Sigma and goes straight on otherwise. unfold() develops triangles around
an apex inside open angular wedges and reports every vertex it sees; the
saddle-connection and distance searches are built on it.
"""

import math
from dataclasses import dataclass
from typing import Callable, Iterator, List, Optional, Tuple, Union

from .errors import CornerAmbiguity, SurfaceError
from .geom_core import ORIGIN, Vec2, diameter, get_epsilon, point_segment_distance, vec_close
from .surface import SurfacePoint, TranslationSurface, corner_direction_position
from .triangulation import Triangulation

# Guard against runaway walks.
_MAX_STEPS = 1_000_000


@dataclass(frozen=True)
class GeodesicSegment:
    """Straight path as chords of polygons, in polygon charts."""

    pieces: Tuple[Tuple[int, Vec2, Vec2], ...]

    @property
    def holonomy(self) -> Vec2:
        total = Vec2(0.0, 0.0)
        for _, a, b in self.pieces:
            total = total + (b - a)
        return total

    @property
    def length(self) -> float:
        return sum((b - a).norm() for _, a, b in self.pieces)

    @property
    def start(self) -> SurfacePoint:
        poly, a, _ = self.pieces[0]
        return SurfacePoint(poly, a)

    @property
    def end(self) -> SurfacePoint:
        poly, _, b = self.pieces[-1]
        return SurfacePoint(poly, b)


@dataclass(frozen=True)
class Completed:
    segment: GeodesicSegment


@dataclass(frozen=True)
class HitConePoint:
    segment: GeodesicSegment
    point: SurfacePoint
    cone_class: int


TraceOutcome = Union[Completed, HitConePoint]


@dataclass
class Walk:
    """Raw result of walk(): pieces are (triangle, start, end) in triangle charts."""

    pieces: List[Tuple[int, Vec2, Vec2]]
    length: float
    triangle: int
    position: Vec2
    direction: Vec2
    hit: Optional[Tuple[int, int, int]] = None  # (vertex id, triangle, corner)

    def arrival_position(self, tri: Triangulation) -> float:
        """Angular position, at the hit vertex, of the way back."""
        _, t, j = self.hit
        return tri.position(t, j, -self.direction)


def _vertex_tolerance() -> float:
    return get_epsilon() * 10


def walk(
    tri: Triangulation,
    t: int,
    x: Vec2,
    direction: Vec2,
    max_length: float,
    corner: Optional[int] = None,
) -> Walk:
    """Follow a ray from x in triangle t for at most max_length.

    If corner is given, x is that corner of t and the ray leaves through the
    opposite edge.
    """
    d = direction.unit()
    pieces: List[Tuple[int, Vec2, Vec2]] = []
    travelled = 0.0
    tol = _vertex_tolerance()
    candidates = [(corner + 1) % 3] if corner is not None else [0, 1, 2]
    for _ in range(_MAX_STEPS):
        pts = tri.pts[t]
        remaining = max_length - travelled
        best_s, best_k = math.inf, None
        for k in candidates:
            ek = pts[(k + 1) % 3] - pts[k]
            den = ek.cross(d)
            if den >= -1e-15 * ek.norm():
                continue
            s = ek.cross(pts[k] - x) / den
            if s < best_s:
                best_s, best_k = s, k
        if best_k is None:
            raise CornerAmbiguity(f"no exit from triangle {t} at {tuple(x)} along {tuple(d)}")
        s = max(best_s, 0.0)
        if s > remaining + tol:
            end = x + d * remaining
            pieces.append((t, x, end))
            return Walk(pieces, max_length, t, end, d)
        y = x + d * s
        j = next((j for j in range(3) if (pts[j] - y).norm() <= tol), None)
        if j is not None:
            y = pts[j]
            pieces.append((t, x, y))
            travelled += s
            vid = tri.labels[t][j]
            if tri.vertices[vid].stops:
                return Walk(pieces, travelled, t, y, d, hit=(vid, t, j))
            if travelled >= max_length - tol:
                return Walk(pieces, travelled, t, y, d)
            phi = tri.position(t, j, -d) + math.pi
            t, m, _ = tri.find_corner(vid, phi)
            x = tri.pts[t][m]
            candidates = [(m + 1) % 3]
            continue
        pieces.append((t, x, y))
        travelled += s
        if travelled >= max_length - tol:
            end = x + d * (s - (travelled - max_length))
            pieces[-1] = (t, x, end)
            return Walk(pieces, max_length, t, end, d)
        t2, k2 = tri.nbr[t][best_k]
        x = y + (tri.pts[t2][(k2 + 1) % 3] - tri.pts[t][best_k])
        t = t2
        candidates = [k for k in range(3) if k != k2]
    raise SurfaceError("walk exceeded the step limit")


def polygon_pieces(tri: Triangulation, pieces: List[Tuple[int, Vec2, Vec2]]) -> GeodesicSegment:
    """Convert triangle pieces of a polygon-chart triangulation, merging chords."""
    merged: List[Tuple[int, Vec2, Vec2]] = []
    for t, a, b in pieces:
        poly = tri.polygon[t]
        if poly is None:
            raise SurfaceError("triangle is not in a polygon chart")
        if (b - a).norm() == 0.0 and merged:
            continue
        if merged and merged[-1][0] == poly and vec_close(merged[-1][2], a):
            merged[-1] = (poly, merged[-1][1], b)
        else:
            merged.append((poly, a, b))
    return GeodesicSegment(tuple(merged))


def start_state(
    surface: TranslationSurface,
    point: SurfacePoint,
    direction: Vec2,
    angle_position: Optional[float] = None,
) -> Tuple[int, Vec2, Optional[int]]:
    """Triangle, chart position and corner (if at a vertex) to walk from."""
    tri = surface.triangulation
    corner_ref = surface.corner_at(point)
    if corner_ref is not None:
        cls = surface.vertex_class[corner_ref]
        if angle_position is None:
            angle_position = corner_direction_position(surface, corner_ref, direction)
        t, i, _ = tri.find_corner(cls, angle_position)
        return t, tri.pts[t][i], i
    t, pos = tri.locate(point.polygon, point.position)
    return t, pos, None


def trace_ray(
    surface: TranslationSurface,
    start: SurfacePoint,
    direction: Vec2,
    max_length: float,
    angle_position: Optional[float] = None,
) -> TraceOutcome:
    """Follow the straight line from start until max_length or a cone point.

    From a cone point the direction alone does not pick a sheet; the ray
    leaves the given polygon corner, turning counterclockwise from its
    outgoing edge, unless angle_position is given.
    """
    if direction.norm() <= get_epsilon():
        raise ValueError("direction must be non-zero")
    if not max_length > 0:
        raise ValueError(f"max_length must be positive, got {max_length}")
    tri = surface.triangulation
    t, x, corner = start_state(surface, start, direction, angle_position)
    result = walk(tri, t, x, direction, max_length, corner)
    segment = polygon_pieces(tri, result.pieces)
    if result.hit is None:
        return Completed(segment)
    vid = result.hit[0]
    return HitConePoint(segment, surface.cone_classes[vid].representative, vid)


# Unfolding


@dataclass
class Sighting:
    """A vertex seen from the apex along an unobstructed straight segment."""

    vertex: int
    vector: Vec2
    triangle: int
    corner: int
    walked: Optional[Walk] = None

    def arrival_position(self, tri: Triangulation) -> float:
        if self.walked is not None:
            return self.walked.arrival_position(tri)
        return tri.position(self.triangle, self.corner, -self.vector)


# (triangle, window edge, shift into the apex frame, right bound, left bound)
Wedge = Tuple[int, int, Vec2, Vec2, Vec2]


def clip_window(pa: Vec2, pb: Vec2, lo: Vec2, hi: Vec2) -> Optional[Tuple[Vec2, Vec2]]:
    """Part of segment pa-pb inside the closed cone turning ccw from lo to hi."""
    s0, s1 = 0.0, 1.0
    for g0, g1 in ((lo.cross(pa), lo.cross(pb)), (pa.cross(hi), pb.cross(hi))):
        if g0 < 0 and g1 < 0:
            return None
        if g0 < 0:
            s0 = max(s0, g0 / (g0 - g1))
        elif g1 < 0:
            s1 = min(s1, g0 / (g0 - g1))
    if s0 > s1:
        return None
    d = pb - pa
    return pa + d * s0, pa + d * s1


def _strictly_between(lo: Vec2, x: Vec2, hi: Vec2) -> Tuple[bool, bool]:
    tol = _vertex_tolerance() * max(1.0, x.norm())
    return lo.unit().cross(x) > tol, x.cross(hi.unit()) > tol


def unfold(
    tri: Triangulation,
    wedges: List[Wedge],
    bound: float,
    spawn: Callable[[Vec2], Optional[Sighting]],
) -> Iterator[Sighting]:
    """Develop triangles inside open wedges, up to distance bound.

    Vertices strictly inside a wedge split it. A vertex in Sigma is sighted
    directly; through any other vertex the ray is handed to spawn(), since
    the split wedges no longer contain it.
    """
    stack = list(wedges)
    steps = 0
    while stack:
        steps += 1
        if steps > _MAX_STEPS:
            raise SurfaceError("unfolding exceeded the step limit")
        t, e, shift, lo, hi = stack.pop()
        pa = tri.pts[t][e] + shift
        pb = tri.pts[t][(e + 1) % 3] + shift
        window = clip_window(pa, pb, lo, hi)
        if window is None or point_segment_distance(ORIGIN, *window) > bound:
            continue
        t2, e2 = tri.nbr[t][e]
        shift2 = shift + tri.shift_across(t, e)
        j = (e2 + 2) % 3
        x = tri.pts[t2][j] + shift2
        right_ok, left_ok = _strictly_between(lo, x, hi)
        if right_ok and left_ok:
            if x.norm() <= bound:
                vid = tri.labels[t2][j]
                if tri.vertices[vid].stops:
                    yield Sighting(vid, x, t2, j)
                else:
                    found = spawn(x)
                    if found is not None:
                        yield found
            stack.append((t2, (e2 + 1) % 3, shift2, lo, x))
            stack.append((t2, j, shift2, x, hi))
        elif not right_ok:
            stack.append((t2, j, shift2, lo, hi))
        else:
            stack.append((t2, (e2 + 1) % 3, shift2, lo, hi))


def _walk_sighting(tri: Triangulation, w: Walk) -> Optional[Sighting]:
    if w.hit is None:
        return None
    vid, t, j = w.hit
    return Sighting(vid, w.direction * w.length, t, j, walked=w)


def sightings_from_corner(tri: Triangulation, t0: int, i0: int, bound: float) -> Iterator[Sighting]:
    """Everything seen within bound from vertex corner (t0, i0), start ray
    included, end ray excluded."""
    apex = tri.pts[t0][i0]

    def spawn(direction: Vec2) -> Optional[Sighting]:
        return _walk_sighting(tri, walk(tri, t0, apex, direction, bound, corner=i0))

    start = spawn(tri.edge(t0, i0))
    if start is not None:
        yield start
    lo = tri.pts[t0][(i0 + 1) % 3] - apex
    hi = tri.pts[t0][(i0 + 2) % 3] - apex
    yield from unfold(tri, [(t0, (i0 + 1) % 3, -apex, lo, hi)], bound, spawn)


def sightings_from_point(tri: Triangulation, t0: int, x0: Vec2, bound: float) -> Iterator[Sighting]:
    """Everything seen within bound from a non-vertex point x0 of triangle t0."""
    tol = _vertex_tolerance()
    pts = tri.pts[t0]

    def spawn(direction: Vec2) -> Optional[Sighting]:
        return _walk_sighting(tri, walk(tri, t0, x0, direction, bound))

    on_edge = next(
        (k for k in range(3) if point_segment_distance(x0, pts[k], pts[(k + 1) % 3]) <= tol), None
    )
    wedges: List[Wedge] = []
    targets: List[Vec2] = []
    if on_edge is None:
        for k in range(3):
            wedges.append((t0, k, -x0, pts[k] - x0, pts[(k + 1) % 3] - x0))
            targets.append(pts[k] - x0)
    else:
        k = on_edge
        u, f = tri.nbr[t0][k]
        xu = x0 - tri.shift_across(t0, k)
        qts = tri.pts[u]
        for e in ((k + 1) % 3, (k + 2) % 3):
            wedges.append((t0, e, -x0, pts[e] - x0, pts[(e + 1) % 3] - x0))
        for e in ((f + 1) % 3, (f + 2) % 3):
            wedges.append((u, e, -xu, qts[e] - xu, qts[(e + 1) % 3] - xu))
        targets.extend(p - x0 for p in pts)
        targets.append(qts[(f + 2) % 3] - xu)
    for direction in targets:
        if direction.norm() > bound + tol:
            continue
        found = spawn(direction)
        if found is not None:
            yield found
    yield from unfold(tri, wedges, bound, spawn)


def distance_to_cone_set(surface: TranslationSurface, point: SurfacePoint, search_radius: float) -> float:
    """Flat distance from point to Sigma, or math.inf if Sigma is farther
    than search_radius."""
    tri = surface.triangulation
    corner_ref = surface.corner_at(point)
    if corner_ref is not None:
        vid = surface.vertex_class[corner_ref]
        if tri.vertices[vid].stops:
            return 0.0
        seen: List[Sighting] = []
        for t, i in tri.corners_of(vid):
            seen.extend(sightings_from_corner(tri, t, i, search_radius))
    else:
        t, pos = tri.locate(point.polygon, point.position)
        seen = list(sightings_from_point(tri, t, pos, search_radius))
    distances = [s.vector.norm() for s in seen if tri.vertices[s.vertex].stops]
    best = min(distances, default=math.inf)
    return best if best <= search_radius + _vertex_tolerance() else math.inf


def nearest_cone_distance(surface: TranslationSurface, point: SurfacePoint, max_doublings: int = 8) -> float:
    """distance_to_cone_set with the radius doubled from the largest polygon
    diameter until Sigma is in reach; math.inf if it never is."""
    radius = max(diameter(p.vertices) for p in surface.polygons)
    for _ in range(max_doublings + 1):
        d = distance_to_cone_set(surface, point, radius)
        if d < math.inf:
            return d
        radius *= 2
    return math.inf
