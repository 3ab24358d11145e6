"""
saddle.py -- Saddle connections and holonomy sets.

enumerate_saddle_connections() unfolds the surface around every corner of
every cone point (tracing.sightings_from_corner). Each connection is seen
once from either end; a sighting is kept unless one of its ends was already
used by a kept connection, and the kept one is rebuilt from its own corner
and vector. Work can fan out per corner on a thread pool; the merged result
is sorted, so it does not depend on the worker count.

saddle_connections_by_crossings() is a slower, separate search over
sequences of crossed edges, used to cross-check the unfolding.
"""

import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, Iterable, List, Optional, Sequence, Tuple

from .errors import NoConePoints, SurfaceError
from .geom_core import (
    ORIGIN,
    TWO_PI,
    PlanarMatrix,
    Vec2,
    ccw_angle,
    get_epsilon,
    point_segment_distance,
    vec_close,
)
from .surface import SurfacePoint, TranslationSurface
from .tracing import GeodesicSegment, Walk, polygon_pieces, sightings_from_corner, walk
from .triangulation import Triangulation

_DEFAULT_MAX_WORKERS = int(os.getenv("FINITE_VEECH_MAX_WORKERS", "1"))
_DEFAULT_MAX_DOUBLINGS = int(os.getenv("FINITE_VEECH_MAX_DOUBLINGS", "8"))

# Angular positions closer than this are the same direction.
_SAME_DIRECTION = 1e-7


@dataclass(frozen=True)
class SaddleConnection:
    segment: GeodesicSegment
    endpoints: Tuple[SurfacePoint, SurfacePoint]
    cone_classes: Tuple[int, int]
    positions: Tuple[float, float]  # angular position of the way out at each end

    @property
    def holonomy(self) -> Vec2:
        return self.segment.holonomy

    @property
    def length(self) -> float:
        return self.segment.length

    @property
    def direction(self) -> float:
        return self.holonomy.angle()

    def reversed(self) -> "SaddleConnection":
        pieces = tuple((poly, b, a) for poly, a, b in reversed(self.segment.pieces))
        return SaddleConnection(
            GeodesicSegment(pieces),
            (self.endpoints[1], self.endpoints[0]),
            (self.cone_classes[1], self.cone_classes[0]),
            (self.positions[1], self.positions[0]),
        )


def _sort_key(c: SaddleConnection):
    return round(c.length, 9), round(c.direction, 9), c.cone_classes, c.positions


def _oriented(c: SaddleConnection) -> SaddleConnection:
    """c or its reverse, whichever starts at the smaller (class, position)."""
    if (c.cone_classes[1], c.positions[1]) < (c.cone_classes[0], c.positions[0]):
        return c.reversed()
    return c


def _snapped(phi: float, total: float) -> float:
    return 0.0 if phi > total - _SAME_DIRECTION else phi


def fan_out(fn: Callable, items: Sequence, max_workers: int) -> List:
    if max_workers <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(fn, items))


def sigma_corners(tri: Triangulation) -> List[Tuple[int, int]]:
    return [
        (t, i)
        for t in range(len(tri))
        for i in range(3)
        if tri.vertices[tri.labels[t][i]].stops
    ]


@dataclass(frozen=True)
class _Record:
    """A cone point seen from corner (triangle, corner) along vector."""

    start: int
    start_position: float
    end: int
    end_position: float
    vector: Vec2
    triangle: int
    corner: int
    walked: Optional[Walk] = None

    @property
    def ends(self) -> Tuple[Tuple[int, float], Tuple[int, float]]:
        return (self.start, self.start_position), (self.end, self.end_position)


def _corner_records(tri: Triangulation, t: int, i: int, bound: float) -> List[_Record]:
    records = []
    start = tri.labels[t][i]
    for seen in sightings_from_corner(tri, t, i, bound):
        if not tri.vertices[seen.vertex].stops or seen.vector.norm() > bound:
            continue
        records.append(
            _Record(
                start,
                _snapped(tri.position(t, i, seen.vector), tri.vertices[start].angle),
                seen.vertex,
                _snapped(seen.arrival_position(tri), tri.vertices[seen.vertex].angle),
                seen.vector,
                t,
                i,
                seen.walked,
            )
        )
    return records


class _EndKeys:
    """(cone class, angular position) of every end already used."""

    def __init__(self):
        self._buckets: Dict[Tuple[int, int], List[float]] = {}

    def __contains__(self, key: Tuple[int, float]) -> bool:
        vid, phi = key
        b = int(phi // _SAME_DIRECTION)
        return any(
            abs(other - phi) < _SAME_DIRECTION
            for k in (b - 1, b, b + 1)
            for other in self._buckets.get((vid, k), ())
        )

    def add(self, key: Tuple[int, float]) -> None:
        vid, phi = key
        self._buckets.setdefault((vid, int(phi // _SAME_DIRECTION)), []).append(phi)


def connection_from_walk(
    surface: TranslationSurface, tri: Triangulation, start: int, position: float, w: Walk
) -> SaddleConnection:
    """Wrap a walk of surface.triangulation that ended at a cone point."""
    end = w.hit[0]
    return SaddleConnection(
        segment=polygon_pieces(tri, w.pieces),
        endpoints=(surface.cone_classes[start].representative, surface.cone_classes[end].representative),
        cone_classes=(start, end),
        positions=(position, w.arrival_position(tri)),
    )


def _from_record(surface: TranslationSurface, tri: Triangulation, r: _Record) -> Optional[SaddleConnection]:
    """The connection a sighting saw, walked from the same corner along the
    same chart vector; None if that walk does not end where the sighting did."""
    length = r.vector.norm()
    w = r.walked
    if w is None:
        reach = length * (1 + 1e-9) + get_epsilon() * 100
        w = walk(tri, r.triangle, tri.pts[r.triangle][r.corner], r.vector, reach, corner=r.corner)
    if w.hit is None or w.hit[0] != r.end or abs(w.length - length) > 1e-7 * max(1.0, length):
        ended = "nowhere" if w.hit is None else f"at class {w.hit[0]} after {w.length:.9g}"
        print(
            f"[Saddle] dropped sighting from class {r.start} at position {r.start_position:.9f}: "
            f"expected class {r.end} at {length:.9g}, walk ended {ended}",
            file=sys.stderr,
        )
        return None
    return SaddleConnection(
        segment=polygon_pieces(tri, w.pieces),
        endpoints=(surface.cone_classes[r.start].representative, surface.cone_classes[r.end].representative),
        cone_classes=(r.start, r.end),
        positions=(r.start_position, r.end_position),
    )


def _finalize(surface: TranslationSurface, tri: Triangulation, records: Iterable[_Record]) -> List[SaddleConnection]:
    used = _EndKeys()
    connections: List[SaddleConnection] = []
    for r in sorted(records, key=lambda r: r.ends):
        if r.ends[0] in used or r.ends[1] in used:
            continue
        c = _from_record(surface, tri, r)
        if c is None:
            continue
        used.add(r.ends[0])
        used.add(r.ends[1])
        connections.append(_oriented(c))
    connections.sort(key=_sort_key)
    return connections


def enumerate_saddle_connections(
    surface: TranslationSurface,
    bound: float,
    max_workers: Optional[int] = None,
    verbose: bool = False,
) -> List[SaddleConnection]:
    """All saddle connections of length at most bound, each listed once,
    sorted by (length, holonomy angle)."""
    if not surface.sigma:
        raise NoConePoints("the surface has no cone points")
    if not bound > 0:
        raise ValueError(f"bound must be positive, got {bound}")
    tri = surface.triangulation
    corners = sigma_corners(tri)
    workers = _DEFAULT_MAX_WORKERS if max_workers is None else max_workers
    batches = fan_out(lambda c: _corner_records(tri, c[0], c[1], bound), corners, workers)
    connections = _finalize(surface, tri, (r for batch in batches for r in batch))
    if verbose:
        print(
            f"[Saddle] {len(connections)} connection(s) up to length {bound:.6g} "
            f"from {len(corners)} corner(s)",
            file=sys.stderr,
        )
    return connections


def shortest_saddle_length(surface: TranslationSurface, verbose: bool = False) -> float:
    """Length of the shortest saddle connection, doubling the search bound
    from the shortest triangulation edge."""
    if not surface.sigma:
        raise NoConePoints("the surface has no cone points")
    tri = surface.triangulation
    bound = min(tri.edge(t, e).norm() for t, e in tri.iter_edges())
    for _ in range(_DEFAULT_MAX_DOUBLINGS + 1):
        found = enumerate_saddle_connections(surface, bound * (1 + 1e-9) + get_epsilon())
        if found:
            if verbose:
                print(f"[Saddle] shortest connection {found[0].length:.12g}", file=sys.stderr)
            return found[0].length
        bound *= 2
    raise SurfaceError(f"no saddle connection shorter than {bound:.6g}")


# Holonomy sets


@dataclass(frozen=True)
class HolonomySet:
    """Holonomy vectors of saddle connections, both orientations, with counts."""

    entries: Tuple[Tuple[Vec2, int], ...]
    bound: float

    @classmethod
    def from_vectors(cls, vectors: Iterable[Vec2], bound: float, tol: Optional[float] = None) -> "HolonomySet":
        tol = get_epsilon() * 1000 if tol is None else tol
        merged: List[List] = []
        for v in sorted(vectors, key=lambda u: (u.angle(), u.norm())):
            for item in merged:
                if vec_close(item[0], v, tol):
                    item[1] += 1
                    break
            else:
                merged.append([v, 1])
        merged.sort(key=lambda item: (round(item[0].norm(), 7), round(item[0].angle(), 7)))
        return cls(tuple((v, n) for v, n in merged), bound)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def vectors(self) -> List[Vec2]:
        return [v for v, _ in self.entries]

    def total(self) -> int:
        return sum(n for _, n in self.entries)

    def count(self, v: Vec2, tol: Optional[float] = None) -> int:
        tol = get_epsilon() * 1000 if tol is None else tol
        return next((n for u, n in self.entries if vec_close(u, v, tol)), 0)

    def __contains__(self, v) -> bool:
        return self.count(Vec2(*v)) > 0

    def transformed(self, m: PlanarMatrix) -> "HolonomySet":
        vectors = []
        for v, n in self.entries:
            vectors.extend([m.apply(v)] * n)
        return HolonomySet.from_vectors(vectors, self.bound)

    def same_as(self, other: "HolonomySet", tol: Optional[float] = None) -> bool:
        """Equality as multisets, within tol."""
        tol = get_epsilon() * 1000 if tol is None else tol
        if len(self) != len(other) or self.total() != other.total():
            return False
        return all(other.count(v, tol) == n for v, n in self.entries)

    def spans(self) -> bool:
        """True if two of the vectors are linearly independent."""
        vs = self.vectors
        for a in vs:
            for b in vs:
                if abs(a.cross(b)) > get_epsilon() * 100 * max(1.0, a.norm() * b.norm()):
                    return True
        return False


def holonomy_set(surface: TranslationSurface, bound: float, max_workers: Optional[int] = None) -> HolonomySet:
    connections = enumerate_saddle_connections(surface, bound, max_workers=max_workers)
    vectors = []
    for c in connections:
        vectors.append(c.holonomy)
        vectors.append(-c.holonomy)
    return HolonomySet.from_vectors(vectors, bound)


# Crossing-sequence search

# Crossing parameters this close to an edge end touch the vertex there.
_TOUCH = 1e-9
# Angular positions closer than this are one end of the reference search.
_SAME_END = 1e-6


@dataclass(frozen=True)
class _Crossing:
    """A crossed edge pa -> pb in the apex frame and the triangle beyond it."""

    pa: Vec2
    pb: Vec2
    stops_a: bool
    stops_b: bool
    triangle: int
    shift: Vec2
    previous: Optional["_Crossing"]

    def chain(self) -> List["_Crossing"]:
        out: List[_Crossing] = []
        node: Optional[_Crossing] = self
        while node is not None:
            out.append(node)
            node = node.previous
        return out[::-1]


def _crossing_parameters(x: Vec2, chain: Sequence[_Crossing]) -> Optional[List[float]]:
    """Where the segment 0 -> x meets each crossed edge, as fractions of x;
    None if it misses one or touches a cone point on the way."""
    params = []
    for c in chain:
        d = c.pb - c.pa
        den = x.cross(d)
        if abs(den) <= 1e-15 * max(1.0, x.norm() * d.norm()):
            return None
        u = c.pa.cross(x) / den
        s = c.pa.cross(d) / den
        if not -_TOUCH <= u <= 1 + _TOUCH or not 0.0 < s < 1.0:
            return None
        if (u < _TOUCH and c.stops_a) or (u > 1 - _TOUCH and c.stops_b):
            return None
        params.append(s)
    return params


def _end_position(tri: Triangulation, t: int, j: int, back: Vec2) -> float:
    """Angular position at corner (t, j) of the direction back, pulled into the corner."""
    width = tri.angle(t, j)
    offset = ccw_angle(tri.edge(t, j), back)
    if offset > width:
        offset = 0.0 if TWO_PI - offset < offset - width else width
    total = tri.vertices[tri.labels[t][j]].angle
    phi = math.fmod(tri.alpha[t][j] + offset, total)
    return 0.0 if phi > total - _SAME_END else phi


def _same_end(a: Tuple[int, float], b: Tuple[int, float], total: float) -> bool:
    if a[0] != b[0]:
        return False
    gap = abs(a[1] - b[1])
    return min(gap, total - gap) < _SAME_END


def saddle_connections_by_crossings(
    surface: TranslationSurface, bound: float, max_depth: int = 64
) -> List[SaddleConnection]:
    """Slow reference enumeration.

    From every corner of every cone point, walks each sequence of edge
    crossings (up to max_depth) whose edges the corner's sector still sees
    within distance bound. A cone point opposite the last crossed edge is a
    connection when the straight segment to it meets every crossed edge in
    order, touching no cone point on the way.
    """
    if not surface.sigma:
        raise NoConePoints("the surface has no cone points")
    tri = surface.triangulation
    tol = get_epsilon() * 100
    found: List[SaddleConnection] = []

    def stops(t: int, k: int) -> bool:
        return tri.vertices[tri.labels[t][k]].stops

    for t0, i0 in sigma_corners(tri):
        apex = tri.pts[t0][i0]
        lo0 = tri.edge(t0, i0)
        width = tri.angle(t0, i0)
        start = tri.labels[t0][i0]
        total = tri.vertices[start].angle
        reached = set()

        def accept(x: Vec2, t: int, j: int, chain: List[_Crossing]) -> None:
            n = x.norm()
            if n <= tol or n > bound:
                return
            offset = ccw_angle(lo0, x)
            if offset > TWO_PI - 1e-12:
                offset = 0.0
            if offset >= width - 1e-9:
                return
            key = (round(x.x, 9) + 0.0, round(x.y, 9) + 0.0)
            if key in reached:
                return
            params = _crossing_parameters(x, chain)
            if params is None:
                return
            reached.add(key)
            cuts = [0.0] + params + [1.0]
            frames = [(t0, -apex)] + [(c.triangle, c.shift) for c in chain]
            pieces = [
                (tk, x * a - shift, x * b - shift)
                for (tk, shift), a, b in zip(frames, cuts, cuts[1:])
                if (b - a) * n > 1e-12
            ]
            phi = math.fmod(tri.alpha[t0][i0] + offset, total)
            end = tri.labels[t][j]
            found.append(
                SaddleConnection(
                    segment=polygon_pieces(tri, pieces),
                    endpoints=(surface.cone_classes[start].representative, surface.cone_classes[end].representative),
                    cone_classes=(start, end),
                    positions=(0.0 if phi > total - _SAME_END else phi, _end_position(tri, t, j, -x)),
                )
            )

        j1 = (i0 + 1) % 3
        if stops(t0, j1):
            accept(lo0, t0, j1, [])
        stack = [(t0, j1, -apex, lo0, tri.pts[t0][(i0 + 2) % 3] - apex, None, 0)]
        while stack:
            t, e, shift, lo, hi, previous, depth = stack.pop()
            pa = tri.pts[t][e] + shift
            pb = tri.pts[t][(e + 1) % 3] + shift
            if point_segment_distance(ORIGIN, pa, pb) > bound:
                continue
            if lo.cross(pa) > 0:
                lo = pa
            if pb.cross(hi) > 0:
                hi = pb
            if lo.cross(hi) < -tol * max(1.0, lo.norm() * hi.norm()):
                continue
            t2, e2 = tri.nbr[t][e]
            shift2 = shift + tri.shift_across(t, e)
            node = _Crossing(pa, pb, stops(t, e), stops(t, (e + 1) % 3), t2, shift2, previous)
            j = (e2 + 2) % 3
            if stops(t2, j):
                accept(tri.pts[t2][j] + shift2, t2, j, node.chain())
            if depth < max_depth:
                stack.append((t2, (e2 + 1) % 3, shift2, lo, hi, node, depth + 1))
                stack.append((t2, j, shift2, lo, hi, node, depth + 1))

    kept: List[SaddleConnection] = []
    for c in sorted(found, key=lambda c: (c.cone_classes, c.positions)):
        c = _oriented(c)
        ends = list(zip(c.cone_classes, c.positions))
        if any(
            _same_end(a, b, tri.vertices[a[0]].angle)
            for k in kept
            for a in ends
            for b in zip(k.cone_classes, k.positions)
        ):
            continue
        kept.append(c)
    kept.sort(key=_sort_key)
    return kept
