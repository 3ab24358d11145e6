"""
surface.py -- Translation surfaces: polygons, edge pairings, cone data.

A surface is a list of counterclockwise polygons whose edges are glued in
pairs by translations. Edge k of a polygon joins vertex k to vertex k+1.
build_surface() validates the gluing and derives the vertex classes, their
cone angles, the genus and the cone set Sigma. The result is immutable;
triangulations are derived lazily and cached.
"""

import math
import sys
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, Iterator, List, NamedTuple, Optional, Sequence, Tuple

from .errors import (
    BadConeAngle,
    DegeneratePolygon,
    IncongruentPair,
    NonParallelPair,
    UnpairedEdge,
)
from .geom_core import (
    TWO_PI,
    PlanarMatrix,
    PlanarPolygon,
    Vec2,
    ccw_angle,
    get_epsilon,
    point_in_polygon,
    point_segment_distance,
    vec_close,
)
from .triangulation import Triangulation, VertexInfo


class EdgeRef(NamedTuple):
    polygon: int
    edge: int


# A polygon corner is addressed like the edge leaving it.
CornerRef = EdgeRef


class SurfacePoint(NamedTuple):
    polygon: int
    position: Vec2


class EdgePairing:
    """Unordered pairs of polygon edges, stored canonically."""

    def __init__(self, pairs: Iterable[Tuple[Sequence[int], Sequence[int]]]):
        canonical = []
        for a, b in pairs:
            ra, rb = EdgeRef(int(a[0]), int(a[1])), EdgeRef(int(b[0]), int(b[1]))
            canonical.append((ra, rb) if ra <= rb else (rb, ra))
        self.pairs: Tuple[Tuple[EdgeRef, EdgeRef], ...] = tuple(sorted(canonical))
        self._partner: Dict[EdgeRef, EdgeRef] = {}
        for ra, rb in self.pairs:
            for r, s in ((ra, rb), (rb, ra)):
                if r in self._partner:
                    raise UnpairedEdge(f"edge {tuple(r)} appears in more than one pair")
                self._partner[r] = s

    def __iter__(self) -> Iterator[Tuple[EdgeRef, EdgeRef]]:
        return iter(self.pairs)

    def __len__(self) -> int:
        return len(self.pairs)

    def __contains__(self, ref) -> bool:
        return EdgeRef(*ref) in self._partner

    def partner(self, ref: Sequence[int]) -> EdgeRef:
        return self._partner[EdgeRef(*ref)]


@dataclass(frozen=True)
class ConeClass:
    index: int
    corners: Tuple[CornerRef, ...]  # counterclockwise, starting at the smallest
    offsets: Tuple[float, ...]  # angular position of each corner's outgoing edge
    angle: float  # exact multiple of 2pi
    in_sigma: bool
    representative: SurfacePoint
    angle_sum: float  # measured sum of the corner angles

    @property
    def multiplicity(self) -> int:
        return int(round(self.angle / TWO_PI))


@dataclass(frozen=True, eq=False)
class TranslationSurface:
    polygons: Tuple[PlanarPolygon, ...]
    pairing: EdgePairing
    cone_classes: Tuple[ConeClass, ...]
    vertex_class: Dict[CornerRef, int]
    marked_points: Dict[str, SurfacePoint] = field(default_factory=dict)
    designated: FrozenSet[CornerRef] = frozenset()
    metadata: Dict = field(default_factory=dict)

    def __repr__(self) -> str:
        return (
            f"TranslationSurface({len(self.polygons)} polygons, genus {self.genus}, "
            f"{len(self.sigma)} cone points)"
        )

    # Derived combinatorics

    @property
    def num_edges(self) -> int:
        return len(self.pairing)

    @property
    def genus(self) -> int:
        return genus(self)

    @property
    def sigma(self) -> List[ConeClass]:
        return [c for c in self.cone_classes if c.in_sigma]

    def corner_offset(self, corner: CornerRef) -> float:
        cls = self.cone_classes[self.vertex_class[corner]]
        return cls.offsets[cls.corners.index(corner)]

    def gluing_translation(self, ref: EdgeRef) -> Vec2:
        """Translation carrying points of edge ref onto its partner."""
        other = self.pairing.partner(ref)
        p = self.polygons[ref.polygon].vertices[ref.edge]
        q_poly = self.polygons[other.polygon]
        s = q_poly.vertices[(other.edge + 1) % len(q_poly)]
        return s - p

    def pairing_table(self) -> List[str]:
        rows = []
        for a, b in self.pairing:
            v = self.polygons[a.polygon].edge_vector(a.edge)
            rows.append(
                f"  ({a.polygon},{a.edge:>3}) <-> ({b.polygon},{b.edge:>3})"
                f"   vector ({v.x:+.6f}, {v.y:+.6f})"
            )
        return rows

    # Triangulations

    def vertex_table(self, with_marked: bool = False) -> List[VertexInfo]:
        table = [
            VertexInfo("sigma" if c.in_sigma else "flat", c.angle, f"c{c.index}")
            for c in self.cone_classes
        ]
        if with_marked:
            for name, point in self.marked_points.items():
                corner = self.corner_at(point)
                if corner is None:
                    table.append(VertexInfo("marked", TWO_PI, name))
                    continue
                info = table[self.vertex_class[corner]]
                info.name = name
                if info.kind != "sigma":
                    info.kind = "marked"
        return table

    def _build_triangulation(self, vertices: List[VertexInfo]) -> Triangulation:
        partner = {ref: other for a, b in self.pairing for ref, other in ((a, b), (b, a))}
        return Triangulation.from_polygons(
            [p.vertices for p in self.polygons],
            partner,
            dict(self.vertex_class),
            {corner: self.corner_offset(corner) for corner in self.vertex_class},
            vertices,
        )

    @cached_property
    def triangulation(self) -> Triangulation:
        """Ear-clipped triangulation by polygon vertices only, in polygon charts."""
        return self._build_triangulation(self.vertex_table(False))

    @cached_property
    def marked_triangulation(self) -> Triangulation:
        """Like triangulation, with the marked points inserted as vertices."""
        vertices = self.vertex_table(True)
        tri = self._build_triangulation(vertices)
        next_id = len(self.cone_classes)
        for name, point in self.marked_points.items():
            if self.corner_at(point) is not None:
                continue
            t, pos = tri.locate(point.polygon, point.position)
            tri.insert_point(t, pos, next_id)
            next_id += 1
        return tri

    @cached_property
    def delaunay(self) -> Triangulation:
        """Delaunay triangulation whose vertices are Sigma and the marked points.

        Built from marked_triangulation by removing the flat vertex classes
        and flipping; alpha is shared with it. Vertex ids keep their
        marked_triangulation numbering.
        """
        tri = self.marked_triangulation.copy()
        tri.make_delaunay()
        flat = [vid for vid, info in enumerate(tri.vertices) if info.kind == "flat"]
        if len(flat) < len(tri.vertex_ids()):
            for vid in flat:
                tri.remove_vertex(vid)
                tri.make_delaunay()
        return tri

    # Points

    def corner_at(self, point: SurfacePoint) -> Optional[CornerRef]:
        tol = get_epsilon() * 10
        for k, v in enumerate(self.polygons[point.polygon].vertices):
            if (v - point.position).norm() <= tol:
                return CornerRef(point.polygon, k)
        return None

    def canonical_point(self, point: SurfacePoint) -> SurfacePoint:
        """Smallest (polygon, edge, parameter) representative of a point."""
        corner = self.corner_at(point)
        if corner is not None:
            return self.cone_classes[self.vertex_class[corner]].representative
        tol = get_epsilon() * 10
        poly = self.polygons[point.polygon]
        for k in range(len(poly)):
            a, b = poly.edge(k)
            if point_segment_distance(point.position, a, b) > tol:
                continue
            e = b - a
            s = (point.position - a).dot(e) / e.dot(e)
            other = self.pairing.partner(EdgeRef(point.polygon, k))
            if (other.polygon, other.edge, 1.0 - s) < (point.polygon, k, s):
                q = self.polygons[other.polygon]
                start, end = q.edge(other.edge)
                return SurfacePoint(other.polygon, start + (end - start) * (1.0 - s))
            return SurfacePoint(point.polygon, point.position)
        return SurfacePoint(point.polygon, point.position)

    def same_point(self, p: SurfacePoint, q: SurfacePoint, tol: Optional[float] = None) -> bool:
        a, b = self.canonical_point(p), self.canonical_point(q)
        return a.polygon == b.polygon and vec_close(a.position, b.position, tol or get_epsilon() * 1000)

    def transformed(self, m: PlanarMatrix) -> "TranslationSurface":
        """The surface with every chart composed with m (polygon indices kept)."""
        flip = m.det() < 0
        polygons, edge_map, corner_map = [], {}, {}
        for i, poly in enumerate(self.polygons):
            n = len(poly)
            pts = [m.apply(v) for v in poly.vertices]
            if flip:
                pts = [pts[(-k) % n] for k in range(n)]
                for e in range(n):
                    edge_map[(i, e)] = (i, (-e - 1) % n)
                    corner_map[(i, e)] = CornerRef(i, (-e) % n)
            else:
                for e in range(n):
                    edge_map[(i, e)] = (i, e)
                    corner_map[(i, e)] = CornerRef(i, e)
            polygons.append(PlanarPolygon(tuple(pts), poly.convex))
        pairing = EdgePairing((edge_map[a], edge_map[b]) for a, b in self.pairing)
        marked = {
            name: SurfacePoint(p.polygon, m.apply(p.position)) for name, p in self.marked_points.items()
        }
        sigma_corners = {c.corners[0] for c in self.sigma}
        designated = {corner_map[c] for c in sigma_corners}
        return build_surface(polygons, pairing, marked, designated, dict(self.metadata))


def _next_ccw(pairing: EdgePairing, sizes: Sequence[int], corner: CornerRef) -> CornerRef:
    incoming = EdgeRef(corner.polygon, (corner.edge - 1) % sizes[corner.polygon])
    return CornerRef(*pairing.partner(incoming))


def _check_pairing(polygons: Sequence[PlanarPolygon], pairing: EdgePairing) -> None:
    eps = get_epsilon()
    for i, poly in enumerate(polygons):
        for k in range(len(poly)):
            if EdgeRef(i, k) not in pairing:
                raise UnpairedEdge(f"edge ({i},{k}) is not paired")
    for a, b in pairing:
        for r in (a, b):
            if not (0 <= r.polygon < len(polygons) and 0 <= r.edge < len(polygons[r.polygon])):
                raise UnpairedEdge(f"pairing refers to missing edge {tuple(r)}")
        if a == b:
            raise UnpairedEdge(f"edge {tuple(a)} is paired with itself")
        va = polygons[a.polygon].edge_vector(a.edge)
        vb = polygons[b.polygon].edge_vector(b.edge)
        if abs(va.cross(vb)) > eps * max(1.0, va.norm() * vb.norm()):
            raise NonParallelPair(f"edges {tuple(a)} and {tuple(b)} are not parallel")
        if not vec_close(va, -vb, eps * max(1.0, va.norm())):
            raise IncongruentPair(
                f"edges {tuple(a)} and {tuple(b)} are not congruent and opposite: "
                f"{tuple(va)} vs {tuple(vb)}"
            )


def build_surface(
    polygons: Sequence[PlanarPolygon],
    pairing: EdgePairing,
    marked_points: Optional[Dict[str, SurfacePoint]] = None,
    designated: Optional[Iterable[Sequence[int]]] = None,
    metadata: Optional[Dict] = None,
    verbose: bool = False,
) -> TranslationSurface:
    """Validate a gluing and derive its vertex classes.

    designated lists polygon corners whose classes belong to Sigma even when
    their total angle is 2*pi.
    """
    polygons = tuple(polygons)
    if not polygons:
        raise DegeneratePolygon("a surface needs at least one polygon")
    _check_pairing(polygons, pairing)
    designated_set = frozenset(CornerRef(int(c[0]), int(c[1])) for c in (designated or ()))

    sizes = [len(p) for p in polygons]
    all_corners = [CornerRef(i, k) for i, n in enumerate(sizes) for k in range(n)]
    vertex_class: Dict[CornerRef, int] = {}
    classes: List[ConeClass] = []
    eps = get_epsilon()
    for start in all_corners:
        if start in vertex_class:
            continue
        index = len(classes)
        corners, offsets = [], []
        total = 0.0
        corner = start
        while True:
            vertex_class[corner] = index
            corners.append(corner)
            offsets.append(total)
            total += polygons[corner.polygon].interior_angle(corner.edge)
            corner = _next_ccw(pairing, sizes, corner)
            if corner == start:
                break
        multiple = total / TWO_PI
        if abs(multiple - round(multiple)) * TWO_PI > eps * len(corners) or round(multiple) < 1:
            raise BadConeAngle(
                f"vertex class of corner {tuple(start)} has total angle {total:.12g}, "
                f"not a positive multiple of 2*pi"
            )
        in_sigma = round(multiple) != 1 or any(c in designated_set for c in corners)
        rep = SurfacePoint(start.polygon, polygons[start.polygon].vertices[start.edge])
        classes.append(
            ConeClass(index, tuple(corners), tuple(offsets), TWO_PI * round(multiple), in_sigma, rep, total)
        )

    surface = TranslationSurface(
        polygons=polygons,
        pairing=pairing,
        cone_classes=tuple(classes),
        vertex_class=vertex_class,
        designated=designated_set,
        metadata=dict(metadata or {}),
    )
    for name, point in (marked_points or {}).items():
        pos = Vec2(float(point[1][0]), float(point[1][1]))
        if not 0 <= point[0] < len(polygons) or not point_in_polygon(pos, polygons[point[0]]):
            raise DegeneratePolygon(f"marked point {name} lies outside polygon {point[0]}")
        surface.marked_points[name] = surface.canonical_point(SurfacePoint(int(point[0]), pos))

    if verbose:
        sigma = surface.sigma
        angles = ", ".join(f"{c.angle / math.pi:.0f}pi" for c in sigma)
        print(
            f"[Surface] {len(polygons)} polygon(s), {len(pairing)} edge pairs, "
            f"{len(classes)} vertex class(es), genus {surface.genus}, "
            f"Sigma: {len(sigma)} [{angles}]",
            file=sys.stderr,
        )
    return surface


def genus(surface: TranslationSurface) -> int:
    """From the Euler characteristic V - E + F = 2 - 2g."""
    chi = len(surface.cone_classes) - surface.num_edges + len(surface.polygons)
    return (2 - chi) // 2


def cone_points(surface: TranslationSurface) -> List[Tuple[SurfacePoint, float]]:
    return [(c.representative, c.angle) for c in surface.sigma]


def gauss_bonnet_defect(surface: TranslationSurface) -> float:
    """sum(angle - 2pi) - 2pi(2g - 2) over the measured angle sums of all
    vertex classes; zero up to rounding for a valid surface."""
    excess = sum(c.angle_sum - TWO_PI for c in surface.cone_classes)
    return excess - TWO_PI * (2 * surface.genus - 2)


def corner_direction_position(surface: TranslationSurface, corner: CornerRef, direction: Vec2) -> float:
    """Angular position around a vertex class of a direction leaving a polygon corner."""
    poly = surface.polygons[corner.polygon]
    cls = surface.cone_classes[surface.vertex_class[corner]]
    offset = ccw_angle(poly.edge_vector(corner.edge), direction)
    if offset > TWO_PI - 1e-12:
        offset = 0.0
    return math.fmod(surface.corner_offset(corner) + offset, cls.angle)
