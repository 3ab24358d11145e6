"""
constructions.py -- The dihedral and cyclic surface families, plus the
square torus and the regular octagon as reference surfaces.

A family surface is one planar polygon: a regular polygon centred at O
with a square standing on the middle of every side (slid sideways by l3
in the cyclic family), glued along parallel sides. Even N uses N sides at
angle 2*pi/N. Odd N uses 2N sides at angle pi/N, and the two sides of each
square perpendicular to the base are cut at their midpoints into four
segments, glued across the square (even squares) or straight over it (odd
squares), so that only rotations by 2*pi/N survive.

Marked points: O and the square centres P1, P2, ... Segments S_i run from O
to P_i, T_i from O to the corners of the central polygon (cyclic only).
"""

import math
import sys
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BadParameters, PairingImpossible
from .geom_core import (
    ORIGIN,
    PlanarMatrix,
    PlanarPolygon,
    Vec2,
    get_epsilon,
    regular_polygon,
    vec_close,
)
from .surface import CornerRef, EdgePairing, SurfacePoint, TranslationSurface, build_surface
from .tracing import GeodesicSegment


class FamilyKind(str, Enum):
    DIHEDRAL = "dihedral"
    CYCLIC = "cyclic"


@dataclass(frozen=True)
class FamilySpec:
    kind: FamilyKind
    n: int
    l1: float
    l2: float
    l3: Optional[float] = None

    def validate(self) -> None:
        if self.n < 3:
            raise BadParameters(f"N >= 3 required, got N = {self.n}")
        if not 0 < self.l2 < self.l1 / 3:
            raise BadParameters(f"need 0 < l2 < l1/3, got l1 = {self.l1}, l2 = {self.l2}")
        if self.kind is FamilyKind.CYCLIC:
            if self.l3 is None or not 0 < self.l3 < self.l2 / 2:
                raise BadParameters(f"need 0 < l3 < l2/2, got l2 = {self.l2}, l3 = {self.l3}")
        elif self.l3 is not None:
            raise BadParameters("l3 is only used by the cyclic family")

    @property
    def sides(self) -> int:
        return self.n if self.n % 2 == 0 else 2 * self.n

    @property
    def theta(self) -> float:
        return 2 * math.pi / self.sides

    def to_dict(self) -> Dict:
        data = asdict(self)
        data["kind"] = self.kind.value
        return data

    @classmethod
    def from_dict(cls, data: Dict) -> "FamilySpec":
        l3 = data.get("l3")
        return cls(FamilyKind(data["kind"]), int(data["n"]), float(data["l1"]), float(data["l2"]),
                   None if l3 is None else float(l3))


@dataclass(frozen=True)
class ConstructedSurface:
    surface: TranslationSurface
    spec: Optional[FamilySpec]
    O: SurfacePoint
    P: List[SurfacePoint] = field(default_factory=list)
    S: List[GeodesicSegment] = field(default_factory=list)
    T_segs: List[GeodesicSegment] = field(default_factory=list)
    theta: float = 0.0

    def sigma_vectors(self) -> List[Vec2]:
        return [s.holonomy for s in self.S]

    def tau_vectors(self) -> List[Vec2]:
        return [s.holonomy for s in self.T_segs]

    def test_polygons(self) -> Tuple[PlanarPolygon, PlanarPolygon]:
        """The side-l2 square and the central regular polygon of side l1."""
        spec = self.spec
        square = regular_polygon(4, spec.l2)
        central = regular_polygon(spec.sides, spec.l1)
        return square, central


def default_lengths(kind: FamilyKind, n: int) -> Tuple[float, float, Optional[float]]:
    """Fixed lengths made from digits of e and pi; valid for every N."""
    l1, l2 = 1.0, 0.2718281828
    l3 = 0.1041592653 if FamilyKind(kind) is FamilyKind.CYCLIC else None
    return l1, l2, l3


def leaves_invariant(m: PlanarMatrix, vectors: Sequence[Vec2], tol: Optional[float] = None) -> bool:
    """True if m permutes the given vectors."""
    tol = get_epsilon() * 1000 if tol is None else tol
    images = [m.apply(v) for v in vectors]
    return all(any(vec_close(w, v, tol) for v in vectors) for w in images)


# Fan construction

# Edge kinds along one side, in boundary order.
_EVEN_KINDS = ("base1", "up", "top", "down", "base2")
_ODD_KINDS = ("base1", "a1", "a2", "top", "a3", "a4", "base2")


def _side_frame(j: int, theta: float, apothem: float) -> Tuple[Vec2, Vec2, Vec2]:
    """Midpoint, direction and outward normal of side j of the central polygon."""
    d = Vec2(math.cos(j * theta), math.sin(j * theta))
    normal = Vec2(d.y, -d.x)
    return normal * apothem, d, normal


def _fan(spec: FamilySpec):
    """Boundary points, edge tags and marked data of the family polygon."""
    sides, theta = spec.sides, spec.theta
    apothem = spec.l1 / (2 * math.tan(theta / 2))
    slide = spec.l3 or 0.0
    odd = spec.n % 2 == 1
    points: List[Vec2] = []
    tags: List[Tuple[int, str]] = []
    centres: List[Vec2] = []
    corners: List[Vec2] = []
    for j in range(sides):
        m, d, nrm = _side_frame(j, theta, apothem)
        v = m - d * (spec.l1 / 2)
        a = m + d * (slide - spec.l2 / 2)
        b = m + d * (slide + spec.l2 / 2)
        a_top, b_top = a + nrm * spec.l2, b + nrm * spec.l2
        if odd:
            mid_a, mid_b = a + nrm * (spec.l2 / 2), b + nrm * (spec.l2 / 2)
            ring = [v, a, mid_a, a_top, b_top, mid_b, b]
            kinds = _ODD_KINDS
        else:
            ring = [v, a, a_top, b_top, b]
            kinds = _EVEN_KINDS
        points.extend(ring)
        tags.extend((j, k) for k in kinds)
        centres.append(m + d * slide + nrm * (spec.l2 / 2))
        corners.append(v)
    return points, tags, centres, corners


# A-segment partners for squares glued across (even j) and straight over (odd j).
_ACROSS = {"a1": "a3", "a2": "a4", "a3": "a1", "a4": "a2"}
_STRAIGHT = {"a1": "a4", "a2": "a3", "a3": "a2", "a4": "a1"}


def _pairing(spec: FamilySpec, tags: List[Tuple[int, str]]) -> List[Tuple[Tuple[int, int], Tuple[int, int]]]:
    """Split sides pair within their square; every other side pairs with the
    same side of the opposite sector."""
    index = {tag: i for i, tag in enumerate(tags)}
    half = spec.sides // 2
    pairs = set()
    for i, (j, kind) in enumerate(tags):
        if kind in _ACROSS:
            other = index[(j, (_ACROSS if j % 2 == 0 else _STRAIGHT)[kind])]
        else:
            other = index[((j + half) % spec.sides, kind)]
        pairs.add((min(i, other), max(i, other)))
    return [((0, a), (0, b)) for a, b in sorted(pairs)]


def _check_pairs(points: Sequence[Vec2], pairs) -> None:
    n = len(points)
    for (_, a), (_, b) in pairs:
        va = points[(a + 1) % n] - points[a]
        vb = points[(b + 1) % n] - points[b]
        if not vec_close(va, -vb, get_epsilon() * 100):
            raise PairingImpossible(f"edges {a} and {b} are not parallel and congruent")


def _designated(spec: FamilySpec, tags: List[Tuple[int, str]]) -> List[CornerRef]:
    """Corners on the central polygon and, for odd N, every A-segment
    endpoint of the squares glued across."""
    on_polygon = {"base1", "up", "a1", "base2"}
    across = {"a2", "top", "a3", "a4"} if spec.n % 2 == 1 else set()
    return [
        CornerRef(0, i)
        for i, (j, kind) in enumerate(tags)
        if kind in on_polygon or (kind in across and j % 2 == 0)
    ]


def _build_family(spec: FamilySpec, verbose: bool = False) -> ConstructedSurface:
    spec.validate()
    points, tags, centres, corners = _fan(spec)
    pairs = _pairing(spec, tags)
    _check_pairs(points, pairs)
    polygon = PlanarPolygon(tuple(points))
    marked = {"O": SurfacePoint(0, ORIGIN)}
    for k, c in enumerate(centres):
        marked[f"P{k + 1}"] = SurfacePoint(0, c)
    surface = build_surface(
        [polygon],
        EdgePairing(pairs),
        marked_points=marked,
        designated=_designated(spec, tags),
        metadata={"family": spec.to_dict()},
        verbose=verbose,
    )
    S = [GeodesicSegment(((0, ORIGIN, c),)) for c in centres]
    T_segs = (
        [GeodesicSegment(((0, ORIGIN, v),)) for v in corners] if spec.kind is FamilyKind.CYCLIC else []
    )
    if verbose:
        print(
            f"[Build] {spec.kind.value} N={spec.n}: {len(points)} polygon edges, "
            f"{len(centres)} squares, theta = {spec.theta:.6f}",
            file=sys.stderr,
        )
    return ConstructedSurface(
        surface=surface,
        spec=spec,
        O=surface.marked_points["O"],
        P=[surface.marked_points[f"P{k + 1}"] for k in range(len(centres))],
        S=S,
        T_segs=T_segs,
        theta=spec.theta,
    )


def build_dihedral(n: int, l1: float, l2: float, verbose: bool = False) -> ConstructedSurface:
    return _build_family(FamilySpec(FamilyKind.DIHEDRAL, n, l1, l2), verbose)


def build_cyclic(n: int, l1: float, l2: float, l3: float, verbose: bool = False) -> ConstructedSurface:
    return _build_family(FamilySpec(FamilyKind.CYCLIC, n, l1, l2, l3), verbose)


def build_from_spec(spec: FamilySpec, verbose: bool = False) -> ConstructedSurface:
    return _build_family(spec, verbose)


def build_default(kind: FamilyKind, n: int, verbose: bool = False) -> ConstructedSurface:
    l1, l2, l3 = default_lengths(kind, n)
    return _build_family(FamilySpec(FamilyKind(kind), n, l1, l2, l3), verbose)


# Reference surfaces


def square_torus(marked: bool = False) -> TranslationSurface:
    """Unit square with opposite sides glued; optionally marked at the corner."""
    square = PlanarPolygon((Vec2(0.0, 0.0), Vec2(1.0, 0.0), Vec2(1.0, 1.0), Vec2(0.0, 1.0)), convex=True)
    marked_points = {"Q": SurfacePoint(0, ORIGIN)} if marked else None
    return build_surface([square], EdgePairing([((0, 0), (0, 2)), ((0, 1), (0, 3))]), marked_points)


def regular_octagon_surface(side: float = 1.0) -> TranslationSurface:
    """Regular octagon with opposite sides glued: genus 2, one cone point of angle 6*pi."""
    octagon = regular_polygon(8, side)
    return build_surface([octagon], EdgePairing([((0, k), (0, k + 4)) for k in range(4)]))
