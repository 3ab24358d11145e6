"""
veech.py -- Isometric Veech groups of translation surfaces.

A matrix M is the derivative of an affine automorphism exactly when the
surface with every chart composed with M is translation-equivalent to the
original. Both sides are brought to their Delaunay cell decompositions
(vertices: cone points and marked points; flat polygon corners are
removed first), which are canonical, and matched cell by cell: equal edge
vectors, equal vertex labels, compatible gluings.

Candidate derivatives come from the holonomies of the shortest saddle
connections: an isometric automorphism permutes them, so it is fixed by
where it sends two independent ones.
"""

import math
import os
import sys
from collections import deque
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import (
    DegenerateHolonomy,
    NoConePoints,
    NonUnitDeterminant,
    NotAGroup,
    NotClosed,
    NoVertices,
    SurfaceError,
)
from .geom_core import TWO_PI, PlanarMatrix, Vec2, get_epsilon, solve_pair_map, vec_close
from .saddle import HolonomySet, fan_out, holonomy_set, shortest_saddle_length
from .surface import CornerRef, SurfacePoint, TranslationSurface
from .tracing import Sighting, sightings_from_corner, sightings_from_point, walk
from .triangulation import Cell, Triangulation

_DEFAULT_MAX_WORKERS = int(os.getenv("FINITE_VEECH_MAX_WORKERS", "1"))
_DEFAULT_MAX_DOUBLINGS = int(os.getenv("FINITE_VEECH_MAX_DOUBLINGS", "8"))

_ORTHOGONAL_TOL = 1e-7
_SAME_MATRIX = 1e-7
_MAX_ROTATION_ORDER = 1000

IDENTITY = PlanarMatrix.identity()


# Delaunay canonical form


def delaunay_triangulation(surface: TranslationSurface) -> Triangulation:
    """Delaunay triangulation with Sigma and the marked points as vertices."""
    if not surface.sigma and not surface.marked_points:
        raise NoVertices("the surface has neither cone points nor marked points")
    return surface.delaunay


def _marked_vertices(surface: TranslationSurface) -> Dict[str, int]:
    """Vertex id of every marked point, in marked_triangulation numbering."""
    ids: Dict[str, int] = {}
    next_id = len(surface.cone_classes)
    for name, point in surface.marked_points.items():
        corner = surface.corner_at(point)
        if corner is None:
            ids[name] = next_id
            next_id += 1
        else:
            ids[name] = surface.vertex_class[corner]
    return ids


def _chart_vertex_map(surface: TranslationSurface, image: TranslationSurface, flip: bool) -> Dict[int, int]:
    """Vertex ids of surface -> the same points in image = surface.transformed(M)."""
    out: Dict[int, int] = {}
    for cls in surface.cone_classes:
        i, e = cls.corners[0]
        n = len(surface.polygons[i])
        out[cls.index] = image.vertex_class[CornerRef(i, (-e) % n if flip else e)]
    source, target = _marked_vertices(surface), _marked_vertices(image)
    for name, vid in source.items():
        out.setdefault(vid, target[name])
    return out


@dataclass(frozen=True, eq=False)
class AffineAutomorphism:
    """An affine self-map of a surface, given by its derivative and a
    translation matching of Delaunay cells.

    image is surface.transformed(derivative). cell_map sends each image
    cell to (source cell, boundary offset); vertex_map and fixes_marked are
    the induced permutations of Delaunay vertices and of marked points.
    """

    derivative: PlanarMatrix
    image: TranslationSurface
    cell_map: Dict[int, Tuple[int, int]]
    vertex_map: Dict[int, int]
    fixes_marked: Dict[str, str]
    placements: Dict[int, Tuple[int, Vec2]] = field(repr=False, default_factory=dict)
    target_cells: Dict[int, List[Tuple[int, Vec2]]] = field(repr=False, default_factory=dict)

    @property
    def is_identity(self) -> bool:
        return (
            self.derivative.is_close(IDENTITY, _SAME_MATRIX)
            and all(q == p and k == 0 for p, (q, k) in self.cell_map.items())
        )


def _match_from(
    src_cells: List[Cell],
    src_lookup: Dict,
    src_tri: Triangulation,
    img_cells: List[Cell],
    img_lookup: Dict,
    img_tri: Triangulation,
    anchor: Tuple[int, int],
) -> Optional[Tuple[Dict[int, Tuple[int, int]], Dict[int, int]]]:
    """Extend image cell 0 -> anchor (source cell, offset) to a full matching."""
    tol = get_epsilon() * 1000
    cell_map: Dict[int, Tuple[int, int]] = {0: anchor}
    psi: Dict[int, int] = {}
    psi_inv: Dict[int, int] = {}
    queue = deque([0])
    while queue:
        p = queue.popleft()
        q, k = cell_map[p]
        mine, theirs = img_cells[p], src_cells[q]
        n = len(mine)
        if len(theirs) != n:
            return None
        mine_vectors, their_vectors = mine.edge_vectors, theirs.edge_vectors
        for pos in range(n):
            other = (pos + k) % n
            u, v = mine_vectors[pos], their_vectors[other]
            if not vec_close(u, v, tol * max(1.0, v.norm())):
                return None
            a, b = mine.labels[pos], theirs.labels[other]
            if img_tri.vertices[a].label != src_tri.vertices[b].label:
                return None
            if psi.setdefault(a, b) != b or psi_inv.setdefault(b, a) != a:
                return None
            h, g = mine.half_edges[pos], theirs.half_edges[other]
            p2, pos2 = img_lookup[tuple(img_tri.nbr[h[0]][h[1]])]
            q2, other2 = src_lookup[tuple(src_tri.nbr[g[0]][g[1]])]
            if len(img_cells[p2]) != len(src_cells[q2]):
                return None
            entry = (q2, (other2 - pos2) % len(img_cells[p2]))
            if p2 in cell_map:
                if cell_map[p2] != entry:
                    return None
                continue
            cell_map[p2] = entry
            queue.append(p2)
    if len(cell_map) != len(img_cells) or len({q for q, _ in cell_map.values()}) != len(src_cells):
        return None
    return cell_map, psi


def affine_witnesses(
    surface: TranslationSurface, m: PlanarMatrix, first_only: bool = False
) -> List[AffineAutomorphism]:
    """Every affine automorphism of surface with derivative m."""
    if abs(abs(m.det()) - 1.0) > get_epsilon():
        raise NonUnitDeterminant(f"|det| = {abs(m.det()):.12g}, expected 1")
    image = surface.transformed(m)
    src_tri = delaunay_triangulation(surface)
    img_tri = delaunay_triangulation(image)
    src_cells, src_lookup = src_tri.cells()
    img_cells, img_lookup = img_tri.cells()
    if len(src_cells) != len(img_cells) or len(src_tri.vertex_ids()) != len(img_tri.vertex_ids()):
        return []

    phi = _chart_vertex_map(surface, image, m.det() < 0)
    names_by_vid: Dict[int, str] = {}
    marked_ids = _marked_vertices(surface)
    for name, vid in marked_ids.items():
        names_by_vid.setdefault(vid, name)
    target_cells = {
        q: [(t, cell.shifts[t]) for t in cell.triangles] for q, cell in enumerate(src_cells)
    }

    found: List[AffineAutomorphism] = []
    first = img_cells[0]
    for q, cell in enumerate(src_cells):
        if len(cell) != len(first):
            continue
        for k in range(len(cell)):
            matched = _match_from(src_cells, src_lookup, src_tri, img_cells, img_lookup, img_tri, (q, k))
            if matched is None:
                continue
            cell_map, psi = matched
            vertex_map = {v: psi[w] for v, w in phi.items() if w in psi}
            placements: Dict[int, Tuple[int, Vec2]] = {}
            for p, (q2, k2) in cell_map.items():
                tau = src_cells[q2].starts[k2] - img_cells[p].starts[0]
                for t in img_cells[p].triangles:
                    placements[t] = (q2, img_cells[p].shifts[t] + tau)
            found.append(
                AffineAutomorphism(
                    derivative=m,
                    image=image,
                    cell_map=cell_map,
                    vertex_map=vertex_map,
                    fixes_marked={
                        name: names_by_vid.get(vertex_map[vid], "")
                        for name, vid in marked_ids.items()
                    },
                    placements=placements,
                    target_cells=target_cells,
                )
            )
            if first_only:
                return found
    return found


def verify_affine(surface: TranslationSurface, m: PlanarMatrix) -> Optional[AffineAutomorphism]:
    """A witness that m is the derivative of an affine automorphism, or None."""
    found = affine_witnesses(surface, m, first_only=True)
    return found[0] if found else None


def translation_automorphisms(surface: TranslationSurface) -> List[AffineAutomorphism]:
    """Non-trivial automorphisms with derivative I."""
    return [w for w in affine_witnesses(surface, IDENTITY) if not w.is_identity]


# Induced map on points


def _best_triangle(tri: Triangulation, candidates: Sequence[Tuple[int, Vec2]], z: Vec2) -> Tuple[int, Vec2]:
    """The (triangle, local point) in which z lies most deeply."""
    best, best_depth = None, -math.inf
    for t, shift in candidates:
        local = z - shift
        pts = tri.pts[t]
        depth = min(
            (pts[(e + 1) % 3] - pts[e]).cross(local - pts[e]) / (pts[(e + 1) % 3] - pts[e]).norm()
            for e in range(3)
        )
        if depth > best_depth:
            best, best_depth = (t, local), depth
    if best is None or best_depth < -get_epsilon() * 1000:
        raise SurfaceError(f"point {tuple(z)} lies in no triangle of the cell")
    return best


def _nearest_cone_sighting(tri: Triangulation, t: int, x: Vec2) -> Sighting:
    """The closest point of Sigma seen from x, which may be a vertex."""
    radius = max(tri.edge(t, k).norm() for k in range(3))
    corner = tri.vertex_at(t, x)
    for _ in range(_DEFAULT_MAX_DOUBLINGS + 1):
        if corner is None:
            seen = list(sightings_from_point(tri, t, x, radius))
        else:
            seen = [s for c in tri.corners_of(tri.labels[t][corner]) for s in sightings_from_corner(tri, *c, radius)]
        seen = [s for s in seen if tri.vertices[s.vertex].stops]
        if seen:
            return min(seen, key=lambda s: s.vector.norm())
        radius *= 2
    raise SurfaceError(f"no cone point within {radius:.6g} of {tuple(x)}")


def _transfer(src: Triangulation, dst: Triangulation, t: int, x: Vec2) -> Tuple[int, Vec2]:
    """Move a point between two triangulations of the same surface sharing
    angular coordinates, walking out from a vertex both of them have: the
    nearest corner of t if dst kept it, else the closest cone point."""
    present = dst.vertex_ids()
    kept = [k for k in range(3) if src.labels[t][k] in present]
    if kept:
        i = min(kept, key=lambda k: (src.pts[t][k] - x).norm())
        d = x - src.pts[t][i]
        if d.norm() <= get_epsilon() * 10:
            t1, i1, _ = dst.find_corner(src.labels[t][i], 0.0)
            return t1, dst.pts[t1][i1]
        vid, phi = src.labels[t][i], src.position(t, i, d)
    else:
        seen = _nearest_cone_sighting(src, t, x)
        d = -seen.vector
        vid, phi = seen.vertex, seen.arrival_position(src)
    t1, i1, direction = dst.find_corner(vid, phi)
    w = walk(dst, t1, dst.pts[t1][i1], direction, d.norm(), corner=i1)
    return w.triangle, w.position


def _vertex_point(surface: TranslationSurface, vid: int) -> SurfacePoint:
    if vid < len(surface.cone_classes):
        return surface.cone_classes[vid].representative
    return surface.marked_points[surface.marked_triangulation.vertices[vid].name]


def apply_automorphism(
    surface: TranslationSurface, f: AffineAutomorphism, point: SurfacePoint
) -> SurfacePoint:
    """Image of a surface point under f, as a canonical point."""
    marked = surface.marked_triangulation
    t, x = marked.locate(point.polygon, point.position)
    corner = marked.vertex_at(t, x)
    if corner is not None and marked.labels[t][corner] in f.vertex_map:
        return _vertex_point(surface, f.vertex_map[marked.labels[t][corner]])

    image = f.image
    t, y = image.marked_triangulation.locate(point.polygon, f.derivative.apply(point.position))
    t, y = _transfer(image.marked_triangulation, image.delaunay, t, y)
    cell, offset = f.placements[t]
    t, z = _best_triangle(surface.delaunay, f.target_cells[cell], y + offset)
    t, z = _transfer(surface.delaunay, marked, t, z)
    return surface.canonical_point(SurfacePoint(marked.polygon[t], z))


def permutes_points(
    surface: TranslationSurface, f: AffineAutomorphism, points: Sequence[SurfacePoint]
) -> bool:
    """True if f maps the given finite point set onto itself."""
    hit = set()
    for p in points:
        q = apply_automorphism(surface, f, p)
        k = next((j for j, r in enumerate(points) if surface.same_point(q, r)), None)
        if k is None or k in hit:
            return False
        hit.add(k)
    return len(hit) == len(points)


# Candidates


def _angle_key(m: PlanarMatrix) -> Tuple[float, int]:
    a = m.rotation_angle()
    if a > TWO_PI - 1e-9:
        a = 0.0
    return round(a, 9), 1 if m.det() > 0 else -1


def _dedupe(matrices: Sequence[PlanarMatrix]) -> List[PlanarMatrix]:
    kept: List[PlanarMatrix] = []
    for m in matrices:
        if not any(m.is_close(k, _SAME_MATRIX) for k in kept):
            kept.append(m)
    return kept


def _basis(holonomy: HolonomySet) -> Tuple[Vec2, Vec2]:
    by_angle = sorted(holonomy.vectors, key=lambda v: (round(v.angle(), 9), v.norm()))
    u1 = by_angle[0]
    for v in by_angle[1:]:
        if abs(u1.cross(v)) > get_epsilon() * 100 * max(1.0, u1.norm() * v.norm()):
            return u1, v
    raise DegenerateHolonomy("holonomy vectors are all parallel")


def candidate_derivatives(
    surface: TranslationSurface, max_workers: Optional[int] = None, verbose: bool = False
) -> List[PlanarMatrix]:
    """Unit-determinant matrices that map the shortest holonomy vectors onto themselves."""
    if not surface.sigma:
        raise NoConePoints("the surface has no cone points")
    bound = shortest_saddle_length(surface) * (1 + 1e-6)
    for _ in range(_DEFAULT_MAX_DOUBLINGS + 1):
        vectors = holonomy_set(surface, bound, max_workers=max_workers)
        if vectors.spans():
            break
        bound *= 2
    else:
        raise DegenerateHolonomy(f"saddle holonomies up to {bound / 2:.6g} do not span the plane")

    u1, u2 = _basis(vectors)
    found = []
    for v1 in vectors.vectors:
        for v2 in vectors.vectors:
            m = solve_pair_map(u1, u2, v1, v2)
            if m is not None and vectors.transformed(m).same_as(vectors):
                found.append(m)
    candidates = sorted(_dedupe(found), key=lambda m: (m.det() < 0, _angle_key(m)))
    if verbose:
        print(
            f"[Veech] {len(candidates)} candidate derivative(s) from {len(vectors)} "
            f"holonomy vector(s) up to {bound:.6g}",
            file=sys.stderr,
        )
    return candidates


# Groups


class GroupKind(str, Enum):
    TRIVIAL = "Trivial"
    CYCLIC = "Cyclic"
    DIHEDRAL = "Dihedral"


@dataclass(frozen=True)
class GroupType:
    kind: GroupKind
    rotation_order: int = 1

    def __str__(self) -> str:
        if self.kind is GroupKind.TRIVIAL:
            return self.kind.value
        return f"{self.kind.value}({self.rotation_order})"

    @property
    def order(self) -> int:
        return 2 * self.rotation_order if self.kind is GroupKind.DIHEDRAL else self.rotation_order


@dataclass(frozen=True, eq=False)
class VeechGroup:
    elements: List[PlanarMatrix]
    group_type: GroupType
    witnesses: List[AffineAutomorphism] = field(default_factory=list, repr=False)
    translation_automorphisms: List[AffineAutomorphism] = field(default_factory=list, repr=False)
    non_isometric: List[PlanarMatrix] = field(default_factory=list)
    isometric_only: bool = False
    candidates_tried: int = 0

    @property
    def rotation_order(self) -> int:
        return self.group_type.rotation_order

    @property
    def reflection_count(self) -> int:
        return sum(1 for m in self.elements if m.det() < 0)

    @property
    def order(self) -> int:
        return len(self.elements)

    def describe(self) -> str:
        text = f"{self.group_type}, order {self.order}"
        return text + " (isometric subgroup only)" if self.isometric_only else text


def _index_of(m: PlanarMatrix, elements: Sequence[PlanarMatrix], tol: float) -> Optional[int]:
    return next((k for k, e in enumerate(elements) if m.is_close(e, tol)), None)


def _closed(elements: Sequence[PlanarMatrix], tol: float) -> bool:
    for a in elements:
        if _index_of(a.inverse(), elements, tol) is None:
            return False
        for b in elements:
            if _index_of(a @ b, elements, tol) is None:
                return False
    return True


def classify_group(elements: Sequence[PlanarMatrix], tol: Optional[float] = None) -> GroupType:
    """Cyclic or dihedral type of a finite group of orthogonal matrices."""
    tol = get_epsilon() * 10 if tol is None else tol
    if not elements:
        raise NotAGroup("no elements")
    for m in elements:
        if not m.is_orthogonal(_ORTHOGONAL_TOL):
            raise NotAGroup(f"{tuple(m)} is not orthogonal")
    if _index_of(IDENTITY, elements, tol) is None:
        raise NotAGroup("the identity is missing")
    if not _closed(elements, tol):
        raise NotAGroup("not closed under products and inverses")

    rotations = [m for m in elements if m.det() > 0]
    r = len(rotations)
    reflections = len(elements) - r
    if reflections not in (0, r):
        raise NotAGroup(f"{r} rotation(s) but {reflections} reflection(s)")
    if r > 1:
        smallest = min(a for a in (_angle_key(m)[0] for m in rotations) if a > 0)
        k = round(TWO_PI / smallest)
        if k != r or k > _MAX_ROTATION_ORDER or abs(TWO_PI / k - smallest) > 1e-6:
            raise NotAGroup(f"rotation angles do not form a cyclic group of order {r}")
    if len(elements) == 1:
        return GroupType(GroupKind.TRIVIAL)
    return GroupType(GroupKind.DIHEDRAL if reflections else GroupKind.CYCLIC, r)


def compute_veech_group(
    surface: TranslationSurface, max_workers: Optional[int] = None, verbose: bool = False
) -> VeechGroup:
    """The isometric part of the Veech group, with a witness per element."""
    if not surface.sigma:
        raise NoConePoints("the surface has no cone points")
    workers = _DEFAULT_MAX_WORKERS if max_workers is None else max_workers
    candidates = candidate_derivatives(surface, max_workers=workers, verbose=verbose)
    delaunay_triangulation(surface)
    results = fan_out(lambda m: verify_affine(surface, m), candidates, workers)

    verified = [w for w in results if w is not None]
    witnesses = [w for w in verified if w.derivative.is_orthogonal(_ORTHOGONAL_TOL)]
    non_isometric = [w.derivative for w in verified if not w.derivative.is_orthogonal(_ORTHOGONAL_TOL)]
    witnesses.sort(key=lambda w: _angle_key(w.derivative))
    elements = [w.derivative for w in witnesses]
    if not _closed(elements, get_epsilon() * 10):
        raise NotClosed(f"{len(elements)} verified derivatives are not closed under products")
    group_type = classify_group(elements)
    translations = translation_automorphisms(surface)
    if verbose:
        print(
            f"[Veech] {len(elements)}/{len(candidates)} candidates verified: {group_type}"
            + (f", {len(translations)} translation automorphism(s)" if translations else ""),
            file=sys.stderr,
        )
    return VeechGroup(
        elements=elements,
        group_type=group_type,
        witnesses=witnesses,
        translation_automorphisms=translations,
        non_isometric=non_isometric,
        isometric_only="family" not in surface.metadata,
        candidates_tried=len(candidates),
    )
