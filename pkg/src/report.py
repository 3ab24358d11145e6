"""
report.py -- Analysis reports and internal invariant checks.

analyze_surface() runs the whole pipeline on one surface: cone data,
shortest saddle connection, saddle count up to a bound, embedded copies of
the family test polygons and the isometric Veech group. check_invariants()
re-derives what must hold and returns issue dicts
{check, severity, message}; any "error" issue makes the analysis fail.
"""

import math
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

from .constructions import FamilySpec, build_from_spec
from .convex import find_copies
from .errors import NoConePoints
from .geom_core import TWO_PI, MatrixClass, classify_matrix
from .saddle import enumerate_saddle_connections, holonomy_set, shortest_saddle_length
from .surface import SurfacePoint, TranslationSurface, gauss_bonnet_defect
from .tracing import nearest_cone_distance
from .veech import VeechGroup, compute_veech_group, permutes_points

# Default saddle count bound, in units of the shortest connection.
_DEFAULT_BOUND_FACTOR = 3.0


def _point_dict(surface: TranslationSurface, p: SurfacePoint) -> Dict[str, Any]:
    name = next((n for n, q in surface.marked_points.items() if surface.same_point(p, q)), None)
    return {"polygon": p.polygon, "x": round(p.position.x, 12) + 0.0, "y": round(p.position.y, 12) + 0.0, "name": name}


@dataclass
class AnalysisReport:
    source: str
    genus: int
    cone_points: List[Dict[str, Any]]
    vertex_classes: int
    gauss_bonnet_defect: float
    shortest_saddle: Optional[float] = None
    bound: Optional[float] = None
    saddle_count: Optional[int] = None
    marked_distances: Dict[str, Optional[float]] = field(default_factory=dict)  # to Sigma
    copies: List[Dict[str, Any]] = field(default_factory=list)
    veech: Optional[Dict[str, Any]] = None
    issues: List[Dict[str, Any]] = field(default_factory=list)
    timing: Dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "source": self.source,
            "genus": self.genus,
            "cone_points": self.cone_points,
            "vertex_classes": self.vertex_classes,
            "gauss_bonnet_defect": self.gauss_bonnet_defect,
            "shortest_saddle": self.shortest_saddle,
            "bound": self.bound,
            "saddle_count": self.saddle_count,
            "marked_distances": self.marked_distances,
            "copies": self.copies,
            "veech": self.veech,
            "issues": self.issues,
            "timing": self.timing,
        }

    def format_text(self) -> str:
        lines = ["=" * 60, f"Surface: {self.source or '(unnamed)'}", "=" * 60]
        lines.append(f"  Genus:            {self.genus}")
        lines.append(f"  Vertex classes:   {self.vertex_classes}")
        cones = ", ".join(f"{c['angle_over_pi']:g}pi" for c in self.cone_points) or "none"
        lines.append(f"  Cone points:      {len(self.cone_points)} [{cones}]")
        lines.append(f"  Gauss-Bonnet:     defect {self.gauss_bonnet_defect:.3g}")
        if self.shortest_saddle is not None:
            lines.append(f"  Shortest saddle:  {self.shortest_saddle:.12g}")
            lines.append(f"  Saddles <= {self.bound:.6g}: {self.saddle_count}")
        for name, d in self.marked_distances.items():
            shown = "unreached" if d is None else f"{d:.12g}"
            lines.append(f"  Distance to Sigma from {name}: {shown}")
        for entry in self.copies:
            lines.append(f"  Copies of {entry['polygon']}: {entry['count']} (centroids: {entry['centroid_names']})")
        if self.veech is not None:
            lines.append(f"  Veech group:      {self.veech['description']}")
            for row in self.veech["elements"]:
                lines.append(
                    f"    [{row['matrix'][0]:+.9f} {row['matrix'][1]:+.9f}; "
                    f"{row['matrix'][2]:+.9f} {row['matrix'][3]:+.9f}]  {row['kind']}"
                )
            if self.veech["translation_automorphisms"]:
                lines.append(f"  Translation automorphisms: {self.veech['translation_automorphisms']}")
        errors = [i for i in self.issues if i.get("severity") == "error"]
        warnings = [i for i in self.issues if i.get("severity") == "warning"]
        lines.append(f"  Invariants:       {len(errors)} error(s), {len(warnings)} warning(s)")
        for issue in self.issues:
            lines.append(f"    [{issue['severity']}] {issue['check']}: {issue['message']}")
        lines.append("=" * 60)
        return "\n".join(lines)


def _element_row(m) -> Dict[str, Any]:
    angle = m.rotation_angle()
    return {
        "matrix": [round(x, 12) + 0.0 for x in m],
        "det": 1 if m.det() > 0 else -1,
        "angle_over_pi": round((0.0 if angle > TWO_PI - 1e-9 else angle) / math.pi, 9),
        "kind": "rotation" if m.det() > 0 else "reflection",
    }


def veech_summary(group: VeechGroup) -> Dict[str, Any]:
    return {
        "type": str(group.group_type),
        "order": group.order,
        "description": group.describe(),
        "isometric_only": group.isometric_only,
        "candidates_tried": group.candidates_tried,
        "elements": [_element_row(m) for m in group.elements],
        "fixes_marked": [w.fixes_marked for w in group.witnesses],
        "translation_automorphisms": len(group.translation_automorphisms),
        "non_isometric": len(group.non_isometric),
    }


def check_invariants(
    surface: TranslationSurface,
    group: Optional[VeechGroup] = None,
    centroid_sets: Optional[List[List[SurfacePoint]]] = None,
) -> List[Dict[str, Any]]:
    """Internal consistency checks; each failure is an issue dict."""
    issues: List[Dict[str, Any]] = []
    defect = gauss_bonnet_defect(surface)
    if abs(defect) > 1e-8 * max(1, len(surface.cone_classes)):
        issues.append({"check": "gauss_bonnet", "severity": "error", "message": f"angle defect {defect:.3g}"})

    if surface.sigma or surface.marked_points:
        tri = surface.delaunay
        if not tri.is_delaunay():
            issues.append(
                {"check": "delaunay", "severity": "error", "message": "an edge violates the Delaunay condition"}
            )
        chi = len(tri.vertex_ids()) - tri.num_edges() + len(tri)
        if chi != 2 - 2 * surface.genus:
            issues.append(
                {
                    "check": "euler_characteristic",
                    "severity": "error",
                    "message": f"V - E + F = {chi} on the Delaunay triangulation, expected {2 - 2 * surface.genus}",
                }
            )

    if group is None:
        return issues
    for m in group.elements:
        if classify_matrix(m) is not MatrixClass.ELLIPTIC:
            issues.append(
                {"check": "veech_elliptic", "severity": "error", "message": f"{tuple(m)} is not of finite order"}
            )
    bound = shortest_saddle_length(surface) * (1 + 1e-6)
    holonomy = holonomy_set(surface, bound)
    for m in group.elements:
        if not holonomy.transformed(m).same_as(holonomy):
            issues.append(
                {
                    "check": "holonomy_stable",
                    "severity": "error",
                    "message": f"{tuple(m)} does not preserve the shortest holonomy vectors",
                }
            )
    if "family" in surface.metadata:
        for w in group.witnesses:
            if w.fixes_marked.get("O") != "O":
                issues.append(
                    {
                        "check": "fixes_center",
                        "severity": "error",
                        "message": f"{tuple(w.derivative)} moves O to {w.fixes_marked.get('O')}",
                    }
                )
    for points in centroid_sets or []:
        for w in group.witnesses:
            if not permutes_points(surface, w, points):
                issues.append(
                    {
                        "check": "centroids_permuted",
                        "severity": "error",
                        "message": f"{tuple(w.derivative)} does not permute {len(points)} centroid(s)",
                    }
                )
    if group.translation_automorphisms:
        issues.append(
            {
                "check": "translation_automorphisms",
                "severity": "warning",
                "message": f"{len(group.translation_automorphisms)} non-trivial automorphism(s) with derivative I",
            }
        )
    return issues


def has_blocking_errors(issues: List[Dict]) -> bool:
    """Return True if any issue has severity='error'."""
    return any(i.get("severity") == "error" for i in issues)


def analyze_surface(
    surface: TranslationSurface,
    source: str = "",
    bound: Optional[float] = None,
    veech: bool = True,
    copies: bool = True,
    max_workers: Optional[int] = None,
    verbose: bool = False,
) -> AnalysisReport:
    timing: Dict[str, float] = {}
    t0 = time.time()
    report = AnalysisReport(
        source=source,
        genus=surface.genus,
        cone_points=[
            {
                "class": c.index,
                "angle_over_pi": round(c.angle / math.pi, 9),
                "multiplicity": c.multiplicity,
                "representative": _point_dict(surface, c.representative),
            }
            for c in surface.sigma
        ],
        vertex_classes=len(surface.cone_classes),
        gauss_bonnet_defect=round(gauss_bonnet_defect(surface), 12) + 0.0,
    )
    if veech and not surface.sigma:
        raise NoConePoints("the surface has no cone points; its Veech group is not finite-computable here")

    if surface.sigma:
        t = time.time()
        report.shortest_saddle = shortest_saddle_length(surface, verbose=verbose)
        report.bound = bound if bound is not None else _DEFAULT_BOUND_FACTOR * report.shortest_saddle
        report.saddle_count = len(
            enumerate_saddle_connections(surface, report.bound, max_workers=max_workers, verbose=verbose)
        )
        timing["saddle_sec"] = round(time.time() - t, 3)
        for name, p in surface.marked_points.items():
            d = nearest_cone_distance(surface, p)
            report.marked_distances[name] = None if math.isinf(d) else round(d, 12)

    centroid_sets: List[List[SurfacePoint]] = []
    family = surface.metadata.get("family")
    if copies and family and surface.sigma:
        t = time.time()
        built = build_from_spec(FamilySpec.from_dict(family))
        for label, polygon in zip(("square", "central polygon"), built.test_polygons()):
            found = find_copies(surface, polygon, max_workers=max_workers or 1, verbose=verbose)
            points: List[SurfacePoint] = []
            for c in found:
                if not any(surface.same_point(c.centroid, q) for q in points):
                    points.append(c.centroid)
            centroid_sets.append(points)
            names = sorted(_point_dict(surface, p)["name"] or "?" for p in points)
            report.copies.append(
                {"polygon": label, "count": len(found), "centroid_names": names}
            )
        timing["copies_sec"] = round(time.time() - t, 3)

    group = None
    if veech:
        t = time.time()
        group = compute_veech_group(surface, max_workers=max_workers, verbose=verbose)
        report.veech = veech_summary(group)
        timing["veech_sec"] = round(time.time() - t, 3)

    report.issues = check_invariants(surface, group, centroid_sets)
    timing["total_sec"] = round(time.time() - t0, 3)
    report.timing = timing
    if verbose:
        status = "FAILED" if has_blocking_errors(report.issues) else "ok"
        print(f"[Report] {source or 'surface'}: {status} in {timing['total_sec']}s", file=sys.stderr)
    return report
