from .constructions import (
    ConstructedSurface,
    FamilyKind,
    FamilySpec,
    build_cyclic,
    build_default,
    build_dihedral,
    regular_octagon_surface,
    square_torus,
)
from .convex import centroids, find_copies
from .geom_core import PlanarMatrix, PlanarPolygon, Vec2, get_epsilon, set_epsilon
from .report import analyze_surface, check_invariants, has_blocking_errors
from .saddle import enumerate_saddle_connections, holonomy_set, shortest_saddle_length
from .surface import EdgePairing, SurfacePoint, TranslationSurface, build_surface
from .surface_io import load_surface, save_surface
from .tracing import distance_to_cone_set, trace_ray
from .veech import (
    apply_automorphism,
    candidate_derivatives,
    classify_group,
    compute_veech_group,
    delaunay_triangulation,
    verify_affine,
)

__all__ = [
    "ConstructedSurface",
    "EdgePairing",
    "FamilyKind",
    "FamilySpec",
    "PlanarMatrix",
    "PlanarPolygon",
    "SurfacePoint",
    "TranslationSurface",
    "Vec2",
    "analyze_surface",
    "apply_automorphism",
    "build_cyclic",
    "build_default",
    "build_dihedral",
    "build_surface",
    "candidate_derivatives",
    "centroids",
    "check_invariants",
    "classify_group",
    "compute_veech_group",
    "delaunay_triangulation",
    "distance_to_cone_set",
    "enumerate_saddle_connections",
    "find_copies",
    "get_epsilon",
    "has_blocking_errors",
    "holonomy_set",
    "load_surface",
    "regular_octagon_surface",
    "save_surface",
    "set_epsilon",
    "shortest_saddle_length",
    "square_torus",
    "trace_ray",
    "verify_affine",
]
