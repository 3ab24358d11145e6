import math

import pytest

from src.constructions import FamilyKind, build_default
from src.errors import NoConePoints, NonUnitDeterminant, NotAGroup, NoVertices
from src.geom_core import MatrixClass, PlanarMatrix, Vec2, classify_matrix
from src.surface import SurfacePoint
from src.veech import (
    GroupKind,
    GroupType,
    apply_automorphism,
    candidate_derivatives,
    classify_group,
    compute_veech_group,
    delaunay_triangulation,
    permutes_points,
    translation_automorphisms,
    verify_affine,
)

QUARTER = PlanarMatrix.rotation(math.pi / 2)


def _rotations(k):
    return [PlanarMatrix.rotation(2 * math.pi * j / k) for j in range(k)]


def _reflections(k):
    return [PlanarMatrix.reflection(math.pi * j / k) for j in range(k)]


@pytest.fixture(scope="module")
def dihedral4_group(dihedral4):
    return compute_veech_group(dihedral4.surface)


def _witness(group, m):
    return next(w for w in group.witnesses if w.derivative.is_close(m, 1e-9))


def test_classify_group_types():
    assert classify_group([PlanarMatrix.identity()]) == GroupType(GroupKind.TRIVIAL)
    assert classify_group(_rotations(4)) == GroupType(GroupKind.CYCLIC, 4)
    assert classify_group(_rotations(3) + _reflections(3)) == GroupType(GroupKind.DIHEDRAL, 3)
    assert classify_group([PlanarMatrix.identity(), PlanarMatrix.reflection(0.3)]) == GroupType(GroupKind.DIHEDRAL, 1)


def test_classify_group_rejects_non_groups():
    with pytest.raises(NotAGroup):
        classify_group([])
    with pytest.raises(NotAGroup):
        classify_group(_rotations(4)[1:])
    with pytest.raises(NotAGroup):
        classify_group(_rotations(4)[:3])
    with pytest.raises(NotAGroup):
        classify_group([PlanarMatrix.identity(), PlanarMatrix(1.0, 1.0, 0.0, 1.0)])


def test_group_type_text():
    assert str(GroupType(GroupKind.DIHEDRAL, 4)) == "Dihedral(4)"
    assert str(GroupType(GroupKind.CYCLIC, 5)) == "Cyclic(5)"
    assert str(GroupType(GroupKind.TRIVIAL)) == "Trivial"
    assert GroupType(GroupKind.DIHEDRAL, 4).order == 8
    assert GroupType(GroupKind.CYCLIC, 5).order == 5


def test_delaunay_needs_vertices(torus, marked_torus):
    with pytest.raises(NoVertices):
        delaunay_triangulation(torus)
    assert delaunay_triangulation(marked_torus).is_delaunay()


def test_torus_has_no_finite_veech_computation(torus):
    with pytest.raises(NoConePoints):
        compute_veech_group(torus)


def test_verify_rejects_non_unit_determinant(octagon):
    with pytest.raises(NonUnitDeterminant):
        verify_affine(octagon, PlanarMatrix(2.0, 0.0, 0.0, 1.0))


def test_octagon_rotations(octagon):
    assert verify_affine(octagon, PlanarMatrix.rotation(math.pi / 4)) is not None
    assert verify_affine(octagon, PlanarMatrix.reflection(0.0)) is not None
    assert verify_affine(octagon, PlanarMatrix.rotation(math.pi / 6)) is None


def test_octagon_candidates_are_symmetries(octagon):
    candidates = candidate_derivatives(octagon)
    assert len(candidates) == 16
    assert all(m.is_orthogonal(1e-7) for m in candidates)
    assert candidates[0].is_close(PlanarMatrix.identity(), 1e-9)


def test_octagon_isometric_subgroup(octagon):
    group = compute_veech_group(octagon)
    assert group.isometric_only
    assert group.order == 16
    assert group.group_type == GroupType(GroupKind.DIHEDRAL, 8)
    assert any(m.is_close(PlanarMatrix.rotation(math.pi / 4), 1e-7) for m in group.elements)
    assert group.describe() == "Dihedral(8), order 16 (isometric subgroup only)"


def test_dihedral4_group(dihedral4_group):
    group = dihedral4_group
    assert group.group_type == GroupType(GroupKind.DIHEDRAL, 4)
    assert group.order == 8
    assert group.reflection_count == 4
    assert not group.isometric_only
    assert group.translation_automorphisms == []
    for m in group.elements:
        assert m.is_orthogonal(1e-9)
        assert classify_matrix(m) is MatrixClass.ELLIPTIC


def test_witnesses_fix_the_centre(dihedral4_group):
    for w in dihedral4_group.witnesses:
        assert w.fixes_marked["O"] == "O"
        assert w.fixes_marked["P1"].startswith("P")


def test_identity_witness_fixes_points(dihedral4, dihedral4_group):
    identity = _witness(dihedral4_group, PlanarMatrix.identity())
    assert identity.is_identity
    p = SurfacePoint(0, Vec2(0.05, 0.07))
    assert dihedral4.surface.same_point(apply_automorphism(dihedral4.surface, identity, p), p)


def test_quarter_turn_moves_the_squares(dihedral4, dihedral4_group):
    surface = dihedral4.surface
    w = _witness(dihedral4_group, QUARTER)
    assert surface.same_point(apply_automorphism(surface, w, dihedral4.O), dihedral4.O)
    image = apply_automorphism(surface, w, dihedral4.P[0])
    assert any(surface.same_point(image, p) for p in dihedral4.P[1:])
    assert permutes_points(surface, w, dihedral4.P)


def test_quarter_turn_rotates_around_the_centre(dihedral4, dihedral4_group):
    surface = dihedral4.surface
    w = _witness(dihedral4_group, QUARTER)
    x = Vec2(0.1, 0.05)
    image = apply_automorphism(surface, w, SurfacePoint(0, x))
    assert surface.same_point(image, SurfacePoint(0, QUARTER.apply(x)), 1e-7)


def test_every_witness_permutes_the_centres(dihedral4, dihedral4_group):
    for w in dihedral4_group.witnesses:
        assert permutes_points(dihedral4.surface, w, dihedral4.P)


def test_no_translation_automorphisms(dihedral4):
    assert translation_automorphisms(dihedral4.surface) == []


def test_cyclic4_group(cyclic4):
    group = compute_veech_group(cyclic4.surface)
    assert group.group_type == GroupType(GroupKind.CYCLIC, 4)
    assert group.reflection_count == 0
    assert verify_affine(cyclic4.surface, PlanarMatrix.reflection(math.pi / 2)) is None


def test_odd_dihedral_group(dihedral3):
    group = compute_veech_group(dihedral3.surface)
    assert group.group_type == GroupType(GroupKind.DIHEDRAL, 3)
    assert group.order == 6
    assert verify_affine(dihedral3.surface, PlanarMatrix.rotation(math.pi / 3)) is None


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 9))
def test_dihedral_sweep(n):
    group = compute_veech_group(build_default(FamilyKind.DIHEDRAL, n).surface)
    assert group.group_type == GroupType(GroupKind.DIHEDRAL, n)
    assert group.order == 2 * n
    assert all(classify_matrix(m) is MatrixClass.ELLIPTIC for m in group.elements)


@pytest.mark.slow
@pytest.mark.parametrize("n", range(3, 9))
def test_cyclic_sweep(n):
    group = compute_veech_group(build_default(FamilyKind.CYCLIC, n).surface)
    assert group.group_type == GroupType(GroupKind.CYCLIC, n)
    assert group.order == n
    assert group.reflection_count == 0


def test_reflections_survive_until_verification(cyclic4):
    candidates = candidate_derivatives(cyclic4.surface)
    assert len(candidates) == 8
    assert any(m.det() < 0 for m in candidates)


def test_split_octagon_rotations(split_octagon):
    assert verify_affine(split_octagon, PlanarMatrix.rotation(math.pi / 4)) is not None
    assert verify_affine(split_octagon, PlanarMatrix.rotation(math.pi / 6)) is None


def test_split_octagon_group(split_octagon):
    group = compute_veech_group(split_octagon)
    assert group.describe() == "Dihedral(8), order 16 (isometric subgroup only)"


def test_split_octagon_automorphism_moves_the_flat_point(split_octagon):
    w = verify_affine(split_octagon, PlanarMatrix.rotation(math.pi))
    assert w is not None
    cut = SurfacePoint(0, split_octagon.polygons[0].vertices[1])
    image = apply_automorphism(split_octagon, w, cut)
    assert split_octagon.same_point(apply_automorphism(split_octagon, w, image), cut, 1e-7)


def test_cyclic3_group(cyclic3):
    group = compute_veech_group(cyclic3.surface)
    assert group.group_type == GroupType(GroupKind.CYCLIC, 3)
    assert group.reflection_count == 0
