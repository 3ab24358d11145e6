import math

import pytest

from src.constructions import (
    FamilyKind,
    FamilySpec,
    build_cyclic,
    build_default,
    build_dihedral,
    build_from_spec,
    default_lengths,
    leaves_invariant,
)
from src.errors import BadParameters
from src.geom_core import PlanarMatrix, polygon_area
from src.surface import gauss_bonnet_defect


def _apothem(built):
    return built.spec.l1 / (2 * math.tan(built.theta / 2))


def _axes(built):
    sides = built.spec.sides
    return [PlanarMatrix.reflection(math.pi / 2 + k * math.pi / sides) for k in range(sides)]


@pytest.mark.parametrize(
    "spec",
    [
        FamilySpec(FamilyKind.DIHEDRAL, 2, 1.0, 0.2),
        FamilySpec(FamilyKind.DIHEDRAL, 4, 1.0, 0.4),
        FamilySpec(FamilyKind.DIHEDRAL, 4, 1.0, 0.0),
        FamilySpec(FamilyKind.DIHEDRAL, 4, 1.0, 0.2, 0.05),
        FamilySpec(FamilyKind.CYCLIC, 4, 1.0, 0.2),
        FamilySpec(FamilyKind.CYCLIC, 4, 1.0, 0.2, 0.1),
    ],
)
def test_bad_parameters(spec):
    with pytest.raises(BadParameters):
        build_from_spec(spec)


@pytest.mark.parametrize("kind", list(FamilyKind))
def test_default_lengths_are_valid(kind):
    l1, l2, l3 = default_lengths(kind, 5)
    FamilySpec(kind, 5, l1, l2, l3).validate()


def test_spec_dict_round_trip():
    spec = FamilySpec(FamilyKind.CYCLIC, 5, 1.0, 0.25, 0.1)
    assert FamilySpec.from_dict(spec.to_dict()) == spec
    assert spec.to_dict()["kind"] == "cyclic"


def test_even_dihedral_layout(dihedral4):
    assert dihedral4.spec.sides == 4
    assert dihedral4.theta == pytest.approx(math.pi / 2)
    assert len(dihedral4.P) == 4
    assert len(dihedral4.S) == 4
    assert dihedral4.T_segs == []
    assert sorted(dihedral4.surface.marked_points) == ["O", "P1", "P2", "P3", "P4"]
    for s in dihedral4.S:
        assert s.length == pytest.approx(_apothem(dihedral4) + dihedral4.spec.l2 / 2, abs=1e-9)


def test_odd_dihedral_layout(dihedral3):
    assert dihedral3.spec.sides == 6
    assert dihedral3.theta == pytest.approx(math.pi / 3)
    assert len(dihedral3.surface.polygons[0]) == 42
    assert len(dihedral3.P) == 6
    for s in dihedral3.S:
        assert s.length == pytest.approx(_apothem(dihedral3) + dihedral3.spec.l2 / 2, abs=1e-9)


def test_cyclic_segments(cyclic4):
    spec = cyclic4.spec
    expected = math.hypot(_apothem(cyclic4) + spec.l2 / 2, spec.l3)
    for s in cyclic4.S:
        assert s.length == pytest.approx(expected, abs=1e-9)
    assert len(cyclic4.T_segs) == 4
    circumradius = spec.l1 / (2 * math.sin(cyclic4.theta / 2))
    for t in cyclic4.T_segs:
        assert t.length == pytest.approx(circumradius, abs=1e-9)


def test_polygon_area_accounts_for_the_squares(dihedral4, cyclic4):
    for built in (dihedral4, cyclic4):
        spec = built.spec
        _, central = built.test_polygons()
        expected = polygon_area(central.vertices) + spec.sides * spec.l2**2
        assert polygon_area(built.surface.polygons[0].vertices) == pytest.approx(expected)


def test_test_polygons(cyclic3):
    square, central = cyclic3.test_polygons()
    assert len(square) == 4
    assert square.edge_vector(0).norm() == pytest.approx(cyclic3.spec.l2)
    assert len(central) == 6
    assert central.edge_vector(0).norm() == pytest.approx(cyclic3.spec.l1)


def test_rotation_leaves_the_segments_invariant(dihedral4, cyclic4):
    for built in (dihedral4, cyclic4):
        r = PlanarMatrix.rotation(2 * math.pi / built.spec.n)
        assert leaves_invariant(r, built.sigma_vectors())
        assert not leaves_invariant(PlanarMatrix.rotation(math.pi / 5), built.sigma_vectors())


def test_dihedral_segments_have_mirror_symmetry(dihedral4):
    assert any(leaves_invariant(f, dihedral4.sigma_vectors()) for f in _axes(dihedral4))


def test_no_reflection_keeps_both_cyclic_segment_sets(cyclic4, cyclic3):
    for built in (cyclic4, cyclic3):
        assert any(leaves_invariant(f, built.tau_vectors()) for f in _axes(built))
        for f in _axes(built):
            assert not (leaves_invariant(f, built.tau_vectors()) and leaves_invariant(f, built.sigma_vectors()))


def test_builders_agree(dihedral4):
    again = build_dihedral(4, dihedral4.spec.l1, dihedral4.spec.l2)
    assert again.surface.metadata == dihedral4.surface.metadata
    assert again.surface.pairing.pairs == dihedral4.surface.pairing.pairs
    cyclic = build_cyclic(4, 1.0, 0.25, 0.1)
    assert cyclic.spec.kind is FamilyKind.CYCLIC


@pytest.mark.slow
@pytest.mark.parametrize("kind", list(FamilyKind))
@pytest.mark.parametrize("n", range(3, 9))
def test_family_sweep(kind, n):
    built = build_default(kind, n)
    surface = built.surface
    assert abs(gauss_bonnet_defect(surface)) <= 1e-8 * len(surface.cone_classes)
    assert surface.genus >= 2
    assert len(built.P) == built.spec.sides
    assert surface.marked_points["O"] == built.O
