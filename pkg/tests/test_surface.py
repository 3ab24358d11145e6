import math

import pytest

from src.constructions import FamilyKind, build_default
from src.errors import DegeneratePolygon, IncongruentPair, NonParallelPair, UnpairedEdge
from src.geom_core import PlanarMatrix, PlanarPolygon, Vec2, vec_close
from src.surface import (
    EdgePairing,
    EdgeRef,
    SurfacePoint,
    build_surface,
    cone_points,
    gauss_bonnet_defect,
)

SQUARE = PlanarPolygon((Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)))
TORUS_PAIRS = [((0, 0), (0, 2)), ((0, 1), (0, 3))]


def test_torus_has_no_cone_points(torus):
    assert torus.genus == 1
    assert len(torus.cone_classes) == 1
    assert torus.sigma == []
    assert cone_points(torus) == []
    assert gauss_bonnet_defect(torus) == pytest.approx(0.0)


def test_octagon_cone_data(octagon):
    assert octagon.genus == 2
    assert len(octagon.sigma) == 1
    assert octagon.sigma[0].angle == pytest.approx(6 * math.pi)
    assert octagon.sigma[0].multiplicity == 3
    assert gauss_bonnet_defect(octagon) == pytest.approx(0.0, abs=1e-9)


def test_dihedral_even_cone_data(dihedral4):
    surface = dihedral4.surface
    assert len(surface.polygons[0]) == 20
    assert surface.num_edges == 10
    assert surface.genus == 5
    assert [round(c.angle / math.pi) for c in surface.sigma] == [18]


def test_dihedral_six_has_two_cone_points():
    surface = build_default(FamilyKind.DIHEDRAL, 6).surface
    assert surface.genus == 7
    assert sorted(round(c.angle / math.pi) for c in surface.sigma) == [14, 14]


def test_incongruent_pair_is_rejected():
    trapezoid = PlanarPolygon((Vec2(0, 0), Vec2(2, 0), Vec2(1.5, 1), Vec2(0.5, 1)))
    with pytest.raises(IncongruentPair):
        build_surface([trapezoid], EdgePairing([((0, 0), (0, 2)), ((0, 1), (0, 3))]))


def test_non_parallel_pair_is_rejected():
    with pytest.raises(NonParallelPair):
        build_surface([SQUARE], EdgePairing([((0, 0), (0, 1)), ((0, 2), (0, 3))]))


def test_unpaired_edge_is_rejected():
    with pytest.raises(UnpairedEdge):
        build_surface([SQUARE], EdgePairing([((0, 0), (0, 2))]))
    with pytest.raises(UnpairedEdge):
        EdgePairing([((0, 0), (0, 2)), ((0, 0), (0, 1))])
    with pytest.raises(UnpairedEdge):
        build_surface([SQUARE], EdgePairing(TORUS_PAIRS + [((0, 4), (1, 0))]))


def test_marked_point_outside_polygon():
    with pytest.raises(DegeneratePolygon):
        build_surface([SQUARE], EdgePairing(TORUS_PAIRS), marked_points={"X": SurfacePoint(0, Vec2(2.0, 0.5))})


def test_pairing_partner_and_order():
    pairing = EdgePairing([((0, 2), (0, 0)), ((0, 3), (0, 1))])
    assert pairing.partner((0, 2)) == EdgeRef(0, 0)
    assert pairing.partner((0, 0)) == EdgeRef(0, 2)
    assert list(pairing)[0] == (EdgeRef(0, 0), EdgeRef(0, 2))
    assert len(pairing) == 2
    assert (0, 3) in pairing


def test_gluing_translation(torus):
    assert vec_close(torus.gluing_translation(EdgeRef(0, 0)), Vec2(0.0, 1.0))
    assert vec_close(torus.gluing_translation(EdgeRef(0, 3)), Vec2(1.0, 0.0))


def test_canonical_point_on_a_glued_edge(torus):
    p = torus.canonical_point(SurfacePoint(0, Vec2(0.3, 1.0)))
    assert p.polygon == 0
    assert vec_close(p.position, Vec2(0.3, 0.0), 1e-12)
    assert torus.same_point(SurfacePoint(0, Vec2(0.3, 1.0)), SurfacePoint(0, Vec2(0.3, 0.0)))
    assert not torus.same_point(SurfacePoint(0, Vec2(0.3, 0.5)), SurfacePoint(0, Vec2(0.3, 0.0)))


def test_canonical_point_at_a_corner(torus):
    p = torus.canonical_point(SurfacePoint(0, Vec2(1.0, 1.0)))
    assert p == torus.cone_classes[0].representative


def test_marked_points_are_stored_canonically():
    surface = build_surface(
        [SQUARE], EdgePairing(TORUS_PAIRS), marked_points={"E": SurfacePoint(0, Vec2(0.0, 0.25))}
    )
    assert vec_close(surface.marked_points["E"].position, Vec2(1.0, 0.25), 1e-12)


def test_designated_corner_joins_sigma():
    surface = build_surface([SQUARE], EdgePairing(TORUS_PAIRS), designated=[(0, 2)])
    assert len(surface.sigma) == 1
    assert surface.sigma[0].angle == pytest.approx(2 * math.pi)


def test_transformed_surface_keeps_the_cone_data(octagon):
    for m in (PlanarMatrix.rotation(0.4), PlanarMatrix.reflection(0.1), PlanarMatrix(1.0, 0.5, 0.0, 1.0)):
        image = octagon.transformed(m)
        assert image.genus == 2
        assert len(image.sigma) == 1
        assert image.sigma[0].angle == pytest.approx(6 * math.pi)


def test_transformed_keeps_designated_classes(torus):
    designated = build_surface(torus.polygons, torus.pairing, designated=[(0, 0)])
    image = designated.transformed(PlanarMatrix.reflection(0.0))
    assert len(image.sigma) == 1


def test_pairing_table_lists_every_pair(dihedral4):
    rows = dihedral4.surface.pairing_table()
    assert len(rows) == 10
    assert "<->" in rows[0]
