import math

import pytest

from src.errors import DegeneratePolygon, DependentInput, NonUnitDeterminant
from src.geom_core import (
    MatrixClass,
    PlanarMatrix,
    PlanarPolygon,
    Vec2,
    ccw_angle,
    classify_matrix,
    congruence_map,
    get_epsilon,
    is_convex,
    orientation,
    point_in_polygon,
    polygon_area,
    polygon_centroid,
    regular_polygon,
    set_epsilon,
    solve_pair_map,
    strict_corners,
    vec_close,
)

UNIT_SQUARE = PlanarPolygon((Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)))


def test_vector_basics():
    v = Vec2(3.0, 4.0)
    assert v.norm() == 5.0
    assert v + Vec2(1, 1) == Vec2(4.0, 5.0)
    assert -v == Vec2(-3.0, -4.0)
    assert Vec2(1, 0).cross(Vec2(0, 1)) == 1.0
    assert vec_close(Vec2(1, 0).rotated(math.pi / 2), Vec2(0, 1), 1e-12)


def test_ccw_angle_range():
    assert ccw_angle(Vec2(1, 0), Vec2(0, 1)) == pytest.approx(math.pi / 2)
    assert ccw_angle(Vec2(1, 0), Vec2(0, -1)) == pytest.approx(3 * math.pi / 2)
    assert ccw_angle(Vec2(1, 0), Vec2(2, 0)) == 0.0


def test_orientation():
    o, x, y = Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)
    assert orientation(o, x, y) == 1
    assert orientation(o, y, x) == -1
    assert orientation(o, x, Vec2(2, 0)) == 0


def test_matrix_algebra():
    r = PlanarMatrix.rotation(math.pi / 3)
    assert (r @ r).is_close(PlanarMatrix.rotation(2 * math.pi / 3), 1e-12)
    assert (r @ r.inverse()).is_close(PlanarMatrix.identity(), 1e-12)
    assert r.det() == pytest.approx(1.0)
    assert r.is_orthogonal()
    f = PlanarMatrix.reflection(0.3)
    assert f.det() == pytest.approx(-1.0)
    assert (f @ f).is_close(PlanarMatrix.identity(), 1e-12)


@pytest.mark.parametrize(
    "m, expected",
    [
        (PlanarMatrix.identity(), MatrixClass.ELLIPTIC),
        (PlanarMatrix(-1.0, 0.0, 0.0, -1.0), MatrixClass.ELLIPTIC),
        (PlanarMatrix.rotation(0.3), MatrixClass.ELLIPTIC),
        (PlanarMatrix.reflection(0.2), MatrixClass.ELLIPTIC),
        (PlanarMatrix(1.0, 1.0, 0.0, 1.0), MatrixClass.PARABOLIC),
        (PlanarMatrix(2.0, 0.0, 0.0, 0.5), MatrixClass.HYPERBOLIC),
    ],
)
def test_classify_matrix(m, expected):
    assert classify_matrix(m) is expected


def test_classify_matrix_rejects_non_unit_determinant():
    with pytest.raises(NonUnitDeterminant):
        classify_matrix(PlanarMatrix(2.0, 0.0, 0.0, 1.0))


def test_solve_pair_map():
    m = solve_pair_map(Vec2(1, 0), Vec2(0, 1), Vec2(0, 1), Vec2(-1, 0))
    assert m.is_close(PlanarMatrix.rotation(math.pi / 2), 1e-12)
    assert solve_pair_map(Vec2(1, 0), Vec2(0, 1), Vec2(2, 0), Vec2(0, 1)) is None
    with pytest.raises(DependentInput):
        solve_pair_map(Vec2(1, 0), Vec2(2, 0), Vec2(1, 0), Vec2(0, 1))


def test_polygon_validation():
    with pytest.raises(DegeneratePolygon):
        PlanarPolygon((Vec2(0, 0), Vec2(0, 1), Vec2(1, 1), Vec2(1, 0)))
    with pytest.raises(DegeneratePolygon):
        PlanarPolygon((Vec2(0, 0), Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)))
    with pytest.raises(DegeneratePolygon):
        PlanarPolygon((Vec2(0, 0), Vec2(1, 0)))


def test_area_centroid_and_containment():
    assert polygon_area(UNIT_SQUARE.vertices) == pytest.approx(1.0)
    assert vec_close(polygon_centroid(UNIT_SQUARE), Vec2(0.5, 0.5), 1e-12)
    assert point_in_polygon(Vec2(0.5, 0.5), UNIT_SQUARE)
    assert point_in_polygon(Vec2(1.0, 0.5), UNIT_SQUARE)
    assert not point_in_polygon(Vec2(1.0, 0.5), UNIT_SQUARE, strict=True)
    assert not point_in_polygon(Vec2(1.5, 0.5), UNIT_SQUARE)


def test_strict_corners_drops_straight_vertices():
    verts = [Vec2(0, 0), Vec2(0.5, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)]
    assert strict_corners(verts) == [Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)]
    assert is_convex(strict_corners(verts))


def test_regular_polygon():
    hexagon = regular_polygon(6, 2.0)
    assert len(hexagon) == 6
    for k in range(6):
        assert hexagon.edge_vector(k).norm() == pytest.approx(2.0)
    assert vec_close(hexagon.edge_vector(0), Vec2(2.0, 0.0), 1e-12)
    assert vec_close(polygon_centroid(hexagon), Vec2(0.0, 0.0), 1e-12)
    assert hexagon.interior_angle(0) == pytest.approx(2 * math.pi / 3)


def test_congruence_map_finds_rigid_motion():
    image = UNIT_SQUARE.transformed(PlanarMatrix.rotation(0.7), Vec2(3.0, -1.0))
    found = congruence_map(UNIT_SQUARE, image)
    assert found is not None
    m, t = found
    assert m.is_orthogonal(1e-9)
    for v in UNIT_SQUARE.vertices:
        assert any(vec_close(m.apply(v) + t, w, 1e-9) for w in image.vertices)
    assert congruence_map(UNIT_SQUARE, regular_polygon(4, 2.0)) is None


def test_epsilon_override():
    set_epsilon(1e-6)
    assert get_epsilon() == 1e-6
    with pytest.raises(ValueError):
        set_epsilon(0.0)
