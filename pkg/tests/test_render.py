import pytest

from src.convex import find_copies
from src.geom_core import PlanarPolygon, Vec2
from src.render import layout_offsets, render_surface
from src.surface import EdgePairing, build_surface


def test_plain_render(octagon, tmp_path):
    out = render_surface(octagon, tmp_path / "octagon.svg")
    text = out.read_text(encoding="utf-8")
    assert "<svg" in text


def test_render_is_byte_stable(dihedral4, tmp_path):
    a = render_surface(dihedral4.surface, tmp_path / "a.svg", title="dihedral N=4")
    b = render_surface(dihedral4.surface, tmp_path / "b.svg", title="dihedral N=4")
    assert a.read_bytes() == b.read_bytes()


def test_overlays(dihedral4, tmp_path):
    square, _ = dihedral4.test_polygons()
    copies = find_copies(dihedral4.surface, square)
    out = render_surface(
        dihedral4.surface,
        tmp_path / "overlays.svg",
        overlays=("copies", "segments", "centroids"),
        segments=dihedral4.S,
        copies=copies,
    )
    plain = render_surface(dihedral4.surface, tmp_path / "plain.svg")
    assert out.stat().st_size > plain.stat().st_size


def test_unknown_overlay(octagon, tmp_path):
    with pytest.raises(ValueError):
        render_surface(octagon, tmp_path / "x.svg", overlays=("heatmap",))


def test_polygons_are_laid_out_side_by_side():
    a = PlanarPolygon((Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)))
    b = PlanarPolygon((Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)))
    surface = build_surface(
        [a, b],
        EdgePairing([((0, 0), (1, 2)), ((0, 2), (1, 0)), ((0, 1), (0, 3)), ((1, 1), (1, 3))]),
    )
    offsets = layout_offsets(surface)
    assert offsets[0] == Vec2(0.0, 0.0)
    assert offsets[1].x > 1.0
