import json

import pytest

from src.errors import ParseError, ValidationError
from src.geom_core import vec_close
from src.surface_io import FORMAT_VERSION, format_number, load_surface, save_surface, surface_from_dict, surface_to_dict

TORUS_FILE = """
// unit square, opposite sides glued
{
  format_version: 1,
  polygons: [
    [[0, 0], [1, 0], [1, 1], [0, 1],],
  ],
  pairing: [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
  marked_points: [{name: "Q", polygon: 0, x: 0.5, y: 0.5}],
}
"""


def test_format_number():
    assert format_number(0.1) == "0.10000000000000001"
    assert format_number(-0.0) == "0"
    assert float(format_number(1 / 3)) == 1 / 3


def test_save_load_save_is_byte_identical(dihedral4, tmp_path):
    first, second = tmp_path / "a.json", tmp_path / "b.json"
    save_surface(dihedral4.surface, first, verbose=False)
    loaded = load_surface(first)
    save_surface(loaded, second, verbose=False)
    assert first.read_bytes() == second.read_bytes()
    assert loaded.metadata == dihedral4.surface.metadata
    assert loaded.genus == dihedral4.surface.genus
    assert loaded.pairing.pairs == dihedral4.surface.pairing.pairs
    for name, p in dihedral4.surface.marked_points.items():
        assert vec_close(loaded.marked_points[name].position, p.position, 0.0)


def test_designated_corners_survive(dihedral3, tmp_path):
    path = tmp_path / "d3.json"
    save_surface(dihedral3.surface, path, verbose=False)
    loaded = load_surface(path)
    assert loaded.designated == dihedral3.surface.designated
    assert len(loaded.sigma) == len(dihedral3.surface.sigma)


def test_hand_written_file_with_comments(tmp_path):
    path = tmp_path / "torus.json5"
    path.write_text(TORUS_FILE, encoding="utf-8")
    surface = load_surface(path)
    assert surface.genus == 1
    assert list(surface.marked_points) == ["Q"]


def test_dict_layout(octagon):
    data = surface_to_dict(octagon)
    assert data["format_version"] == FORMAT_VERSION
    assert len(data["polygons"][0]) == 8
    assert all(isinstance(x, str) for x in data["polygons"][0][0])
    assert len(data["pairing"]) == 4
    assert data["designated"] == []
    json.dumps(data)


@pytest.mark.parametrize(
    "data",
    [
        [],
        {"format_version": 2, "polygons": [], "pairing": []},
        {"format_version": 1, "pairing": []},
        {"format_version": 1, "polygons": [[[0, 0], [1, 0]]], "pairing": []},
        {"format_version": 1, "polygons": [[[0, 0], [1, "x"], [1, 1]]], "pairing": []},
        {"format_version": 1, "polygons": [[[0, 0], [1, 0], [0, 1]]], "pairing": [[[0, 0]]]},
        {"format_version": 1, "polygons": [[[0, 0], [1, 0], [0, 1]]], "pairing": [], "metadata": [1]},
    ],
)
def test_malformed_documents(data):
    with pytest.raises(ParseError):
        surface_from_dict(data)


def test_invalid_gluing_is_a_validation_error():
    data = {
        "format_version": 1,
        "polygons": [[[0, 0], [2, 0], [1.5, 1], [0.5, 1]]],
        "pairing": [[[0, 0], [0, 2]], [[0, 1], [0, 3]]],
    }
    with pytest.raises(ValidationError) as info:
        surface_from_dict(data)
    assert info.value.check == "IncongruentPair"


def test_unreadable_files(tmp_path):
    with pytest.raises(ParseError):
        load_surface(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{ polygons: [", encoding="utf-8")
    with pytest.raises(ParseError):
        load_surface(broken)
