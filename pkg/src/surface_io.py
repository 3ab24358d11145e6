"""
surface_io.py -- Surface files: versioned JSON with full-precision numbers.

Numbers are written as decimal strings with 17 significant digits, so a
saved surface reads back to the same floats and saves to the same bytes.
Files are parsed with json5: comments and trailing commas are allowed in
hand-written surfaces.
"""

import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Union

import json5

from .errors import ParseError, SurfaceError, ValidationError
from .geom_core import PlanarPolygon, Vec2
from .surface import EdgePairing, SurfacePoint, TranslationSurface, build_surface

FORMAT_VERSION = 1


def format_number(x: float) -> str:
    return format(float(x) + 0.0, ".17g")


def _number(value: Any, where: str) -> float:
    try:
        return float(value)
    except (TypeError, ValueError):
        raise ParseError(f"{where}: expected a number, got {value!r}") from None


def _edge_ref(value: Any, where: str) -> List[int]:
    if not isinstance(value, (list, tuple)) or len(value) != 2:
        raise ParseError(f"{where}: expected [polygon, edge], got {value!r}")
    try:
        return [int(value[0]), int(value[1])]
    except (TypeError, ValueError):
        raise ParseError(f"{where}: expected integer indices, got {value!r}") from None


def surface_to_dict(surface: TranslationSurface) -> Dict:
    return {
        "format_version": FORMAT_VERSION,
        "polygons": [
            [[format_number(v.x), format_number(v.y)] for v in poly.vertices] for poly in surface.polygons
        ],
        "pairing": [[[a.polygon, a.edge], [b.polygon, b.edge]] for a, b in surface.pairing],
        "marked_points": [
            {
                "name": name,
                "polygon": p.polygon,
                "x": format_number(p.position.x),
                "y": format_number(p.position.y),
            }
            for name, p in surface.marked_points.items()
        ],
        "designated": [[c.polygon, c.edge] for c in sorted(surface.designated)],
        "metadata": surface.metadata,
    }


def surface_from_dict(data: Any, verbose: bool = False) -> TranslationSurface:
    if not isinstance(data, dict):
        raise ParseError("surface file must hold an object")
    version = data.get("format_version")
    if version != FORMAT_VERSION:
        raise ParseError(f"unsupported format_version {version!r}, expected {FORMAT_VERSION}")
    for key in ("polygons", "pairing"):
        if not isinstance(data.get(key), list):
            raise ParseError(f"missing or malformed '{key}'")

    polygons = []
    for i, verts in enumerate(data["polygons"]):
        if not isinstance(verts, list) or len(verts) < 3:
            raise ParseError(f"polygons[{i}]: expected a list of at least 3 vertices")
        pts = []
        for k, v in enumerate(verts):
            if not isinstance(v, (list, tuple)) or len(v) != 2:
                raise ParseError(f"polygons[{i}][{k}]: expected [x, y]")
            pts.append(Vec2(_number(v[0], f"polygons[{i}][{k}]"), _number(v[1], f"polygons[{i}][{k}]")))
        polygons.append(pts)

    pairs = []
    for k, pair in enumerate(data["pairing"]):
        if not isinstance(pair, (list, tuple)) or len(pair) != 2:
            raise ParseError(f"pairing[{k}]: expected two edge references")
        pairs.append((_edge_ref(pair[0], f"pairing[{k}]"), _edge_ref(pair[1], f"pairing[{k}]")))

    marked: Dict[str, SurfacePoint] = {}
    for k, item in enumerate(data.get("marked_points") or []):
        if not isinstance(item, dict) or "name" not in item:
            raise ParseError(f"marked_points[{k}]: expected an object with a name")
        where = f"marked point {item['name']}"
        marked[str(item["name"])] = SurfacePoint(
            int(_number(item.get("polygon"), where)),
            Vec2(_number(item.get("x"), where), _number(item.get("y"), where)),
        )
    designated = [_edge_ref(c, f"designated[{k}]") for k, c in enumerate(data.get("designated") or [])]
    metadata = data.get("metadata") or {}
    if not isinstance(metadata, dict):
        raise ParseError("'metadata' must be an object")

    try:
        return build_surface(
            [PlanarPolygon(tuple(pts)) for pts in polygons],
            EdgePairing(pairs),
            marked_points=marked,
            designated=designated,
            metadata=metadata,
            verbose=verbose,
        )
    except SurfaceError as e:
        raise ValidationError(type(e).__name__, str(e)) from e


def load_surface(path: Union[str, Path], verbose: bool = False) -> TranslationSurface:
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e}") from e
    try:
        data = json5.loads(raw)
    except ValueError as e:
        raise ParseError(f"{path}: {e}") from e
    return surface_from_dict(data, verbose=verbose)


def save_json(path: Union[str, Path], data: Any, verbose: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, ensure_ascii=False, indent=2)
    if verbose:
        print(f"  -> Saved: {path}", file=sys.stderr)


def save_surface(surface: TranslationSurface, path: Union[str, Path], verbose: bool = True) -> None:
    save_json(path, surface_to_dict(surface), verbose=verbose)
