"""
render.py -- SVG figures of surfaces as planar polygons.

Polygons are laid out left to right. Paired edges share a colour and a
number; cone points, marked points, geodesic segments and convex copies
are drawn on top. Output is byte-stable for fixed input: the SVG id salt
is fixed and no date is written.
"""

import sys
from pathlib import Path
from typing import List, Optional, Sequence, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.patches as patches  # noqa: E402
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import LineCollection  # noqa: E402

from .convex import ConvexCopy  # noqa: E402
from .geom_core import Vec2  # noqa: E402
from .surface import SurfacePoint, TranslationSurface  # noqa: E402
from .tracing import GeodesicSegment  # noqa: E402

OVERLAYS = ("copies", "segments", "centroids")

_GAP = 0.25
_PAIR_COLOURS = plt.get_cmap("tab20").colors


def layout_offsets(surface: TranslationSurface) -> List[Vec2]:
    """Translation of each polygon so that they sit side by side."""
    offsets = []
    cursor = 0.0
    for poly in surface.polygons:
        xs = [v.x for v in poly.vertices]
        offsets.append(Vec2(cursor - min(xs), 0.0))
        cursor += max(xs) - min(xs) + _GAP * max(1.0, max(xs) - min(xs))
    return offsets


def _placed(offsets: Sequence[Vec2], polygon: int, p: Vec2) -> Vec2:
    return p + offsets[polygon]


def render_surface(
    surface: TranslationSurface,
    out_path: Union[str, Path],
    overlays: Sequence[str] = (),
    segments: Sequence[GeodesicSegment] = (),
    copies: Sequence[ConvexCopy] = (),
    title: Optional[str] = None,
    verbose: bool = False,
) -> Path:
    unknown = set(overlays) - set(OVERLAYS)
    if unknown:
        raise ValueError(f"unknown overlay(s): {sorted(unknown)}")
    plt.rcParams["svg.hashsalt"] = "finite-veech"
    plt.rcParams["svg.fonttype"] = "none"
    offsets = layout_offsets(surface)
    fig, ax = plt.subplots(figsize=(8, 8))
    ax.set_aspect("equal")
    ax.axis("off")

    for i, poly in enumerate(surface.polygons):
        pts = [tuple(_placed(offsets, i, v)) for v in poly.vertices]
        ax.add_patch(patches.Polygon(pts, closed=True, facecolor="#f4f4f4", edgecolor="none", zorder=0))

    scale = max(
        max(v.norm() for v in (poly.edge_vector(k) for k in range(len(poly)))) for poly in surface.polygons
    )
    for k, (a, b) in enumerate(surface.pairing):
        colour = _PAIR_COLOURS[k % len(_PAIR_COLOURS)]
        for ref in (a, b):
            p, q = surface.polygons[ref.polygon].edge(ref.edge)
            p, q = _placed(offsets, ref.polygon, p), _placed(offsets, ref.polygon, q)
            ax.plot([p.x, q.x], [p.y, q.y], color=colour, linewidth=1.6, zorder=1)
            mid = (p + q) * 0.5
            inward = Vec2(-(q - p).y, (q - p).x).unit() * (0.04 * scale)
            label = mid + inward
            ax.text(label.x, label.y, str(k), fontsize=6, color=colour, ha="center", va="center", zorder=4)

    sigma = {c.index for c in surface.sigma}
    for corner, cls in sorted(surface.vertex_class.items()):
        if cls not in sigma:
            continue
        v = _placed(offsets, corner.polygon, surface.polygons[corner.polygon].vertices[corner.edge])
        ax.plot([v.x], [v.y], marker="o", markersize=4, color="black", zorder=5)

    for name, point in surface.marked_points.items():
        v = _placed(offsets, point.polygon, point.position)
        ax.plot([v.x], [v.y], marker="s", markersize=4, color="tab:red", zorder=6)
        ax.text(v.x, v.y, f" {name}", fontsize=7, color="tab:red", ha="left", va="bottom", zorder=6)

    if "segments" in overlays:
        lines = [
            [tuple(_placed(offsets, poly, a)), tuple(_placed(offsets, poly, b))]
            for segment in segments
            for poly, a, b in segment.pieces
        ]
        ax.add_collection(LineCollection(lines, colors="tab:blue", linewidths=1.0, zorder=3))

    if "copies" in overlays:
        for copy in copies:
            for poly, frag in copy.region:
                pts = [tuple(_placed(offsets, poly, v)) for v in frag]
                ax.add_patch(
                    patches.Polygon(pts, closed=True, fill=False, edgecolor="tab:green", linewidth=1.2, zorder=2)
                )

    if "centroids" in overlays:
        for copy in copies:
            c: SurfacePoint = copy.centroid
            v = _placed(offsets, c.polygon, c.position)
            ax.plot([v.x], [v.y], marker="x", markersize=6, color="tab:green", zorder=7)

    if title:
        ax.set_title(title)
    ax.autoscale_view()
    out_path = Path(out_path)
    fig.savefig(out_path, format="svg", bbox_inches="tight", metadata={"Date": None})
    plt.close(fig)
    if verbose:
        print(f"  -> Saved: {out_path}", file=sys.stderr)
    return out_path
