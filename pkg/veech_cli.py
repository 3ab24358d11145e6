"""
veech_cli.py -- Build, analyze and render translation surfaces.

Usage:
    python veech_cli.py build dihedral 4 -o surfaces/dihedral_4.json
    python veech_cli.py build cyclic 5 --l1 1 --l2 0.25 --l3 0.1 -o surfaces/cyclic_5.json
    python veech_cli.py analyze surfaces/dihedral_4.json --report out/dihedral_4_report.json
    python veech_cli.py render surfaces/dihedral_4.json -o figures/dihedral_4.svg --overlay copies segments

Exit codes: 0 success, 1 validation failure, 2 parse or I/O failure.
"""

import argparse
import sys
from pathlib import Path

from src.constructions import FamilyKind, FamilySpec, build_from_spec, default_lengths
from src.convex import find_copies
from src.errors import ParseError, SurfaceError
from src.geom_core import set_epsilon
from src.render import OVERLAYS, render_surface
from src.report import analyze_surface, has_blocking_errors
from src.surface_io import load_surface, save_json, save_surface

EXIT_OK, EXIT_INVALID, EXIT_PARSE = 0, 1, 2


def cmd_build(args) -> int:
    kind = FamilyKind(args.kind)
    l1, l2, l3 = default_lengths(kind, args.n)
    spec = FamilySpec(
        kind,
        args.n,
        args.l1 if args.l1 is not None else l1,
        args.l2 if args.l2 is not None else l2,
        args.l3 if args.l3 is not None else l3,
    )
    built = build_from_spec(spec, verbose=args.verbose)
    surface = built.surface
    print(f"{kind.value} N={spec.n}  l1={spec.l1:g}  l2={spec.l2:g}" + (f"  l3={spec.l3:g}" if spec.l3 else ""))
    print(f"  genus {surface.genus}, {len(surface.sigma)} cone point(s), {surface.num_edges} edge pairs")
    print("\n".join(surface.pairing_table()))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_surface(surface, out)
    return EXIT_OK


def cmd_analyze(args) -> int:
    surface = load_surface(args.path, verbose=args.verbose)
    report = analyze_surface(
        surface,
        source=Path(args.path).name,
        bound=args.bound,
        veech=not args.no_veech,
        copies=not args.no_copies,
        max_workers=args.max_workers,
        verbose=args.verbose,
    )
    print(report.format_text())
    out = Path(args.report) if args.report else Path(args.path).with_name(Path(args.path).stem + "_report.json")
    out.parent.mkdir(parents=True, exist_ok=True)
    save_json(out, report.to_dict())
    return EXIT_INVALID if has_blocking_errors(report.issues) else EXIT_OK


def cmd_render(args) -> int:
    surface = load_surface(args.path, verbose=args.verbose)
    overlays = args.overlay or []
    segments, copies = [], []
    family = surface.metadata.get("family")
    if overlays and family is None:
        print("[Render] overlays need a family surface; drawing the polygons only", file=sys.stderr)
        overlays = []
    if family is not None:
        built = build_from_spec(FamilySpec.from_dict(family))
        segments = built.S + built.T_segs
        if "copies" in overlays or "centroids" in overlays:
            for polygon in built.test_polygons():
                copies.extend(find_copies(surface, polygon, verbose=args.verbose))
    out = Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    render_surface(surface, out, overlays, segments, copies, title=args.title, verbose=True)
    return EXIT_OK


def main():
    parser = argparse.ArgumentParser(description="Finite Veech groups of translation surfaces")
    parser.add_argument("--epsilon", type=float, default=None, help="Override the global tolerance")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="Build a dihedral or cyclic family surface")
    build.add_argument("kind", choices=[k.value for k in FamilyKind])
    build.add_argument("n", type=int)
    build.add_argument("--l1", type=float, default=None)
    build.add_argument("--l2", type=float, default=None)
    build.add_argument("--l3", type=float, default=None, help="Slide of the squares (cyclic only)")
    build.add_argument("-o", "--output", required=True)

    analyze = sub.add_parser("analyze", help="Analyze a surface file")
    analyze.add_argument("path")
    analyze.add_argument("--bound", type=float, default=None, help="Saddle connection length bound L")
    analyze.add_argument("--no-veech", action="store_true", help="Skip the Veech group computation")
    analyze.add_argument("--no-copies", action="store_true", help="Skip the embedded copies search")
    analyze.add_argument("--report", default=None, help="Structured report path (default: <file>_report.json)")
    analyze.add_argument("--max-workers", type=int, default=None)

    render = sub.add_parser("render", help="Draw a surface file as SVG")
    render.add_argument("path")
    render.add_argument("-o", "--output", required=True)
    render.add_argument("--overlay", nargs="*", choices=OVERLAYS, default=None)
    render.add_argument("--title", default=None)

    args = parser.parse_args()
    if args.epsilon is not None:
        set_epsilon(args.epsilon)

    handlers = {"build": cmd_build, "analyze": cmd_analyze, "render": cmd_render}
    try:
        code = handlers[args.command](args)
    except ParseError as e:
        print(f"[Error] ParseError: {e}", file=sys.stderr)
        code = EXIT_PARSE
    except OSError as e:
        print(f"[Error] {type(e).__name__}: {e}", file=sys.stderr)
        code = EXIT_PARSE
    except SurfaceError as e:
        print(f"[Error] {type(e).__name__}: {e}", file=sys.stderr)
        code = EXIT_INVALID
    sys.exit(code)


if __name__ == "__main__":
    main()
