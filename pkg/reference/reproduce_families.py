#!/usr/bin/env python3
"""
reproduce_families.py -- Build every family surface and tabulate its data.

Usage:
    python reference/reproduce_families.py
    python reference/reproduce_families.py --n 3 4 5 --kinds dihedral -o reference/families.json

For each (kind, N) this builds the surface with the default lengths and
records genus, cone angles, the shortest saddle connection and the
isometric Veech group. The table goes to stdout, the full records to the
JSON file.
"""

import argparse
import math
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.constructions import FamilyKind, build_default  # noqa: E402
from src.saddle import shortest_saddle_length  # noqa: E402
from src.surface_io import save_json  # noqa: E402
from src.tracing import nearest_cone_distance  # noqa: E402
from src.veech import compute_veech_group  # noqa: E402


def family_row(kind: FamilyKind, n: int, veech: bool = True) -> dict:
    t0 = time.time()
    built = build_default(kind, n)
    surface = built.surface
    row = {
        "kind": kind.value,
        "n": n,
        "genus": surface.genus,
        "cone_angles_over_pi": sorted(round(c.angle / math.pi) for c in surface.sigma),
        "shortest_saddle": round(shortest_saddle_length(surface), 12),
        "o_distance": round(nearest_cone_distance(surface, built.O), 12),
        "group": None,
        "order": None,
    }
    if veech:
        group = compute_veech_group(surface)
        row["group"] = str(group.group_type)
        row["order"] = group.order
    row["elapsed_sec"] = round(time.time() - t0, 1)
    return row


def main():
    parser = argparse.ArgumentParser(description="Tabulate the dihedral and cyclic families")
    parser.add_argument("--n", type=int, nargs="*", default=list(range(3, 9)))
    parser.add_argument("--kinds", nargs="*", choices=[k.value for k in FamilyKind], default=[k.value for k in FamilyKind])
    parser.add_argument("--no-veech", action="store_true")
    parser.add_argument("-o", "--output", default=None)
    args = parser.parse_args()

    rows = []
    print(f"{'kind':<9} {'N':>2} {'genus':>5} {'cones (pi)':<18} {'shortest':>14} {'O to Sigma':>14}  group")
    for kind in args.kinds:
        for n in args.n:
            try:
                row = family_row(FamilyKind(kind), n, veech=not args.no_veech)
            except Exception as e:
                print(f"  [FAIL] {kind} N={n}: {type(e).__name__}: {e}", file=sys.stderr)
                continue
            rows.append(row)
            cones = ",".join(str(a) for a in row["cone_angles_over_pi"])
            group = f"{row['group']}, order {row['order']}" if row["group"] else "-"
            print(f"{kind:<9} {n:>2} {row['genus']:>5} {cones:<18} {row['shortest_saddle']:>14.10f} {row['o_distance']:>14.10f}  {group}")

    if args.output:
        save_json(Path(args.output), rows)


if __name__ == "__main__":
    main()
