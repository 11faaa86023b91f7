"""plot-regions: overlay region frontiers from CSV/JSON artifacts.

Usage:
    plot-regions --csv region_in.csv [--csv region_out1.csv ...] \
                 --meta metadata.json --out fig.svg
"""

from __future__ import annotations

import argparse
import sys

from .model import InputError, check_consistency, load_curve, load_metadata
from .svg import make_title, render_svg


def plot_regions(csv_paths: list[str], meta_path: str, out_path: str) -> None:
    """Render the frontier overlay; raises InputError on bad inputs."""
    if not csv_paths:
        raise InputError("at least one --csv input is required")
    if not out_path.endswith(".svg"):
        raise InputError(f"output must be an .svg path, got {out_path!r}")
    meta = load_metadata(meta_path)
    curves = [load_curve(p) for p in csv_paths]
    check_consistency(curves, meta)
    svg = render_svg(curves, make_title(meta))
    with open(out_path, "w", newline="") as fh:
        fh.write(svg)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="plot-regions", description=__doc__)
    ap.add_argument("--csv", action="append", default=[], help="region CSV (repeatable)")
    ap.add_argument("--meta", required=True, help="metadata.json of the run")
    ap.add_argument("--out", required=True, help="output SVG path")
    args = ap.parse_args(argv)
    try:
        plot_regions(args.csv, args.meta, args.out)
    except InputError as e:
        print(f"plot-regions: {e}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
