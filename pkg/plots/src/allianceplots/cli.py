"""Command-line entry: plots --in DIR --kind K --out FILE.

Exit codes: 0 success, 2 usage or input-schema errors, 1 runtime errors.
"""

from __future__ import annotations

import argparse
import sys

from .csvdata import SchemaError
from .render import KINDS, PlotJob, render


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="plots",
        description="Render static figures from alliancesim output files.")
    parser.add_argument("--in", dest="in_dir", required=True,
                        help="simulation output directory")
    parser.add_argument("--kind", required=True, choices=KINDS,
                        help="figure kind")
    parser.add_argument("--out", required=True, help="output image path "
                        "(.png, .svg or .pdf)")
    parser.add_argument("--threshold", type=float, default=None,
                        help="threshold line level (default: analysis.json "
                             "value, else 3.0)")
    parser.add_argument("--no-fit", action="store_true",
                        help="skip the fitted-slope overlay on degree plots")
    parser.add_argument("--linear", action="store_true",
                        help="linear axes on degree plots")
    parser.add_argument("--dpi", type=int, default=150)
    parser.add_argument("--layout-seed", type=int, default=42,
                        help="network layout seed")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    job = PlotJob(in_dir=args.in_dir, kind=args.kind, out_path=args.out,
                  threshold=args.threshold, log_axes=not args.linear,
                  fit_overlay=not args.no_fit, dpi=args.dpi,
                  layout_seed=args.layout_seed)
    try:
        info = render(job)
    except (SchemaError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    detail = f" ({info.note})" if info.note else ""
    if info.overlay_slope is not None:
        detail += f" [fit slope {info.overlay_slope:.3f}]"
    print(f"rendered {info.kind} -> {info.path}{detail}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
