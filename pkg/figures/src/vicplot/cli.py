"""Command line front end: render a preset figure from a trace CSV."""

import argparse
import sys

from .panels import FORMATS, render_panels, save_figure
from .presets import PRESETS, preset_panels
from .trace import MissingColumnError, read_columns


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vicplot",
        description="Render multi-panel figures from simulation trace CSVs")
    parser.add_argument("--trace", required=True, help="trace CSV path")
    parser.add_argument("--preset", required=True, choices=sorted(PRESETS),
                        help="panel layout to render")
    parser.add_argument("--out", required=True, help="output image path")
    parser.add_argument("--format", choices=FORMATS, default=None,
                        help="image format (default: from the --out suffix)")
    parser.add_argument("--no-shade", action="store_true",
                        help="do not shade violation steps")
    parser.add_argument("--title", default="", help="figure title")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    trace = read_columns(args.trace)
    try:
        fig = render_panels(trace, preset_panels(args.preset),
                            shade_violations=not args.no_shade,
                            title=args.title)
    except MissingColumnError as err:
        raise SystemExit(f"preset {args.preset!r}: {err}") from None
    fmt = save_figure(fig, args.out, fmt=args.format)
    print(f"{args.out}: {len(preset_panels(args.preset))} panels ({fmt})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
