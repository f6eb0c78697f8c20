"""plotkit command line: render figures from experiment CSVs."""

import argparse
import sys

from .figspec import TEMPLATE, FigureSpecError, load_figure_spec
from .render import render


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="plotkit", description="figures from experiment CSVs")
    sub = parser.add_subparsers(dest="command", required=True)

    p_plot = sub.add_parser("plot", help="render a figure")
    p_plot.add_argument("--spec", required=True, help="TOML figure specification")

    p_gen = sub.add_parser("gen-spec", help="write a template figure spec")
    p_gen.add_argument("path")

    args = parser.parse_args(argv)
    try:
        if args.command == "plot":
            spec = load_figure_spec(args.spec)
            render(spec)
            print(f"wrote {spec.output}")
        elif args.command == "gen-spec":
            with open(args.path, "w") as f:
                f.write(TEMPLATE)
            print(f"wrote {args.path}")
    except (FigureSpecError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
