"""Command-line front end: pick a bundle, a figure kind and a cell."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .figures import FIGURE_KINDS, FigureSpec, render
from .reader import MissingCellError

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="slotswap-plot",
        description="Render a figure from a simulator CSV bundle.",
    )
    parser.add_argument("--bundle", type=Path, required=True, help="bundle directory")
    parser.add_argument("--figure", choices=FIGURE_KINDS, required=True)
    parser.add_argument("--out", type=Path, required=True, help="image file to write")
    parser.add_argument("--scenario", default="mixed",
                        choices=["mixed", "social", "selfish"])
    parser.add_argument("--learning", type=float, default=0.5)
    parser.add_argument("--social-capital", choices=["on", "off"], default="on",
                        dest="social_capital")
    parser.add_argument("--strategy", choices=["all", "social", "selfish"],
                        default="all", help="satisfaction heatmaps only")
    parser.add_argument("--run", type=int, default=0, help="run curves only")
    parser.add_argument("--exchanges", type=int, default=None, help="run curves only")
    parser.add_argument("--dpi", type=int, default=120)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(sys.argv[1:] if argv is None else argv)
    spec = FigureSpec(
        kind=args.figure,
        scenario=args.scenario,
        learning=args.learning,
        social_capital=args.social_capital == "on",
        strategy=args.strategy,
        run=args.run,
        exchanges=args.exchanges,
        dpi=args.dpi,
    )
    try:
        render(args.bundle, spec, args.out)
    except (MissingCellError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
