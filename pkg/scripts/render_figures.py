#!/usr/bin/env python3
"""Render the standard panel set from previously written bundles.

Expects the directory layout produced by run_full_grid.py and
run_single_strategy.py; requires the slotswap-plots package.

Usage: python scripts/render_figures.py [bundle_root] [figures_dir]
"""

import sys
from pathlib import Path

from slotswap_plots.figures import FigureSpec, render

LEARNING_RATES = (0.0, 0.5, 1.0)


def panel_set(mixed: Path, singles: Path, out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, scenario, ledger_on in (
        ("selfish", "selfish", True),
        ("social-no-ledger", "social", False),
        ("social-ledger", "social", True),
    ):
        render(
            singles / name,
            FigureSpec("satisfaction-heatmap", scenario=scenario,
                       learning=0.0, social_capital=ledger_on),
            out / f"single-{name}.png",
        )
    for ledger_on, arm in ((False, "no-ledger"), (True, "ledger")):
        for rate in LEARNING_RATES:
            for strategy in ("selfish", "social"):
                render(
                    mixed,
                    FigureSpec("satisfaction-heatmap", learning=rate,
                               social_capital=ledger_on, strategy=strategy),
                    out / f"mixed-{arm}-{strategy}-lr{rate:g}.png",
                )
            render(
                mixed,
                FigureSpec("proportion-heatmap", learning=rate,
                           social_capital=ledger_on),
                out / f"mixed-{arm}-share-lr{rate:g}.png",
            )
    for rate in LEARNING_RATES:
        render(
            mixed,
            FigureSpec("difference-heatmap", learning=rate),
            out / f"ledger-contrast-lr{rate:g}.png",
        )
    render(
        mixed,
        FigureSpec("run-curve", learning=0.5, social_capital=True, exchanges=100),
        out / "typical-run.png",
    )


if __name__ == "__main__":
    root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("output")
    figures = Path(sys.argv[2]) if len(sys.argv) > 2 else Path("output/figures")
    panel_set(root / "full-grid", root / "single-strategy", figures)
    print(f"figures written to {figures}")
