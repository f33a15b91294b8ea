"""Figure rendering for simulator bundles.

Four figure kinds: per-strategy satisfaction heatmaps and social-share
heatmaps over (day x exchange-level) grids, the ledger-on minus
ledger-off satisfaction contrast, and a single run's daily satisfaction
curve with its allocation ceiling.

Colour conventions: the strategy-share map diverges purple (selfish
majority) to green (social majority) around exactly 0.5; the contrast
map diverges purple (ledger-off ahead) to orange (ledger-on ahead)
around exactly 0. Rendering is deterministic for a fixed bundle.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import TwoSlopeNorm

from .reader import Bundle, MissingCellError, load_bundle

__all__ = ["FigureSpec", "render", "FIGURE_KINDS"]

FIGURE_KINDS = (
    "satisfaction-heatmap",
    "proportion-heatmap",
    "difference-heatmap",
    "run-curve",
)

_STRATEGY_COLUMN = {
    "all": "mean_satisfaction",
    "social": "mean_sat_social",
    "selfish": "mean_sat_selfish",
}


@dataclass(frozen=True)
class FigureSpec:
    kind: str
    scenario: str = "mixed"
    learning: float = 0.5
    social_capital: bool = True
    strategy: str = "all"  # satisfaction heatmaps only
    run: int = 0  # run curves only
    exchanges: int | None = None  # run curves only; default: first level
    dpi: int = 120

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}")
        if self.strategy not in _STRATEGY_COLUMN:
            raise ValueError(f"unknown strategy filter {self.strategy!r}")


def render(bundle_path: str | Path, spec: FigureSpec, out_path: str | Path) -> Path:
    """Render one figure to ``out_path``; returns the written path."""
    bundle = load_bundle(bundle_path)
    out_path = Path(out_path)
    fig, ax = plt.subplots(figsize=(6.0, 4.5))
    try:
        if spec.kind == "satisfaction-heatmap":
            _heatmap(
                ax,
                bundle,
                bundle.day_matrix(
                    spec.scenario, spec.learning, spec.social_capital,
                    _STRATEGY_COLUMN[spec.strategy],
                ),
                cmap="viridis",
                norm=None,
                vmin=0.0,
                vmax=1.0,
                label=f"mean satisfaction ({spec.strategy})",
            )
            arm = "with ledger" if spec.social_capital else "no ledger"
            ax.set_title(
                f"{spec.scenario}, learning {spec.learning:g}, {arm}"
            )
        elif spec.kind == "proportion-heatmap":
            matrix = bundle.day_matrix(
                spec.scenario, spec.learning, spec.social_capital, "social_proportion"
            )
            _heatmap(
                ax,
                bundle,
                matrix,
                cmap="PRGn",  # purple = selfish majority, green = social
                norm=TwoSlopeNorm(vcenter=0.5, vmin=0.0, vmax=1.0),
                vmin=None,
                vmax=None,
                label="share using the flexible strategy",
            )
            arm = "with ledger" if spec.social_capital else "no ledger"
            ax.set_title(f"{spec.scenario}, learning {spec.learning:g}, {arm}")
        elif spec.kind == "difference-heatmap":
            on = bundle.day_matrix(spec.scenario, spec.learning, True, "mean_satisfaction")
            off = bundle.day_matrix(spec.scenario, spec.learning, False, "mean_satisfaction")
            diff = on - off
            span = max(float(np.nanmax(np.abs(diff))), 1e-9)
            _heatmap(
                ax,
                bundle,
                diff,
                cmap="PuOr_r",  # purple = ledger-off ahead, orange = ledger-on ahead
                norm=TwoSlopeNorm(vcenter=0.0, vmin=-span, vmax=span),
                vmin=None,
                vmax=None,
                label="satisfaction gap (ledger on - off)",
            )
            ax.set_title(f"{spec.scenario}, learning {spec.learning:g}")
        else:
            _run_curve(ax, bundle, spec)
        fig.tight_layout()
        fig.savefig(out_path, dpi=spec.dpi)
    finally:
        plt.close(fig)
    return out_path


def _heatmap(ax, bundle: Bundle, matrix, cmap, norm, vmin, vmax, label):
    image = ax.imshow(
        matrix,
        aspect="auto",
        origin="lower",
        interpolation="nearest",
        cmap=cmap,
        norm=norm,
        vmin=vmin,
        vmax=vmax,
        extent=(-0.5, matrix.shape[1] - 0.5, min(bundle.days), max(bundle.days)),
    )
    ax.set_xticks(range(len(bundle.exchange_levels)))
    ax.set_xticklabels([str(x) for x in bundle.exchange_levels])
    ax.set_xlabel("exchange rounds per day")
    ax.set_ylabel("day")
    ax.figure.colorbar(image, ax=ax, label=label)


def _run_curve(ax, bundle: Bundle, spec: FigureSpec):
    exchanges = spec.exchanges if spec.exchanges is not None else bundle.exchange_levels[0]
    days = bundle.run_series(
        spec.scenario, exchanges, spec.learning, spec.social_capital, spec.run, "day"
    )
    sat = bundle.run_series(
        spec.scenario, exchanges, spec.learning, spec.social_capital, spec.run,
        "mean_satisfaction",
    )
    optimum = bundle.run_series(
        spec.scenario, exchanges, spec.learning, spec.social_capital, spec.run, "optimum"
    )
    ax.plot(days, sat, lw=1.0, label="mean satisfaction")
    ax.axhline(float(np.nanmean(optimum)), color="tab:red", ls="--", lw=1.0,
               label="allocation ceiling")
    ax.set_xlabel("day")
    ax.set_ylabel("mean satisfaction")
    ax.set_ylim(0.0, 1.0)
    arm = "ledger on" if spec.social_capital else "ledger off"
    ax.set_title(
        f"run {spec.run}: {spec.scenario}, {exchanges} exchanges, "
        f"learning {spec.learning:g}, {arm}"
    )
    ax.legend(loc="lower right")
