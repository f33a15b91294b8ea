"""Renders the full panel set from real simulator bundles.

Bundles are produced by invoking the simulator CLI, the only interface
this package consumes. Grid coordinates match the simulator's defaults;
runs and days are scaled down to keep the fixture quick.
"""

import subprocess
import sys

import numpy as np
import pytest

from slotswap_plots.figures import FigureSpec, render
from slotswap_plots.reader import load_bundle

LEARNING_RATES = (0.0, 0.5, 1.0)


def simulate(out_dir, *extra):
    command = [
        sys.executable, "-m", "slotswap.cli",
        "--runs", "2", "--days", "20", "--seed", "11",
        "--out-dir", str(out_dir), *extra,
    ]
    completed = subprocess.run(command, capture_output=True, text=True)
    if completed.returncode != 0:
        pytest.skip(f"simulator CLI unavailable: {completed.stderr.strip()}")
    return out_dir


@pytest.fixture(scope="session")
def mixed_bundle(tmp_path_factory):
    return simulate(tmp_path_factory.mktemp("bundles") / "mixed")


@pytest.fixture(scope="session")
def pure_bundles(tmp_path_factory):
    root = tmp_path_factory.mktemp("pure")
    return {
        "selfish": simulate(
            root / "selfish", "--scenario", "selfish",
            "--social-capital", "on", "--learning-rates", "0",
        ),
        "social-no-ledger": simulate(
            root / "social_off", "--scenario", "social",
            "--social-capital", "off", "--learning-rates", "0",
        ),
        "social-ledger": simulate(
            root / "social_on", "--scenario", "social",
            "--social-capital", "on", "--learning-rates", "0",
        ),
    }


def test_single_strategy_panels(pure_bundles, tmp_path):
    # one satisfaction heatmap per pure population
    for name, bundle in pure_bundles.items():
        scenario = "selfish" if name == "selfish" else "social"
        ledger_on = name != "social-no-ledger"
        out = render(
            bundle,
            FigureSpec(
                "satisfaction-heatmap",
                scenario=scenario,
                learning=0.0,
                social_capital=ledger_on,
            ),
            tmp_path / f"single-{name}.png",
        )
        assert out.stat().st_size > 0


@pytest.mark.parametrize("ledger_on", [False, True])
def test_mixed_population_panels(mixed_bundle, tmp_path, ledger_on):
    # three rows (selfish sat, social sat, strategy share) x learning rates
    arm = "on" if ledger_on else "off"
    for learning in LEARNING_RATES:
        for strategy in ("selfish", "social"):
            out = render(
                mixed_bundle,
                FigureSpec(
                    "satisfaction-heatmap",
                    learning=learning,
                    social_capital=ledger_on,
                    strategy=strategy,
                ),
                tmp_path / f"mixed-{arm}-{strategy}-{learning}.png",
            )
            assert out.stat().st_size > 0
        out = render(
            mixed_bundle,
            FigureSpec(
                "proportion-heatmap", learning=learning, social_capital=ledger_on
            ),
            tmp_path / f"mixed-{arm}-share-{learning}.png",
        )
        assert out.stat().st_size > 0


def test_ledger_contrast_panels(mixed_bundle, tmp_path):
    for learning in LEARNING_RATES:
        out = render(
            mixed_bundle,
            FigureSpec("difference-heatmap", learning=learning),
            tmp_path / f"contrast-{learning}.png",
        )
        assert out.stat().st_size > 0


def test_run_curve_with_ceiling(mixed_bundle, tmp_path):
    out = render(
        mixed_bundle,
        FigureSpec("run-curve", learning=0.5, social_capital=True, exchanges=100),
        tmp_path / "curve.png",
    )
    assert out.stat().st_size > 0


def test_learning_zero_share_field_is_uniform_half(mixed_bundle):
    # a frozen 48:48 split keeps the share at exactly one half everywhere
    bundle = load_bundle(mixed_bundle)
    for ledger_on in (True, False):
        matrix = bundle.day_matrix("mixed", 0.0, ledger_on, "social_proportion")
        assert np.array_equal(matrix, np.full_like(matrix, 0.5))
