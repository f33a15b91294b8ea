import numpy as np
import pytest

from slotswap_plots.reader import MissingCellError, load_bundle


def test_levels_days_and_matrix_shape(tiny_bundle):
    bundle = load_bundle(tiny_bundle)
    assert bundle.exchange_levels == [1, 10]
    assert bundle.days == [1, 2, 3]
    matrix = bundle.day_matrix("mixed", 0.5, True, "mean_satisfaction")
    assert matrix.shape == (3, 2)
    # rows ordered by day, columns by exchange level
    assert matrix[0, 0] == pytest.approx(0.2 + 0.1 + 0.05 + 0.01)
    assert matrix[2, 1] == pytest.approx(0.2 + 0.3 + 0.05 + 0.10)


def test_missing_cell_names_coordinates(tiny_bundle):
    bundle = load_bundle(tiny_bundle)
    with pytest.raises(MissingCellError, match="exchanges=7"):
        bundle.cell_series("mixed", 7, 0.5, True, "mean_satisfaction")
    with pytest.raises(MissingCellError, match="learning=0.9"):
        bundle.cell_series("mixed", 1, 0.9, True, "mean_satisfaction")


def test_empty_strategy_fields_become_nan(tmp_path):
    from conftest import write_bundle

    bundle_dir = write_bundle(
        tmp_path / "b",
        ["selfish,1,0.000000,true,1,0.500000,,0.500000,0.000000,0.910000"],
        ["0,1,selfish,1,0.000000,true,0.500000,,0.500000,0,0.910000,0,0,0"],
    )
    bundle = load_bundle(bundle_dir)
    series = bundle.cell_series("selfish", 1, 0.0, True, "mean_sat_social")
    assert np.isnan(series).all()
    selfish = bundle.cell_series("selfish", 1, 0.0, True, "mean_sat_selfish")
    assert selfish[0] == 0.5


def test_run_series(tiny_bundle):
    bundle = load_bundle(tiny_bundle)
    sat = bundle.run_series("mixed", 10, 0.5, True, 1, "mean_satisfaction")
    assert len(sat) == 3
    with pytest.raises(MissingCellError, match="run=9"):
        bundle.run_series("mixed", 10, 0.5, True, 9, "mean_satisfaction")


def test_bundle_never_mutated(tiny_bundle):
    before = {
        name: (tiny_bundle / name).read_bytes()
        for name in ("summary.csv", "days.csv")
    }
    load_bundle(tiny_bundle)
    after = {
        name: (tiny_bundle / name).read_bytes()
        for name in ("summary.csv", "days.csv")
    }
    assert before == after
