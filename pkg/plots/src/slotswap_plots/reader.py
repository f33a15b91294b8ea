"""CSV bundle access.

Reads the simulator's ``summary.csv`` and ``days.csv`` into day-by-cell
matrices keyed on (scenario, exchanges, learning rate, ledger arm). The
renderer never mutates the bundle.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

__all__ = ["Bundle", "MissingCellError", "load_bundle"]


class MissingCellError(Exception):
    """A requested (exchanges, learning) cell is absent from the bundle."""

    def __init__(self, exchanges, learning, extra=""):
        self.exchanges = exchanges
        self.learning = learning
        detail = f" ({extra})" if extra else ""
        super().__init__(
            f"bundle has no cell for exchanges={exchanges}, learning={learning}{detail}"
        )


def _parse_optional(text: str) -> float:
    return float(text) if text else np.nan


@dataclass
class Bundle:
    """Parsed bundle: per-cell day series plus per-run day rows."""

    path: Path
    exchange_levels: list[int]
    learning_rates: list[float]
    days: list[int]
    summary: dict  # (scenario, exchanges, learning, sc) -> {column: np.ndarray}
    runs: dict  # (scenario, exchanges, learning, sc, run) -> {column: np.ndarray}

    def cell_series(self, scenario, exchanges, learning, social_capital, column):
        key = (scenario, exchanges, round(learning, 9), bool(social_capital))
        if key not in self.summary:
            raise MissingCellError(exchanges, learning, f"scenario={scenario}")
        return self.summary[key][column]

    def day_matrix(self, scenario, learning, social_capital, column):
        """days x exchange-levels matrix of a summary column."""
        columns = [
            self.cell_series(scenario, exchanges, learning, social_capital, column)
            for exchanges in self.exchange_levels
        ]
        return np.column_stack(columns)

    def run_series(self, scenario, exchanges, learning, social_capital, run, column):
        key = (scenario, exchanges, round(learning, 9), bool(social_capital), run)
        if key not in self.runs:
            raise MissingCellError(exchanges, learning, f"run={run}")
        return self.runs[key][column]


def load_bundle(path: str | Path) -> Bundle:
    path = Path(path)
    summary_rows = _read_rows(path / "summary.csv")
    day_rows = _read_rows(path / "days.csv")

    summary: dict = {}
    for row in summary_rows:
        key = (
            row["scenario"],
            int(row["exchanges"]),
            round(float(row["learning"]), 9),
            row["social_capital"] == "true",
        )
        summary.setdefault(key, []).append(row)

    runs: dict = {}
    for row in day_rows:
        key = (
            row["scenario"],
            int(row["exchanges"]),
            round(float(row["learning"]), 9),
            row["social_capital"] == "true",
            int(row["run"]),
        )
        runs.setdefault(key, []).append(row)

    exchange_levels = sorted({key[1] for key in summary})
    learning_rates = sorted({key[2] for key in summary})
    days = sorted({int(r["day"]) for rows in summary.values() for r in rows})

    return Bundle(
        path=path,
        exchange_levels=exchange_levels,
        learning_rates=learning_rates,
        days=days,
        summary={k: _columnise(rows) for k, rows in summary.items()},
        runs={k: _columnise(rows) for k, rows in runs.items()},
    )


def _read_rows(path: Path) -> list[dict]:
    if not path.exists():
        raise FileNotFoundError(f"bundle file missing: {path}")
    with open(path, newline="", encoding="utf-8") as handle:
        return list(csv.DictReader(handle))


_FLOAT_COLUMNS = {
    "mean_satisfaction",
    "mean_sat_social",
    "mean_sat_selfish",
    "social_proportion",
    "optimum",
}


def _columnise(rows: list[dict]) -> dict:
    rows = sorted(rows, key=lambda r: int(r["day"]))
    out = {"day": np.array([int(r["day"]) for r in rows])}
    for column in rows[0]:
        if column in _FLOAT_COLUMNS:
            out[column] = np.array([_parse_optional(r[column]) for r in rows])
        elif column == "social_count":
            out[column] = np.array([int(r[column]) for r in rows])
    return out
