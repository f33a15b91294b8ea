"""Parameter sweeps, aggregation, and the social-capital comparison.

A sweep enumerates the cross product of exchange-round counts, learning
rates and ledger on/off for one scenario, simulating ``runs_per_cell``
independent runs per cell. Aggregation is an arithmetic mean across runs
per day and is invariant to run order. The with/without-ledger contrast
is tested per (exchanges, learning) cell on final-day per-run population
means: one observation per run, since agents within a run are not
independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable, Iterator

from .core import SimConfig
from .engine import RunRecord, run_many
from .stats import TestResult, mann_whitney_u

__all__ = [
    "Scenario",
    "SweepGrid",
    "CellKey",
    "CellResult",
    "SweepDataset",
    "DaySummary",
    "SocialCapitalTest",
    "DifferenceSeries",
    "cell_config",
    "run_sweep",
    "cell_day_summaries",
    "compare_social_capital",
    "satisfaction_difference",
]


class Scenario(str, Enum):
    MIXED = "mixed"
    PURE_SOCIAL = "social"
    PURE_SELFISH = "selfish"


_SOCIAL_FRACTION = {
    Scenario.MIXED: 0.5,
    Scenario.PURE_SOCIAL: 1.0,
    Scenario.PURE_SELFISH: 0.0,
}
_SCENARIO_CODE = {
    Scenario.PURE_SELFISH: 0,
    Scenario.PURE_SOCIAL: 1,
    Scenario.MIXED: 2,
}


@dataclass(frozen=True)
class CellKey:
    scenario: Scenario
    exchanges: int
    learning_rate: float
    social_capital: bool

    def stream_key(self) -> tuple[int, ...]:
        """Entropy words decorrelating this cell's runs from every other
        cell's, independent of grid enumeration order."""
        return (
            _SCENARIO_CODE[self.scenario],
            self.exchanges,
            round(self.learning_rate * 1_000_000),
            int(self.social_capital),
        )


@dataclass(frozen=True)
class SweepGrid:
    scenario: Scenario = Scenario.MIXED
    exchange_rounds: tuple[int, ...] = (1, 50, 100, 150, 200)
    learning_rates: tuple[float, ...] = (0.0, 0.5, 1.0)
    social_capital: tuple[bool, ...] = (True, False)
    runs_per_cell: int = 50

    def __post_init__(self) -> None:
        for name in ("exchange_rounds", "learning_rates", "social_capital"):
            if not getattr(self, name):
                raise ValueError(f"{name}: must be non-empty")
        if self.runs_per_cell < 1:
            raise ValueError("runs_per_cell: must be >= 1")

    def cells(self) -> Iterator[CellKey]:
        for sc in self.social_capital:
            for exchanges in self.exchange_rounds:
                for rate in self.learning_rates:
                    yield CellKey(self.scenario, exchanges, rate, sc)


def cell_config(base: SimConfig, key: CellKey, runs: int) -> SimConfig:
    return replace(
        base,
        exchange_rounds=key.exchanges,
        learning_rate=key.learning_rate,
        social_capital_enabled=key.social_capital,
        initial_social_fraction=_SOCIAL_FRACTION[key.scenario],
        runs=runs,
    )


@dataclass
class CellResult:
    key: CellKey
    config: SimConfig
    runs: list[RunRecord]

    def final_samples(self) -> list[float]:
        """One observation per run: the final day's population mean."""
        return [run.final_day().mean_satisfaction for run in self.runs]


@dataclass
class SweepDataset:
    base: SimConfig
    grid: SweepGrid
    cells: dict[CellKey, CellResult] = field(default_factory=dict)

    def get(
        self, exchanges: int, learning_rate: float, social_capital: bool
    ) -> CellResult | None:
        key = CellKey(self.grid.scenario, exchanges, learning_rate, social_capital)
        return self.cells.get(key)


def run_sweep(
    grid: SweepGrid,
    base: SimConfig,
    n_jobs: int | None = None,
    progress: Callable[[str], None] | None = None,
    collect_events: bool = False,
) -> SweepDataset:
    """Simulate every cell of the grid; deterministic for a fixed base seed."""
    dataset = SweepDataset(base=base, grid=grid)
    for key in grid.cells():
        cfg = cell_config(base, key, grid.runs_per_cell)
        if progress is not None:
            progress(
                f"cell exchanges={key.exchanges} learning={key.learning_rate:g} "
                f"social_capital={'on' if key.social_capital else 'off'}"
            )
        runs = run_many(
            cfg, stream_key=key.stream_key(), n_jobs=n_jobs, collect_events=collect_events
        )
        dataset.cells[key] = CellResult(key=key, config=cfg, runs=runs)
    return dataset


@dataclass(frozen=True)
class DaySummary:
    day: int
    mean_satisfaction: float
    mean_sat_social: float | None
    mean_sat_selfish: float | None
    social_proportion: float
    optimum: float


def cell_day_summaries(result: CellResult) -> list[DaySummary]:
    """Per-day arithmetic means across the cell's runs.

    Strategy means average over the runs where the strategy exists that
    day; a strategy extinct in every run yields None, never zero.
    """
    runs = result.runs
    num_days = len(runs[0].day_records)
    population = result.config.population_size
    out = []
    for d in range(num_days):
        records = [run.day_records[d] for run in runs]
        social_vals = [r.mean_sat_social for r in records if r.mean_sat_social is not None]
        selfish_vals = [
            r.mean_sat_selfish for r in records if r.mean_sat_selfish is not None
        ]
        out.append(
            DaySummary(
                day=records[0].day,
                mean_satisfaction=_mean([r.mean_satisfaction for r in records]),
                mean_sat_social=_mean(social_vals) if social_vals else None,
                mean_sat_selfish=_mean(selfish_vals) if selfish_vals else None,
                social_proportion=_mean(
                    [r.social_count / population for r in records]
                ),
                optimum=_mean([r.optimum for r in records]),
            )
        )
    return out


def _mean(values: list[float]) -> float:
    return sum(values) / len(values)


@dataclass(frozen=True)
class SocialCapitalTest:
    exchanges: int
    learning_rate: float
    result: TestResult | None  # None when either arm is missing


def compare_social_capital(dataset: SweepDataset) -> list[SocialCapitalTest]:
    """Final-day ledger-on vs ledger-off contrast per grid cell.

    Sample A is the ledger-enabled arm. Cells lacking a counterpart are
    reported as absent rather than inferred.
    """
    rows = []
    for exchanges in dataset.grid.exchange_rounds:
        for rate in dataset.grid.learning_rates:
            with_sc = dataset.get(exchanges, rate, True)
            without_sc = dataset.get(exchanges, rate, False)
            if with_sc is None or without_sc is None:
                rows.append(SocialCapitalTest(exchanges, rate, None))
                continue
            result = mann_whitney_u(
                with_sc.final_samples(), without_sc.final_samples()
            )
            rows.append(SocialCapitalTest(exchanges, rate, result))
    return rows


@dataclass(frozen=True)
class DifferenceSeries:
    exchanges: int
    learning_rate: float
    per_day: list[float] | None  # ledger-on minus ledger-off, by day


def satisfaction_difference(dataset: SweepDataset) -> list[DifferenceSeries]:
    """Signed per-day population-mean gap between the two ledger arms."""
    rows = []
    for exchanges in dataset.grid.exchange_rounds:
        for rate in dataset.grid.learning_rates:
            with_sc = dataset.get(exchanges, rate, True)
            without_sc = dataset.get(exchanges, rate, False)
            if with_sc is None or without_sc is None:
                rows.append(DifferenceSeries(exchanges, rate, None))
                continue
            on = cell_day_summaries(with_sc)
            off = cell_day_summaries(without_sc)
            rows.append(
                DifferenceSeries(
                    exchanges,
                    rate,
                    [x.mean_satisfaction - y.mean_satisfaction for x, y in zip(on, off)],
                )
            )
    return rows
