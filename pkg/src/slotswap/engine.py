"""Day and run orchestration.

Each day draws fresh preferences and a fresh random allocation, runs the
configured number of exchange rounds, measures day-end satisfaction, and
applies the imitation step. Only strategies and favour ledgers persist
across days. Runs are bit-reproducible: every random draw comes from two
streams derived from one seed sequence keyed by the master seed and run
index -- a numpy Generator consumed by preference sampling, allocation
dealing and the exchange rounds, and a scalar stream consumed by
allocation repair and learning -- in a fixed order.

Rounds execute on the compiled kernel twin by default; runs that collect
per-event records use the pure-Python reference instead. Both consume
identical draws and produce identical trajectories. A day whose exchange
dynamics have frozen (no acceptable swap exists for any requester,
advert and offer) skips its remaining rounds; skipped rounds could only
have produced rejected requests, which no recorded metric observes.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

from . import _kernel
from .core import (
    FavourLedger,
    SimConfig,
    initial_allocation,
    optimum_from_demand,
    preference_masks,
    sample_preference_indices,
)
from .learning import learning_step
from .protocol import DayState, exchange_possible, run_exchange_round

__all__ = [
    "DayRecord",
    "RunRecord",
    "run_day",
    "run_simulation",
    "run_many",
    "initial_strategies",
]


@dataclass(frozen=True)
class DayRecord:
    """Per-day aggregates; strategy means are None when extinct."""

    day: int
    mean_satisfaction: float
    mean_sat_social: float | None
    mean_sat_selfish: float | None
    social_count: int
    selfish_count: int
    optimum: float
    exchanges_accepted: int
    favours_recorded: int
    favours_repaid: int


@dataclass
class RunRecord:
    run_index: int
    seed: int
    config: SimConfig
    day_records: list[DayRecord] = field(default_factory=list)
    ledger_outstanding_total: int = 0
    events: list | None = None  # populated only when collection is requested

    def final_day(self) -> DayRecord:
        return self.day_records[-1]


def _rng_pair(
    cfg: SimConfig, run_index: int, stream_key: tuple[int, ...] = ()
) -> tuple[np.random.Generator, random.Random]:
    root = np.random.SeedSequence((cfg.seed_u64, *stream_key, run_index))
    np_seq, py_seq = root.spawn(2)
    np_rng = np.random.default_rng(np_seq)
    draw = random.Random(
        int.from_bytes(py_seq.generate_state(4, np.uint32).tobytes(), "little")
    )
    return np_rng, draw


def initial_strategies(cfg: SimConfig, np_rng: np.random.Generator) -> list[bool]:
    """Assign exactly floor(fraction * N) social agents, chosen uniformly."""
    n = cfg.population_size
    n_social = int(cfg.initial_social_fraction * n)
    strategies = [False] * n
    for agent in np_rng.permutation(n)[:n_social].tolist():
        strategies[agent] = True
    return strategies


def _sample_day(cfg: SimConfig, np_rng, draw):
    """Fresh preferences, allocation and the profile's optimum."""
    idx = sample_preference_indices(np_rng, cfg)
    prefs_mask = preference_masks(idx)
    alloc = initial_allocation(np_rng, draw, cfg)
    demand = np.bincount(idx.reshape(-1), minlength=cfg.slots_per_day)
    return prefs_mask, alloc, optimum_from_demand(demand, cfg)


def _finish_day(
    strategies: list[bool],
    sats: list[float],
    optimum: float,
    accepted: int,
    recorded: int,
    repaid: int,
    cfg: SimConfig,
    draw: random.Random,
    day_no: int,
    events: list | None,
) -> DayRecord:
    """Build the day's record, then apply the imitation step.

    The record reflects the strategies agents played during the day; the
    imitation step shapes the next day's counts.
    """
    social_sum = selfish_sum = 0.0
    social_n = selfish_n = 0
    for agent, sat in enumerate(sats):
        if strategies[agent]:
            social_sum += sat
            social_n += 1
        else:
            selfish_sum += sat
            selfish_n += 1
    record = DayRecord(
        day=day_no,
        mean_satisfaction=(social_sum + selfish_sum) / cfg.population_size,
        mean_sat_social=social_sum / social_n if social_n else None,
        mean_sat_selfish=selfish_sum / selfish_n if selfish_n else None,
        social_count=social_n,
        selfish_count=selfish_n,
        optimum=optimum,
        exchanges_accepted=accepted,
        favours_recorded=recorded,
        favours_repaid=repaid,
    )
    for event in learning_step(strategies, sats, cfg.learning_rate, draw):
        if events is not None:
            events.append(
                {
                    "kind": "learning",
                    "day": day_no,
                    "learner": event.learner,
                    "observed": event.observed,
                    "learner_sat": event.learner_sat,
                    "observed_sat": event.observed_sat,
                    "copied": event.copied,
                }
            )
    return record


def run_day(
    strategies: list[bool],
    ledgers: list[FavourLedger],
    cfg: SimConfig,
    np_rng: np.random.Generator,
    draw: random.Random,
    day_no: int,
    events: list | None = None,
) -> DayRecord:
    """Simulate one day in place (reference path)."""
    prefs_mask, alloc, optimum = _sample_day(cfg, np_rng, draw)
    day = DayState.create(alloc, prefs_mask, cfg.slots_per_agent)
    if events is not None:
        events.append(
            {
                "kind": "day_start",
                "day": day_no,
                "holdings": list(alloc.holdings_mask),
                "prefs": list(prefs_mask),
                "strategies": [int(s) for s in strategies],
            }
        )

    accepted = recorded = repaid = 0
    zero_streak = 0
    next_check = 1
    for round_no in range(cfg.exchange_rounds):
        stats = run_exchange_round(
            day,
            strategies,
            ledgers,
            cfg.social_capital_enabled,
            np_rng,
            events,
            day_no,
            round_no,
        )
        accepted += stats.accepted
        recorded += stats.favours_recorded
        repaid += stats.favours_repaid
        # keep the early-stop schedule in lockstep with the kernel twin
        if stats.accepted:
            zero_streak = 0
            next_check = 1
            continue
        zero_streak += 1
        if zero_streak >= next_check and round_no + 2 < cfg.exchange_rounds:
            if not exchange_possible(
                day, strategies, ledgers, cfg.social_capital_enabled
            ):
                if events is not None:
                    events.append(
                        {"kind": "absorbed", "day": day_no, "round": round_no}
                    )
                break
            zero_streak = 0
            next_check *= 2

    return _finish_day(
        strategies,
        day.satisfactions(),
        optimum,
        accepted,
        recorded,
        repaid,
        cfg,
        draw,
        day_no,
        events,
    )


def _run_day_fast(
    strategies: list[bool],
    owed: np.ndarray,
    cfg: SimConfig,
    np_rng: np.random.Generator,
    draw: random.Random,
    day_no: int,
) -> DayRecord:
    """Kernel-twin equivalent of run_day."""
    prefs_mask, alloc, optimum = _sample_day(cfg, np_rng, draw)
    hold_arr = np.array(alloc.holdings_mask, dtype=np.int64)
    prefs_arr = np.array(prefs_mask, dtype=np.int64)
    sat_arr = np.array(
        [(h & p).bit_count() for h, p in zip(alloc.holdings_mask, prefs_mask)],
        dtype=np.int64,
    )
    strat_arr = np.array(strategies, dtype=np.uint8)
    accepted, recorded, repaid = _kernel.day_exchanges(
        np_rng,
        hold_arr,
        prefs_arr,
        sat_arr,
        strat_arr,
        owed,
        cfg.slots_per_agent,
        cfg.social_capital_enabled,
        cfg.exchange_rounds,
        cfg.slots_per_day,
        cfg.slot_capacity,
    )
    k = cfg.slots_per_agent
    sats = [c / k for c in sat_arr.tolist()]
    return _finish_day(
        strategies, sats, optimum, accepted, recorded, repaid, cfg, draw, day_no, None
    )


def run_simulation(
    cfg: SimConfig,
    run_index: int = 0,
    stream_key: tuple[int, ...] = (),
    collect_events: bool = False,
    accelerated: bool | None = None,
) -> RunRecord:
    """One independent run of ``cfg.num_days`` sequential days.

    ``accelerated=None`` picks the kernel when available; event
    collection always uses the reference path. Both paths yield
    identical records for the same configuration and seed.
    """
    events: list | None = [] if collect_events else None
    if accelerated is None:
        accelerated = _kernel.KERNEL_AVAILABLE and not collect_events
    if accelerated and collect_events:
        raise ValueError("event collection requires the reference path")
    np_rng, draw = _rng_pair(cfg, run_index, stream_key)
    strategies = initial_strategies(cfg, np_rng)
    record = RunRecord(run_index=run_index, seed=cfg.seed, config=cfg, events=events)
    if accelerated:
        owed = np.zeros((cfg.population_size, cfg.population_size), dtype=np.int64)
        for day_no in range(1, cfg.num_days + 1):
            record.day_records.append(
                _run_day_fast(strategies, owed, cfg, np_rng, draw, day_no)
            )
        record.ledger_outstanding_total = int(owed.sum())
    else:
        ledgers = [FavourLedger(agent) for agent in range(cfg.population_size)]
        for day_no in range(1, cfg.num_days + 1):
            record.day_records.append(
                run_day(strategies, ledgers, cfg, np_rng, draw, day_no, events)
            )
        record.ledger_outstanding_total = sum(
            ledger.outstanding_total() for ledger in ledgers
        )
    return record


def run_many(
    cfg: SimConfig,
    stream_key: tuple[int, ...] = (),
    n_jobs: int | None = None,
    collect_events: bool = False,
) -> list[RunRecord]:
    """All ``cfg.runs`` independent runs, ordered by run index.

    Runs share no state, so they may execute in parallel; results are
    assembled by run index and identical regardless of scheduling.
    """
    if n_jobs is None or n_jobs == 1 or cfg.runs == 1:
        return [
            run_simulation(cfg, i, stream_key, collect_events)
            for i in range(cfg.runs)
        ]
    from joblib import Parallel, delayed

    return Parallel(n_jobs=n_jobs)(
        delayed(run_simulation)(cfg, i, stream_key, collect_events)
        for i in range(cfg.runs)
    )
