"""Seedable simulator of a decentralized time-slot exchange between
households, with selfish/social strategies, an optional favour ledger,
payoff-biased imitation, and an experiment sweep harness."""

from .core import (
    AllocationState,
    FavourLedger,
    SimConfig,
    generate_preferences,
    initial_allocation,
    optimum_satisfaction,
    satisfaction,
)
from .engine import DayRecord, RunRecord, run_many, run_simulation
from .experiments import (
    CellKey,
    Scenario,
    SweepDataset,
    SweepGrid,
    compare_social_capital,
    run_sweep,
    satisfaction_difference,
)
from .learning import LearningEvent, learning_step
from .protocol import (
    AcceptDecision,
    AdvertBoard,
    Decision,
    ExchangeRequest,
    apply_exchange,
    build_board,
    decide,
    run_exchange_round,
    select_request,
)
from .stats import TestResult, mann_whitney_u

__version__ = "0.1.0"
