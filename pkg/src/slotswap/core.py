"""Domain model for the time-slot exchange simulator.

Agents demand a fixed number of daily time-slots, receive a random
capacity-constrained allocation, and may later trade slots pairwise.
This module holds the configuration, preference/allocation sampling,
satisfaction measures, the per-agent favour ledger, and the analytic
ceiling on mean satisfaction for a given preference profile.

Slot sets are stored as integer bitmasks (slot ``i`` equals bit ``i``),
which keeps membership tests and swaps O(1) in the simulation loop.
Helpers convert between masks and ordinary sets at the API boundary.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SimConfig",
    "AllocationState",
    "FavourLedger",
    "mask_from_slots",
    "slots_from_mask",
    "generate_preferences",
    "sample_preference_indices",
    "preference_masks",
    "initial_allocation",
    "satisfaction",
    "optimum_satisfaction",
    "optimum_from_demand",
]

_U64 = (1 << 64) - 1

# Bitmask helpers -----------------------------------------------------------


def mask_from_slots(slots) -> int:
    """Pack an iterable of slot indices into a bitmask."""
    mask = 0
    for s in slots:
        mask |= 1 << s
    return mask


def slots_from_mask(mask: int) -> tuple[int, ...]:
    """Unpack a bitmask into an ascending tuple of slot indices."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


# Configuration -------------------------------------------------------------


@dataclass(frozen=True)
class SimConfig:
    """Immutable simulation parameters.

    Defaults describe a 96-household day split into 24 hourly slots, each
    agent demanding 4 slots and no slot serving more than 16 agents.
    ``exchange_rounds`` and ``learning_rate`` are the swept parameters;
    their defaults match the illustrative single-run setup.
    """

    population_size: int = 96
    num_days: int = 500
    slots_per_day: int = 24
    slots_per_agent: int = 4
    slot_capacity: int = 16
    exchange_rounds: int = 100
    learning_rate: float = 0.5
    social_capital_enabled: bool = True
    initial_social_fraction: float = 0.5
    runs: int = 50
    seed: int = 42

    def __post_init__(self) -> None:
        counts = {
            "population_size": self.population_size,
            "num_days": self.num_days,
            "slots_per_day": self.slots_per_day,
            "slots_per_agent": self.slots_per_agent,
            "slot_capacity": self.slot_capacity,
            "exchange_rounds": self.exchange_rounds,
            "runs": self.runs,
        }
        for name, value in counts.items():
            if not isinstance(value, int) or value < 1:
                raise ValueError(f"{name}: must be an integer >= 1, got {value!r}")
        for name, value in (
            ("learning_rate", self.learning_rate),
            ("initial_social_fraction", self.initial_social_fraction),
        ):
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name}: must lie in [0, 1], got {value!r}")
        if self.slots_per_day > 63:
            # slot sets live in single-word bitmasks
            raise ValueError(
                f"slots_per_day: must be <= 63, got {self.slots_per_day}"
            )
        if self.slots_per_agent > self.slots_per_day:
            raise ValueError(
                "slots_per_agent: cannot exceed slots_per_day "
                f"({self.slots_per_agent} > {self.slots_per_day})"
            )
        if self.population_size * self.slots_per_agent > (
            self.slots_per_day * self.slot_capacity
        ):
            raise ValueError(
                "population_size: allocation infeasible, "
                f"{self.population_size} agents x {self.slots_per_agent} slots "
                f"exceed {self.slots_per_day} slots x capacity {self.slot_capacity}"
            )
        if not isinstance(self.seed, int) or self.seed.bit_length() > 64:
            raise ValueError(f"seed: must be a 64-bit integer, got {self.seed!r}")

    @property
    def seed_u64(self) -> int:
        return self.seed & _U64


# Preferences ---------------------------------------------------------------


def sample_preference_indices(rng: np.random.Generator, cfg: SimConfig) -> np.ndarray:
    """Draw each agent's demanded slots, uniformly without replacement.

    Returns an ``(population_size, slots_per_agent)`` array of slot ids.
    The k smallest of ``slots_per_day`` iid uniforms per row give a
    uniform k-subset in a single vectorised draw.
    """
    u = rng.random((cfg.population_size, cfg.slots_per_day))
    k = cfg.slots_per_agent
    if k == cfg.slots_per_day:
        return np.tile(np.arange(k), (cfg.population_size, 1))
    return np.argpartition(u, k - 1, axis=1)[:, :k]


def preference_masks(indices: np.ndarray) -> list[int]:
    """Convert an ``(N, k)`` slot-id array into per-agent bitmasks."""
    packed = np.bitwise_or.reduce(np.left_shift(np.int64(1), indices), axis=1)
    return packed.tolist()


def generate_preferences(rng: np.random.Generator, cfg: SimConfig) -> list[frozenset[int]]:
    """Per-agent demanded slot sets for one day."""
    idx = sample_preference_indices(rng, cfg)
    return [frozenset(row) for row in idx.tolist()]


# Allocation ----------------------------------------------------------------


@dataclass
class AllocationState:
    """Who currently holds which slots.

    ``holdings_mask[a]`` is agent ``a``'s slot set; ``occupancy[s]`` counts
    holders of slot ``s`` and never exceeds the slot capacity.
    """

    holdings_mask: list[int]
    occupancy: list[int]
    slots_per_agent: int

    def holdings(self, agent: int) -> frozenset[int]:
        return frozenset(slots_from_mask(self.holdings_mask[agent]))

    def check(self, cfg: SimConfig) -> None:
        """Raise AssertionError if any structural invariant is broken."""
        assert len(self.holdings_mask) == cfg.population_size
        counts = [0] * cfg.slots_per_day
        for mask in self.holdings_mask:
            assert mask.bit_count() == cfg.slots_per_agent, "duplicate or missing slot"
            for s in slots_from_mask(mask):
                counts[s] += 1
        assert counts == list(self.occupancy), "occupancy out of sync"
        assert all(c <= cfg.slot_capacity for c in counts), "capacity exceeded"


_REPAIR_RANDOM_TRIES = 64
_REPAIR_MAX_REDEALS = 10_000


def initial_allocation(
    rng: np.random.Generator, draw: random.Random, cfg: SimConfig
) -> AllocationState:
    """Deal a random allocation honouring per-slot capacity.

    The multiset of capacity tokens (each slot repeated ``slot_capacity``
    times) is shuffled and dealt k per agent, which enforces occupancy by
    construction. Agents dealt the same slot twice are repaired by token
    swaps: first against the undealt remainder, then against random
    partners, preserving occupancy throughout. ``rng`` supplies the bulk
    shuffle, ``draw`` the scalar repair picks.
    """
    n, k, cap = cfg.population_size, cfg.slots_per_agent, cfg.slot_capacity
    s_count = cfg.slots_per_day

    if k == s_count:
        # every agent must hold every slot; feasibility guarantees n <= cap
        full = (1 << k) - 1
        return AllocationState([full] * n, [n] * s_count, k)

    tokens = np.repeat(np.arange(s_count), cap)
    for _ in range(_REPAIR_MAX_REDEALS):
        dealt = rng.permutation(tokens)
        hands = dealt[: n * k].reshape(n, k).tolist()
        pool = dealt[n * k :].tolist()
        occupancy = np.bincount(dealt[: n * k], minlength=s_count).tolist()
        masks = [mask_from_slots(hand) for hand in hands]
        if _repair_duplicates(hands, masks, pool, occupancy, n, k, draw):
            return AllocationState(masks, occupancy, k)
    raise RuntimeError("initial_allocation: duplicate repair failed to converge")


def _repair_duplicates(hands, masks, pool, occupancy, n, k, draw) -> bool:
    """Swap away within-hand duplicate slots; True on success."""
    for i in range(n):
        guard = 0
        while masks[i].bit_count() < k:
            guard += 1
            if guard > 4 * k:
                return False
            s = _first_duplicate(hands[i])
            if not _swap_out_duplicate(hands, masks, pool, occupancy, i, s, n, k, draw):
                return False
    return True


def _first_duplicate(hand: list[int]) -> int:
    seen = 0
    for s in hand:
        bit = 1 << s
        if seen & bit:
            return s
        seen |= bit
    raise AssertionError("no duplicate present")


def _swap_out_duplicate(hands, masks, pool, occupancy, i, s, n, k, draw) -> bool:
    mask_i = masks[i]
    # cheapest fix: trade with the undealt remainder
    for p_idx, t in enumerate(pool):
        if not (mask_i >> t) & 1:
            pool[p_idx] = s
            _replace_token(hands[i], s, t)
            masks[i] |= 1 << t
            occupancy[s] -= 1
            occupancy[t] += 1
            return True
    # otherwise trade tokens with another agent
    s_bit = 1 << s
    for attempt in range(_REPAIR_RANDOM_TRIES + n):
        if attempt < _REPAIR_RANDOM_TRIES:
            j = int(draw.random() * n)
            if j == i:
                continue
            t = hands[j][int(draw.random() * k)]
        else:
            j = attempt - _REPAIR_RANDOM_TRIES  # exhaustive fallback
            if j == i:
                continue
            t = _partner_token(hands[j], masks[j], mask_i, s_bit)
            if t is None:
                continue
        if (mask_i >> t) & 1 or (masks[j] & s_bit):
            continue
        _replace_token(hands[i], s, t)
        _replace_token(hands[j], t, s)
        masks[i] |= 1 << t
        masks[j] = mask_from_slots(hands[j])
        return True
    return False


def _partner_token(hand_j, mask_j, mask_i, s_bit):
    if mask_j & s_bit:
        return None
    for t in hand_j:
        if not (mask_i >> t) & 1:
            return t
    return None


def _replace_token(hand: list[int], old: int, new: int) -> None:
    hand[hand.index(old)] = new


# Satisfaction --------------------------------------------------------------


def satisfaction(holdings, prefs) -> float:
    """Fraction of an agent's demanded slots it currently holds."""
    prefs = frozenset(prefs)
    return len(frozenset(holdings) & prefs) / len(prefs)


def optimum_satisfaction(all_prefs, cfg: SimConfig) -> float:
    """Upper bound on mean satisfaction for a preference profile.

    Each demanded (agent, slot) pair is a distinct unit, so the best any
    allocation can do is serve min(demand, capacity) units per slot.
    """
    demand = np.zeros(cfg.slots_per_day, dtype=np.int64)
    for prefs in all_prefs:
        for s in prefs:
            demand[s] += 1
    return optimum_from_demand(demand, cfg)


def optimum_from_demand(demand: np.ndarray, cfg: SimConfig) -> float:
    served = np.minimum(demand, cfg.slot_capacity).sum()
    return float(served) / (cfg.population_size * cfg.slots_per_agent)


# Favour ledger -------------------------------------------------------------


@dataclass
class FavourLedger:
    """One agent's memory of favours received and not yet repaid.

    ``owed[j]`` counts favours counterpart ``j`` has granted the owner
    (by accepting the owner's exchange requests) minus favours the owner
    has already repaid to ``j``. Balances never go negative. The ledger
    survives day boundaries and strategy switches.
    """

    owner: int
    owed: dict[int, int] = field(default_factory=dict)

    def record_favour(self, giver: int) -> "FavourLedger":
        """Note that ``giver`` accepted one of the owner's requests."""
        if giver == self.owner:
            raise ValueError("cannot record a favour from oneself")
        self.owed[giver] = self.owed.get(giver, 0) + 1
        return self

    def repay_favour(self, counterpart: int) -> "FavourLedger":
        """Consume one outstanding favour owed to ``counterpart``."""
        balance = self.owed.get(counterpart, 0)
        if balance < 1:
            raise ValueError(
                f"agent {self.owner} owes no favour to {counterpart}"
            )
        self.owed[counterpart] = balance - 1
        return self

    def balance(self, counterpart: int) -> int:
        return self.owed.get(counterpart, 0)

    def outstanding_total(self) -> int:
        return sum(self.owed.values())
