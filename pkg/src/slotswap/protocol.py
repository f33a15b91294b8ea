"""Per-round pairwise exchange machinery (pure-Python reference).

Each round: agents post their held-but-unwanted slots to an anonymous
advert board, then in a shuffled order each unsatisfied agent that has
not itself been asked picks one advert it wants and offers one of its
own unwanted slots in return. Receivers accept or reject according to
their strategy, accepted swaps are applied immediately, and favour
ledger updates are flushed after the acceptance sweep.

All random picks come from one numpy Generator via ``integers`` draws in
a fixed order; the accelerated kernel twin consumes the identical
stream, so both produce bit-identical trajectories (see tests).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .core import AllocationState, FavourLedger

__all__ = [
    "Decision",
    "AcceptDecision",
    "ExchangeRequest",
    "AdvertBoard",
    "DayState",
    "RoundStats",
    "build_board",
    "select_request",
    "decide",
    "apply_exchange",
    "run_exchange_round",
    "exchange_possible",
    "shuffle_in_place",
]


class Decision(Enum):
    BENEFICIAL = "beneficial"
    FAVOUR_REPAY = "favour_repay"
    UNCONDITIONAL = "unconditional"
    REJECT = "reject"


@dataclass(frozen=True)
class AcceptDecision:
    kind: Decision
    repaid_counterpart: int | None = None
    stale: bool = False

    @property
    def accepted(self) -> bool:
        return self.kind is not Decision.REJECT


@dataclass(frozen=True)
class ExchangeRequest:
    """One proposed swap: requester wants ``requested_slot`` from
    ``receiver`` and offers its own ``offered_slot`` in exchange."""

    requester: int
    receiver: int
    requested_slot: int
    offered_slot: int


@dataclass
class AdvertBoard:
    """Anonymous listing of held-but-unwanted slots.

    ``by_slot[s]`` lists the owners currently advertising slot ``s``, in
    insertion order; ``locked`` holds owners already addressed by a
    request this round.
    """

    by_slot: list[list[int]]
    locked: set[int] = field(default_factory=set)

    def adverts(self) -> list[tuple[int, int]]:
        """Flat (owner, slot) pairs, slot-major, for inspection."""
        return [
            (owner, slot)
            for slot, owners in enumerate(self.by_slot)
            for owner in sorted(owners)
        ]

    def total(self) -> int:
        return sum(len(owners) for owners in self.by_slot)


def build_board(alloc: AllocationState, prefs_mask: list[int]) -> AdvertBoard:
    """List every agent's held-but-not-demanded slots; no locks."""
    by_slot: list[list[int]] = [[] for _ in range(len(alloc.occupancy))]
    for agent, hold in enumerate(alloc.holdings_mask):
        unwanted = hold & ~prefs_mask[agent]
        while unwanted:
            low = unwanted & -unwanted
            by_slot[low.bit_length() - 1].append(agent)
            unwanted ^= low
    return AdvertBoard(by_slot)


@dataclass
class DayState:
    """Mutable within-day state shared by the exchange rounds.

    The board is maintained incrementally as swaps land; because swaps
    are the only thing that changes holdings, it always equals a fresh
    rebuild at the start of each round.
    """

    alloc: AllocationState
    prefs_mask: list[int]
    sat_count: list[int]
    board: AdvertBoard
    k: int

    @classmethod
    def create(cls, alloc: AllocationState, prefs_mask: list[int], k: int) -> "DayState":
        sat = [
            (hold & prefs).bit_count()
            for hold, prefs in zip(alloc.holdings_mask, prefs_mask)
        ]
        return cls(alloc, prefs_mask, sat, build_board(alloc, prefs_mask), k)

    def satisfactions(self) -> list[float]:
        return [c / self.k for c in self.sat_count]


def shuffle_in_place(seq: list[int], rng: np.random.Generator) -> None:
    """Fisher-Yates shuffle drawing one bounded integer per step.

    Shared draw pattern with the accelerated kernel; do not change one
    without the other.
    """
    for i in range(len(seq) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        seq[i], seq[j] = seq[j], seq[i]


def select_request(
    agent: int,
    board: AdvertBoard,
    prefs_mask: list[int],
    hold_mask: list[int],
    rng: np.random.Generator,
) -> ExchangeRequest | None:
    """Pick a uniform advert the agent wants from an unlocked owner.

    The offered slot comes from the agent's own unwanted holdings: when
    any of them is a slot the chosen receiver demands and lacks, the
    offer is a uniform pick among those (the receiver effectively
    browses the requester's discards when approving); otherwise it is a
    uniform pick among all the agent's unwanted holdings. Returns None
    (consuming no draws) when no eligible advert exists.
    """
    own_prefs = prefs_mask[agent]
    own_hold = hold_mask[agent]
    wanted = own_prefs & ~own_hold
    if not wanted:
        return None
    locked = board.locked
    by_slot = board.by_slot
    candidates: list[int] = []  # packed (owner << 8) | slot, slot-ascending
    while wanted:
        low = wanted & -wanted
        slot = low.bit_length() - 1
        for owner in by_slot[slot]:
            if owner not in locked and owner != agent:
                candidates.append((owner << 8) | slot)
        wanted ^= low
    if not candidates:
        return None
    pick = candidates[int(rng.integers(0, len(candidates)))]
    owner, slot = pick >> 8, pick & 0xFF
    unwanted = own_hold & ~own_prefs
    useful = unwanted & prefs_mask[owner] & ~hold_mask[owner]
    pool = useful if useful else unwanted
    offers = []
    while pool:
        low = pool & -pool
        offers.append(low.bit_length() - 1)
        pool ^= low
    offered = offers[int(rng.integers(0, len(offers)))]
    return ExchangeRequest(agent, owner, slot, offered)


def decide(
    req: ExchangeRequest,
    social: bool,
    owed_to_requester: int,
    prefs_mask: int,
    hold_mask: int,
    social_capital_enabled: bool,
) -> AcceptDecision:
    """Receiver's verdict on a request, re-validated against live state.

    Pure function of the receiver's strategy, ledger balance towards the
    requester, and current slot sets; mutates nothing. Accepting never
    lowers the receiver's satisfaction: a swap is taken when the offer is
    an outright gain, or--for social receivers--when the surrendered slot
    is unwanted and either a favour is being repaid (ledger active) or
    flexibility is unconditional (ledger disabled).
    """
    s_bit = 1 << req.requested_slot
    if not (hold_mask & s_bit) or (prefs_mask & s_bit):
        return AcceptDecision(Decision.REJECT, stale=True)
    f_bit = 1 << req.offered_slot
    if (prefs_mask & f_bit) and not (hold_mask & f_bit):
        return AcceptDecision(Decision.BENEFICIAL)
    if social and social_capital_enabled and owed_to_requester >= 1:
        return AcceptDecision(Decision.FAVOUR_REPAY, repaid_counterpart=req.requester)
    if social and not social_capital_enabled:
        return AcceptDecision(Decision.UNCONDITIONAL)
    return AcceptDecision(Decision.REJECT)


def apply_exchange(day: DayState, req: ExchangeRequest) -> bool:
    """Swap the two slots if both parties still hold their sides.

    Returns False (state untouched) when the request went stale between
    decision and application. Per-slot occupancy is invariant: the swap
    moves one token of each slot between the two agents.
    """
    hold = day.alloc.holdings_mask
    prefs = day.prefs_mask
    r, o = req.requester, req.receiver
    s_bit = 1 << req.requested_slot
    f_bit = 1 << req.offered_slot
    if not (hold[o] & s_bit) or (hold[o] & f_bit):
        return False
    if not (hold[r] & f_bit) or (hold[r] & s_bit):
        return False
    if (prefs[o] & s_bit) or (prefs[r] & f_bit):
        return False  # a party would surrender a demanded slot
    hold[r] = (hold[r] ^ f_bit) | s_bit
    hold[o] = (hold[o] ^ s_bit) | f_bit
    board = day.board.by_slot
    board[req.offered_slot].remove(r)
    board[req.requested_slot].remove(o)
    if prefs[r] & s_bit:
        day.sat_count[r] += 1
    else:  # unreachable via select_request; kept for direct callers
        board[req.requested_slot].append(r)
    if prefs[o] & f_bit:
        day.sat_count[o] += 1
    else:
        board[req.offered_slot].append(o)
    return True


@dataclass
class RoundStats:
    requests: int = 0
    accepted: int = 0
    rejected: int = 0
    stale: int = 0
    favours_recorded: int = 0
    favours_repaid: int = 0


def run_exchange_round(
    day: DayState,
    strategies: list[bool],
    ledgers: list[FavourLedger],
    social_capital_enabled: bool,
    rng: np.random.Generator,
    events: list | None = None,
    day_no: int = 0,
    round_no: int = 0,
) -> RoundStats:
    """One full exchange round; mutates day state and ledgers in place.

    Fully satisfied agents neither advertise nor request, so the round
    ranges over the unsatisfied only. Each agent issues at most one
    request and receives at most one (owner locking). Decisions are
    evaluated in the same shuffled order, swaps land immediately, and
    ledger updates are flushed after the sweep: every ledger-tracking
    requester whose request was applied records a favour from the
    receiver, and every favour-repay acceptance burns one owed favour.
    """
    stats = RoundStats()
    sat_count = day.sat_count
    k = day.k
    order = [a for a in range(len(sat_count)) if sat_count[a] < k]
    if not order:
        return stats
    shuffle_in_place(order, rng)

    board = day.board
    board.locked.clear()
    locked = board.locked
    hold = day.alloc.holdings_mask
    prefs = day.prefs_mask
    pending: dict[int, ExchangeRequest] = {}

    for agent in order:
        if agent in locked:
            continue
        req = select_request(agent, board, prefs, hold, rng)
        if req is None:
            continue
        locked.add(req.receiver)
        pending[req.receiver] = req
        stats.requests += 1
        if events is not None:
            events.append(
                {
                    "kind": "request",
                    "day": day_no,
                    "round": round_no,
                    "requester": req.requester,
                    "receiver": req.receiver,
                    "requested_slot": req.requested_slot,
                    "offered_slot": req.offered_slot,
                }
            )

    ledger_updates: list[tuple[ExchangeRequest, AcceptDecision]] = []
    for receiver in order:
        req = pending.pop(receiver, None)
        if req is None:
            continue
        social = strategies[receiver]
        owed = (
            ledgers[receiver].balance(req.requester)
            if social and social_capital_enabled
            else 0
        )
        verdict = decide(
            req, social, owed, prefs[receiver], hold[receiver], social_capital_enabled
        )
        applied = verdict.accepted and apply_exchange(day, req)
        if events is not None:
            events.append(
                {
                    "kind": "decision",
                    "day": day_no,
                    "round": round_no,
                    "receiver": receiver,
                    "requester": req.requester,
                    "decision": verdict.kind.value,
                    "applied": applied,
                }
            )
        if applied:
            stats.accepted += 1
            ledger_updates.append((req, verdict))
        elif verdict.accepted:  # went stale between decision and application
            stats.stale += 1
        else:
            stats.rejected += 1
            if verdict.stale:
                stats.stale += 1

    for req, verdict in ledger_updates:
        if social_capital_enabled and strategies[req.requester]:
            ledgers[req.requester].record_favour(req.receiver)
            stats.favours_recorded += 1
            if events is not None:
                events.append(
                    {
                        "kind": "ledger",
                        "day": day_no,
                        "round": round_no,
                        "agent": req.requester,
                        "counterpart": req.receiver,
                        "delta": 1,
                    }
                )
        if verdict.kind is Decision.FAVOUR_REPAY:
            ledgers[req.receiver].repay_favour(req.requester)
            stats.favours_repaid += 1
            if events is not None:
                events.append(
                    {
                        "kind": "ledger",
                        "day": day_no,
                        "round": round_no,
                        "agent": req.receiver,
                        "counterpart": req.requester,
                        "delta": -1,
                    }
                )
    return stats


def exchange_possible(
    day: DayState,
    strategies: list[bool],
    ledgers: list[FavourLedger],
    social_capital_enabled: bool,
) -> bool:
    """Whether any future round of this day could still land a swap.

    Holdings, preferences and ledgers only change when a swap is
    accepted, so once no (requester, advert, offer) combination can be
    accepted the day is frozen and remaining rounds are no-ops.
    """
    hold = day.alloc.holdings_mask
    prefs = day.prefs_mask
    by_slot = day.board.by_slot
    k = day.k
    for a, count in enumerate(day.sat_count):
        if count == k:
            continue
        prefs_a = prefs[a]
        hold_a = hold[a]
        wanted = prefs_a & ~hold_a
        unwanted = hold_a & ~prefs_a
        while wanted:
            low = wanted & -wanted
            wanted ^= low
            for o in by_slot[low.bit_length() - 1]:
                if o == a:
                    continue
                if strategies[o]:
                    if not social_capital_enabled:
                        return True
                    if ledgers[o].balance(a) >= 1:
                        return True
                if unwanted & prefs[o] & ~hold[o]:
                    return True
    return False
