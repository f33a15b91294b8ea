"""Accelerated twin of the per-day exchange loop.

Mirrors protocol.run_exchange_round and protocol.exchange_possible on
flat arrays, consuming the numpy Generator's ``integers`` draws in the
identical order, so a run that uses this kernel is bit-for-bit equal to
one that uses the pure-Python reference (the test suite compares whole
trajectories). Keep the two in lockstep when changing either.

Favour ledgers appear here as a dense (N, N) matrix: ``owed[i, j]`` is
agent i's outstanding balance towards j, matching FavourLedger.owed.
"""

from __future__ import annotations

import numpy as np

try:
    from numba import njit

    KERNEL_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is an expected dependency
    KERNEL_AVAILABLE = False

    def njit(*args, **kwargs):
        def wrap(func):
            return func

        if len(args) == 1 and callable(args[0]):
            return args[0]
        return wrap


@njit(cache=True)
def _board_remove(adv_count, adv_owner, slot, agent):
    count = adv_count[slot]
    for i in range(count):
        if adv_owner[slot, i] == agent:
            for j in range(i, count - 1):
                adv_owner[slot, j] = adv_owner[slot, j + 1]
            adv_count[slot] = count - 1
            return


@njit(cache=True)
def _swap_possible(
    hold, prefs, sat, strategies, owed, adv_count, adv_owner, k, sc_enabled, n_slots
):
    for a in range(hold.shape[0]):
        if sat[a] == k:
            continue
        wanted = prefs[a] & ~hold[a]
        unwanted = hold[a] & ~prefs[a]
        for s in range(n_slots):
            if (wanted >> s) & 1:
                for t in range(adv_count[s]):
                    o = adv_owner[s, t]
                    if o == a:
                        continue
                    if strategies[o] == 1:
                        if not sc_enabled:
                            return True
                        if owed[o, a] >= 1:
                            return True
                    if (unwanted & prefs[o] & ~hold[o]) != 0:
                        return True
    return False


@njit(cache=True)
def day_exchanges(
    rng, hold, prefs, sat, strategies, owed, k, sc_enabled, n_rounds, n_slots, capacity
):
    """Run one day's exchange rounds in place.

    Returns (accepted, favours_recorded, favours_repaid). ``hold``,
    ``sat`` and ``owed`` are mutated; ``strategies`` and ``prefs`` are
    read-only. Rounds stop early once no acceptable swap can exist.
    """
    n = hold.shape[0]

    adv_count = np.zeros(n_slots, dtype=np.int64)
    adv_owner = np.empty((n_slots, capacity), dtype=np.int64)
    for a in range(n):
        unwanted = hold[a] & ~prefs[a]
        for s in range(n_slots):
            if (unwanted >> s) & 1:
                adv_owner[s, adv_count[s]] = a
                adv_count[s] += 1

    locked = np.zeros(n, dtype=np.uint8)
    pend_from = np.full(n, -1, dtype=np.int64)
    pend_slot = np.zeros(n, dtype=np.int64)
    pend_offer = np.zeros(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    cand_owner = np.empty(n_slots * capacity, dtype=np.int64)
    cand_slot = np.empty(n_slots * capacity, dtype=np.int64)
    offers = np.empty(n_slots, dtype=np.int64)
    upd_req = np.empty(n, dtype=np.int64)
    upd_rec = np.empty(n, dtype=np.int64)
    upd_repay = np.empty(n, dtype=np.uint8)

    accepted_total = 0
    recorded_total = 0
    repaid_total = 0
    zero_streak = 0
    next_check = 1

    for round_no in range(n_rounds):
        m = 0
        for a in range(n):
            if sat[a] < k:
                order[m] = a
                m += 1
        if m == 0:
            break
        for i in range(m - 1, 0, -1):  # Fisher-Yates, one draw per step
            j = rng.integers(0, i + 1)
            tmp = order[i]
            order[i] = order[j]
            order[j] = tmp

        for i in range(m):
            a = order[i]
            locked[a] = 0
            pend_from[a] = -1

        for i in range(m):
            a = order[i]
            if locked[a] == 1:
                continue
            wanted = prefs[a] & ~hold[a]
            n_cands = 0
            for s in range(n_slots):
                if (wanted >> s) & 1:
                    for t in range(adv_count[s]):
                        o = adv_owner[s, t]
                        if locked[o] == 0 and o != a:
                            cand_owner[n_cands] = o
                            cand_slot[n_cands] = s
                            n_cands += 1
            if n_cands == 0:
                continue
            pick = rng.integers(0, n_cands)
            receiver = cand_owner[pick]
            slot = cand_slot[pick]
            unwanted = hold[a] & ~prefs[a]
            useful = unwanted & prefs[receiver] & ~hold[receiver]
            pool = useful if useful != 0 else unwanted
            n_offers = 0
            for f in range(n_slots):
                if (pool >> f) & 1:
                    offers[n_offers] = f
                    n_offers += 1
            offer = offers[rng.integers(0, n_offers)]
            locked[receiver] = 1
            pend_from[receiver] = a
            pend_slot[receiver] = slot
            pend_offer[receiver] = offer

        n_accepted = 0
        n_updates = 0
        for i in range(m):
            o = order[i]
            a = pend_from[o]
            if a < 0:
                continue
            s_bit = np.int64(1) << pend_slot[o]
            f_bit = np.int64(1) << pend_offer[o]
            if (hold[o] & s_bit) == 0 or (prefs[o] & s_bit) != 0:
                continue  # stale
            kind = 0
            if (prefs[o] & f_bit) != 0 and (hold[o] & f_bit) == 0:
                kind = 1  # outright gain
            elif strategies[o] == 1 and sc_enabled and owed[o, a] >= 1:
                kind = 2  # favour repayment
            elif strategies[o] == 1 and not sc_enabled:
                kind = 3  # unconditional flexibility
            if kind == 0:
                continue
            if (hold[o] & f_bit) != 0 or (hold[a] & f_bit) == 0 or (hold[a] & s_bit) != 0:
                continue
            if (prefs[a] & f_bit) != 0:
                continue
            hold[a] = (hold[a] ^ f_bit) | s_bit
            hold[o] = (hold[o] ^ s_bit) | f_bit
            _board_remove(adv_count, adv_owner, pend_offer[o], a)
            _board_remove(adv_count, adv_owner, pend_slot[o], o)
            sat[a] += 1  # requesters only ask for demanded slots
            if (prefs[o] & f_bit) != 0:
                sat[o] += 1
            else:
                adv_owner[pend_offer[o], adv_count[pend_offer[o]]] = o
                adv_count[pend_offer[o]] += 1
            upd_req[n_updates] = a
            upd_rec[n_updates] = o
            upd_repay[n_updates] = 1 if kind == 2 else 0
            n_updates += 1
            n_accepted += 1

        for u in range(n_updates):
            a = upd_req[u]
            o = upd_rec[u]
            if sc_enabled and strategies[a] == 1:
                owed[a, o] += 1
                recorded_total += 1
            if upd_repay[u] == 1:
                owed[o, a] -= 1
                repaid_total += 1

        accepted_total += n_accepted
        if n_accepted > 0:
            zero_streak = 0
            next_check = 1
            continue
        zero_streak += 1
        if zero_streak >= next_check and round_no + 2 < n_rounds:
            if not _swap_possible(
                hold,
                prefs,
                sat,
                strategies,
                owed,
                adv_count,
                adv_owner,
                k,
                sc_enabled,
                n_slots,
            ):
                break
            zero_streak = 0
            next_check *= 2

    return accepted_total, recorded_total, repaid_total
