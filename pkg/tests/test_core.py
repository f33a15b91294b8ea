"""Config, preference, allocation, satisfaction and ledger behaviour."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slotswap.core import (
    AllocationState,
    FavourLedger,
    SimConfig,
    generate_preferences,
    initial_allocation,
    mask_from_slots,
    optimum_satisfaction,
    sample_preference_indices,
    satisfaction,
    slots_from_mask,
)

import random


def rng_pair(seed=0):
    return np.random.default_rng(seed), random.Random(seed)


class TestSimConfig:
    def test_defaults_valid(self):
        cfg = SimConfig()
        assert cfg.population_size == 96
        assert cfg.num_days == 500
        assert cfg.slots_per_day == 24
        assert cfg.slots_per_agent == 4
        assert cfg.slot_capacity == 16
        assert cfg.runs == 50

    @pytest.mark.parametrize(
        "kwargs, key",
        [
            ({"population_size": 0}, "population_size"),
            ({"num_days": 0}, "num_days"),
            ({"slots_per_agent": 30}, "slots_per_agent"),
            ({"population_size": 97}, "population_size"),  # 97*4 > 24*16
            ({"learning_rate": 1.5}, "learning_rate"),
            ({"initial_social_fraction": -0.1}, "initial_social_fraction"),
            ({"slots_per_day": 64}, "slots_per_day"),
        ],
    )
    def test_invalid_rejected_naming_field(self, kwargs, key):
        with pytest.raises(ValueError, match=key):
            SimConfig(**kwargs)

    def test_feasibility_boundary_accepted(self):
        SimConfig(population_size=96, slots_per_agent=4, slots_per_day=24, slot_capacity=16)
        SimConfig(population_size=1, slots_per_agent=4)


class TestMasks:
    def test_round_trip(self):
        assert slots_from_mask(mask_from_slots([2, 5, 9, 21])) == (2, 5, 9, 21)
        assert mask_from_slots([]) == 0
        assert slots_from_mask(0) == ()


class TestPreferences:
    def test_k_equals_slots_means_everything_demanded(self):
        cfg = SimConfig(slots_per_agent=24, slot_capacity=96)
        rng, _ = rng_pair(3)
        prefs = generate_preferences(rng, cfg)
        assert all(p == frozenset(range(24)) for p in prefs)

    def test_deterministic_for_fixed_seed(self):
        cfg = SimConfig()
        a = generate_preferences(np.random.default_rng(11), cfg)
        b = generate_preferences(np.random.default_rng(11), cfg)
        assert a == b

    def test_each_agent_gets_k_distinct(self):
        cfg = SimConfig()
        prefs = generate_preferences(np.random.default_rng(5), cfg)
        assert len(prefs) == 96
        assert all(len(p) == 4 for p in prefs)
        assert all(all(0 <= s < 24 for s in p) for p in prefs)

    def test_marginal_frequency_matches_uniform_sampling(self):
        # each slot should appear with frequency k / slots_per_day = 1/6
        cfg = SimConfig()
        rng = np.random.default_rng(17)
        draws = 1100  # 1100 * 96 > 1e5 sampled agents
        counts = np.zeros(24, dtype=np.int64)
        agents = 0
        for _ in range(draws):
            idx = sample_preference_indices(rng, cfg)
            counts += np.bincount(idx.reshape(-1), minlength=24)
            agents += cfg.population_size
        freq = counts / (agents * 1.0)
        assert np.all(np.abs(freq - 1 / 6) < 0.01)


class TestInitialAllocation:
    def test_default_config_fills_every_slot_to_capacity(self):
        # 96 agents x 4 slots = 24 slots x 16 capacity exactly
        cfg = SimConfig()
        rng, draw = rng_pair(2)
        alloc = initial_allocation(rng, draw, cfg)
        assert alloc.occupancy == [16] * 24
        alloc.check(cfg)

    def test_single_agent(self):
        cfg = SimConfig(population_size=1)
        rng, draw = rng_pair(9)
        alloc = initial_allocation(rng, draw, cfg)
        assert alloc.holdings_mask[0].bit_count() == 4
        assert all(c <= 1 for c in alloc.occupancy) or max(alloc.occupancy) <= 16

    def test_thousand_seeded_draws_never_violate_invariants(self):
        cfg = SimConfig()
        rng, draw = rng_pair(123)
        for _ in range(1000):
            alloc = initial_allocation(rng, draw, cfg)
            for mask in alloc.holdings_mask:
                assert mask.bit_count() == 4  # distinct holdings
            assert alloc.occupancy == [16] * 24

    def test_independent_of_preferences(self):
        # allocation consumes only its own draws, never the preference profile
        cfg = SimConfig()
        rng, draw = rng_pair(77)
        alloc = initial_allocation(rng, draw, cfg)
        rng2, draw2 = rng_pair(77)
        alloc2 = initial_allocation(rng2, draw2, cfg)
        assert alloc.holdings_mask == alloc2.holdings_mask

    @settings(max_examples=60, deadline=None)
    @given(data=st.data())
    def test_feasible_configs_terminate_with_valid_state(self, data):
        slots = data.draw(st.integers(2, 12))
        k = data.draw(st.integers(1, slots))
        cap = data.draw(st.integers(1, 10))
        max_pop = (slots * cap) // k
        pop = data.draw(st.integers(1, max(1, min(40, max_pop))))
        seed = data.draw(st.integers(0, 2**32 - 1))
        cfg = SimConfig(
            population_size=pop,
            slots_per_day=slots,
            slots_per_agent=k,
            slot_capacity=cap,
        )
        rng, draw = rng_pair(seed)
        alloc = initial_allocation(rng, draw, cfg)
        alloc.check(cfg)


class TestSatisfaction:
    def test_full_overlap(self):
        assert satisfaction({2, 5, 9, 14}, {2, 5, 9, 14}) == 1.0

    def test_disjoint(self):
        assert satisfaction({1, 2, 3, 4}, {5, 6, 7, 8}) == 0.0

    def test_partial(self):
        assert satisfaction({2, 5, 9, 21}, {2, 5, 9, 14}) == 0.75

    @settings(max_examples=100, deadline=None)
    @given(data=st.data())
    def test_always_multiple_of_one_over_k(self, data):
        k = data.draw(st.integers(1, 8))
        slots = data.draw(st.integers(k, 20))
        prefs = data.draw(
            st.sets(st.integers(0, slots - 1), min_size=k, max_size=k)
        )
        holdings = data.draw(
            st.sets(st.integers(0, slots - 1), min_size=k, max_size=k)
        )
        value = satisfaction(holdings, prefs)
        assert 0.0 <= value <= 1.0
        assert abs(value * k - round(value * k)) < 1e-12


class TestOptimum:
    def test_all_demand_within_capacity(self):
        cfg = SimConfig()
        # spread demand so no slot exceeds 16
        prefs = [frozenset(((4 * i + j) % 24 for j in range(4))) for i in range(96)]
        assert optimum_satisfaction(prefs, cfg) == 1.0

    def test_everyone_demands_same_four_slots(self):
        cfg = SimConfig()
        prefs = [frozenset({0, 1, 2, 3})] * 96
        assert optimum_satisfaction(prefs, cfg) == pytest.approx(4 * 16 / 384)

    def test_matches_bipartite_matching_oracle_on_small_instances(self):
        # independent route: max-flow matching of preference units to
        # slot capacity on exhaustive small instances
        nx = pytest.importorskip("networkx")
        rng = np.random.default_rng(99)
        for _ in range(120):
            slots = int(rng.integers(2, 7))
            k = int(rng.integers(1, slots + 1))
            cap = int(rng.integers(1, 5))
            max_pop = (slots * cap) // k
            if max_pop < 1:
                continue
            pop = int(rng.integers(1, min(8, max_pop) + 1))
            cfg = SimConfig(
                population_size=pop,
                slots_per_day=slots,
                slots_per_agent=k,
                slot_capacity=cap,
            )
            prefs = generate_preferences(rng, cfg)
            graph = nx.DiGraph()
            for i, p in enumerate(prefs):
                graph.add_edge("src", f"a{i}", capacity=k)
                for s in p:
                    graph.add_edge(f"a{i}", f"s{s}", capacity=1)
            for s in range(slots):
                graph.add_edge(f"s{s}", "sink", capacity=cap)
            flow = nx.maximum_flow_value(graph, "src", "sink")
            assert optimum_satisfaction(prefs, cfg) * pop * k == pytest.approx(flow)

    def test_monte_carlo_value_with_default_parameters(self):
        # uniform daily demand leaves the ceiling near 0.91 on average
        cfg = SimConfig()
        rng = np.random.default_rng(12)
        total = 0.0
        n = 10_000
        for _ in range(n):
            idx = sample_preference_indices(rng, cfg)
            demand = np.bincount(idx.reshape(-1), minlength=24)
            total += np.minimum(demand, 16).sum() / 384.0
        assert total / n == pytest.approx(0.91, abs=0.01)


class TestFavourLedger:
    def test_record_sequence(self):
        ledger = FavourLedger(owner=0)
        ledger.record_favour(7)
        assert ledger.owed == {7: 1}
        ledger.record_favour(7)
        assert ledger.owed == {7: 2}
        ledger.record_favour(3)
        assert ledger.owed == {7: 2, 3: 1}

    def test_repay_sequence(self):
        ledger = FavourLedger(owner=0, owed={7: 2})
        ledger.repay_favour(7)
        assert ledger.owed == {7: 1}
        ledger.repay_favour(7)
        assert ledger.owed == {7: 0}
        with pytest.raises(ValueError):
            ledger.repay_favour(7)

    def test_self_favour_rejected(self):
        with pytest.raises(ValueError):
            FavourLedger(owner=4).record_favour(4)

    @settings(max_examples=100, deadline=None)
    @given(
        ops=st.lists(
            st.tuples(st.booleans(), st.integers(1, 5)), min_size=0, max_size=60
        )
    )
    def test_balances_never_negative_under_valid_sequences(self, ops):
        ledger = FavourLedger(owner=0)
        for is_record, agent in ops:
            if is_record:
                ledger.record_favour(agent)
            elif ledger.balance(agent) >= 1:
                ledger.repay_favour(agent)
        assert all(v >= 0 for v in ledger.owed.values())
        assert ledger.outstanding_total() == sum(ledger.owed.values())
