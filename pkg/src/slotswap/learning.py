"""End-of-day payoff-biased strategy revision.

A fixed share of agents each observe one random other agent and copy the
observed strategy with probability equal to the satisfaction gap, when
positive. Comparisons use the day-end satisfaction snapshot taken before
any copying, while the strategy copied is whatever the observed agent
holds at processing time, so same-day copies can cascade.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Sequence

__all__ = ["LearningEvent", "learning_step"]


@dataclass(frozen=True)
class LearningEvent:
    learner: int
    observed: int
    learner_sat: float
    observed_sat: float
    copied: bool


def learning_step(
    strategies: list[bool],
    satisfactions: Sequence[float],
    learning_rate: float,
    draw: random.Random,
) -> list[LearningEvent]:
    """Run one day's imitation pass; mutates ``strategies`` in place.

    Exactly ``floor(learning_rate * n)`` distinct learners are drawn
    without replacement and processed sequentially. Self-observation is
    excluded. Favour ledgers are untouched: a strategy switch carries an
    agent's accumulated social capital with it.
    """
    n = len(strategies)
    count = int(learning_rate * n)
    if count == 0:
        return []
    events: list[LearningEvent] = []
    for learner in draw.sample(range(n), count):
        other = int(draw.random() * (n - 1))
        if other >= n - 1:
            other = n - 2
        if other >= learner:
            other += 1
        gap = satisfactions[other] - satisfactions[learner]
        copied = False
        if gap > 0 and gap > draw.random():
            strategies[learner] = strategies[other]
            copied = True
        events.append(
            LearningEvent(
                learner, other, satisfactions[learner], satisfactions[other], copied
            )
        )
    return events
