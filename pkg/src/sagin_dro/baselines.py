"""Comparison policies: Greedy, Deterministic and Greedy-deterministic.

Greedy keeps the robust machinery but forbids local computing. The two
deterministic policies replace the uncertain volume by a single estimate
(the mean of the support points) and plan as if it were certain; their
allocation at that estimate is then applied open-loop to whatever arrives.
"""

from __future__ import annotations

import numpy as np

from .ambiguity import AmbiguitySet, DiscreteDistribution, SupportSet
from .channel import ChannelRealization
from .dro import OffloadPlan, branch_and_bound, solve_dro
from .scenario import Scenario

POLICIES = ("dro", "greedy", "deterministic", "greedy-deterministic")


def greedy_plan(scenario: Scenario, rates: ChannelRealization, amb: AmbiguitySet) -> OffloadPlan:
    """Robust plan with every bit offloaded (y_u = 0)."""
    return solve_dro(scenario, rates, amb, no_local=True)


def point_estimate(support: SupportSet) -> SupportSet:
    return SupportSet((float(np.mean(support.array)),))


def _deterministic(scenario, rates, support, no_local):
    est = point_estimate(support)
    plan = branch_and_bound(scenario, rates, DiscreteDistribution((1.0,)), est, no_local)
    plan.worst_case_objective = plan.expected_latency_s
    return plan


def deterministic_plan(scenario: Scenario, rates: ChannelRealization, support: SupportSet) -> OffloadPlan:
    return _deterministic(scenario, rates, support, no_local=False)


def greedy_deterministic_plan(scenario: Scenario, rates: ChannelRealization,
                              support: SupportSet) -> OffloadPlan:
    return _deterministic(scenario, rates, support, no_local=True)


def plan_for(policy: str, scenario: Scenario, rates: ChannelRealization, amb: AmbiguitySet) -> OffloadPlan:
    """Dispatch by policy name; deterministic policies only use ``amb.support``."""
    if policy == "dro":
        return solve_dro(scenario, rates, amb)
    if policy == "greedy":
        return greedy_plan(scenario, rates, amb)
    if policy == "deterministic":
        return deterministic_plan(scenario, rates, amb.support)
    if policy == "greedy-deterministic":
        return greedy_deterministic_plan(scenario, rates, amb.support)
    raise ValueError(f"unknown policy {policy!r}; expected one of {POLICIES}")
