import numpy as np
import pytest

from sagin_dro.ambiguity import AmbiguitySet, DiscreteDistribution, SupportSet
from sagin_dro.baselines import (
    POLICIES, deterministic_plan, greedy_deterministic_plan, greedy_plan, plan_for, point_estimate,
)
from sagin_dro.channel import realize_rates
from sagin_dro.dro import evaluate_plan, solve_dro
from sagin_dro.scenario import default_scenario
from cases import small_ambiguity


def test_point_estimate_is_mean_of_support():
    assert point_estimate(SupportSet((2.0, 6.0))).points == (4.0,)


def test_zero_support():
    sc = default_scenario(T=2, n_bs=2, n_sat=1)
    rates = realize_rates(sc, 0)
    z = SupportSet((0.0,))
    amb = AmbiguitySet("l1", 0.2, DiscreteDistribution((1.0,)), z)
    assert greedy_plan(sc, rates, amb).expected_latency_s == 0.0
    assert greedy_deterministic_plan(sc, rates, z).expected_latency_s == 0.0


@pytest.mark.parametrize("seed", range(3))
def test_greedy_never_computes_locally(seed):
    sc, rates, amb = small_ambiguity(seed, "linf")
    plan = greedy_plan(sc, rates, amb)
    assert np.all(plan.y_uav == 0)
    gd = greedy_deterministic_plan(sc, rates, amb.support)
    assert np.all(gd.y_uav == 0) and gd.support.K == 1


def test_single_point_support_matches_dro():
    sc = default_scenario(T=2, n_bs=3, n_sat=1)
    rates = realize_rates(sc, 5)
    s = SupportSet((4e8,))
    amb = AmbiguitySet("kantorovich", 0.5, DiscreteDistribution((1.0,)), s)
    a = deterministic_plan(sc, rates, s)
    b = solve_dro(sc, rates, amb)
    assert a.expected_latency_s == pytest.approx(b.expected_latency_s, rel=1e-9)
    assert np.array_equal(a.x_bs, b.x_bs) and np.array_equal(a.x_sat, b.x_sat)


def test_local_compute_helps_dro_over_greedy():
    sc = default_scenario()
    rates = realize_rates(sc, 2)
    s = SupportSet(tuple(np.linspace(1e8, 1e9, 5)))
    amb = AmbiguitySet.calibrated("l1", s, s.array[[0, 1, 1, 2, 3, 4, 4]], 0.9)
    dro = solve_dro(sc, rates, amb)
    greedy = greedy_plan(sc, rates, amb)
    assert greedy.worst_case_objective >= dro.worst_case_objective - 1e-9
    assert dro.y_uav.max() > 0


def test_deterministic_drops_when_volume_exceeds_bs():
    sc = default_scenario()
    rates = realize_rates(sc, 2)
    s = SupportSet((1e8, 3e8, 5e8))
    plan = deterministic_plan(sc, rates, s)
    assert all(kind == "bs" for kind, _ in plan.server_choice())
    big = sc.cap_uav + sc.cap_bs.max() + 1e8
    ev = evaluate_plan(plan, [big, 1e8], sc, rates)
    assert ev.drops >= 1
    assert ev.latency_s >= sc.retransmission_penalty_s


def test_greedy_deterministic_not_better_than_deterministic_on_average():
    sc = default_scenario()
    rates = realize_rates(sc, 4)
    s = SupportSet((2e8, 4e8, 6e8))
    det = deterministic_plan(sc, rates, s)
    gd = greedy_deterministic_plan(sc, rates, s)
    assert gd.expected_latency_s >= det.expected_latency_s - 1e-9
    ev_det = evaluate_plan(det, [4e8, 4e8], sc, rates)
    ev_gd = evaluate_plan(gd, [4e8, 4e8], sc, rates)
    assert ev_gd.latency_s >= ev_det.latency_s - 1e-9


def test_plan_for_dispatch():
    sc, rates, amb = small_ambiguity(1, "l1")
    for p in POLICIES:
        plan = plan_for(p, sc, rates, amb)
        xs = np.concatenate([plan.x_bs, plan.x_sat])
        assert np.all(xs.sum(axis=0) == 1)
    with pytest.raises(ValueError):
        plan_for("oracle", sc, rates, amb)
