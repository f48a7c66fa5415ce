"""Random small instances shared by the engine and acceptance tests."""

from dataclasses import replace

import numpy as np

from sagin_dro.ambiguity import AmbiguitySet, DiscreteDistribution, Metric, SupportSet
from sagin_dro.channel import realize_rates
from sagin_dro.scenario import default_scenario


def small_case(seed, T=2, N=None, M=None, K=None):
    """(scenario, rates, support, P) with every support point absorbable."""
    rng = np.random.default_rng(seed)
    N = int(rng.integers(1, 4)) if N is None else N
    M = int(rng.integers(0, 3)) if M is None else M
    K = int(rng.integers(1, 5)) if K is None else K
    sc = default_scenario(T=T, n_bs=N, n_sat=M)
    bs = tuple(replace(b, capacity_bps=float(rng.uniform(5e6, 40e6))) for b in sc.bs_list)
    sc = sc.with_(bs_list=bs)
    rates = realize_rates(sc, int(rng.integers(0, 2**31)))
    top = sc.cap_uav + max(np.concatenate([sc.cap_bs, sc.cap_sat]))
    pts = np.sort(rng.uniform(0.02, 0.95, K)) * top
    pts = np.unique(pts)
    support = SupportSet(tuple(pts))
    P = DiscreteDistribution(tuple(rng.dirichlet(np.ones(support.K))))
    return sc, rates, support, P


def small_ambiguity(seed, metric, n_samples=40):
    rng = np.random.default_rng(seed + 7919)
    sc, rates, support, P = small_case(seed)
    samples = support.array[rng.choice(support.K, n_samples, p=P.array)]
    amb = AmbiguitySet.calibrated(Metric.parse(metric), support, samples, 0.9)
    return sc, rates, amb
