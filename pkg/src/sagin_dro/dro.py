"""Distributionally robust offloading: inner LP, its dual, worst-case LP, dive.

Indexing convention throughout: ``k`` support point, ``t`` slot, ``b`` base
station, ``s`` satellite. Plans carry task amounts in bits and latencies in
seconds; the LPs themselves measure volume in megabits (``UNIT_BITS``).
"""

from __future__ import annotations

import itertools
import json
import logging
from dataclasses import dataclass, field

import numpy as np

from .ambiguity import AmbiguitySet, DiscreteDistribution, SupportSet, distance, membership_constraints
from .channel import ChannelRealization
from .lp import EQ, GE, LE, LinearProgram, LpBuilder, LpSolution, LpStatus, solve_lp
from .model import bs_latency_per_bit, energy_fly, latency_local, sat_latency_per_bit
from .scenario import Scenario

log = logging.getLogger(__name__)

INT_TOL = 1e-6
# LP volumes are measured in megabits; bits/seconds mixes are too badly scaled
UNIT_BITS = 1e6


class InfeasibleScenario(RuntimeError):
    """No offloading decision can absorb some support point."""


@dataclass(frozen=True)
class Coefficients:
    """Latency and energy per volume unit of every link; unusable links masked.

    ``unit`` is the number of bits in one volume unit: 1 for evaluation,
    UNIT_BITS inside the LPs.
    """

    lat_bs: np.ndarray   # (N, T) s/unit
    lat_sat: np.ndarray  # (M, T)
    en_bs: np.ndarray    # (N, T) J/unit
    en_sat: np.ndarray   # (M, T)
    ok_bs: np.ndarray    # (N, T) bool, False where a rate is zero
    ok_sat: np.ndarray
    local: float         # s/unit on the UAV
    cap_u: float         # units per slot
    cap_b: np.ndarray
    cap_s: np.ndarray
    e_fly: float
    e_max: float

    @classmethod
    def of(cls, scenario: Scenario, rates: ChannelRealization, unit: float = 1.0) -> "Coefficients":
        wl = scenario.workload
        N, M, T = scenario.N, scenario.M, scenario.T
        lat_bs = np.zeros((N, T)); en_bs = np.zeros((N, T))
        lat_sat = np.zeros((M, T)); en_sat = np.zeros((M, T))
        ok_bs = (rates.rate_ub > 0) & (rates.rate_bu > 0)
        ok_sat = (rates.rate_us > 0) & (rates.rate_su > 0)
        for b, bs in enumerate(scenario.bs_list):
            for t in range(T):
                if ok_bs[b, t]:
                    lat_bs[b, t] = bs_latency_per_bit(rates.rate_ub[b, t], rates.rate_bu[b, t], bs.cpu_hz,
                                                      wl.cycles_per_bit, wl.return_ratio)
                    en_bs[b, t] = bs.link.tx_power_up_w / rates.rate_ub[b, t]
        for s, sat in enumerate(scenario.sat_list):
            for t in range(T):
                if ok_sat[s, t]:
                    lat_sat[s, t] = sat_latency_per_bit(rates.rate_us[s, t], rates.rate_su[s, t],
                                                        sat.backhaul_bps, sat.cpu_hz,
                                                        wl.cycles_per_bit, wl.return_ratio)
                    en_sat[s, t] = (sat.link.tx_power_up_w / rates.rate_us[s, t]
                                    + sat.relay_power_w / sat.backhaul_bps)
        return cls(
            lat_bs * unit, lat_sat * unit, en_bs * unit, en_sat * unit, ok_bs, ok_sat,
            local=float(latency_local(1.0, scenario.uav.cpu_hz, wl.cycles_per_bit)) * unit,
            cap_u=scenario.cap_uav / unit,
            cap_b=scenario.cap_bs / unit,
            cap_s=scenario.cap_sat / unit,
            e_fly=energy_fly(scenario.propulsion, scenario.kinematics, scenario.T),
            e_max=scenario.energy_budget(),
        )


@dataclass
class InnerIndex:
    """Column indices of the inner LP's variables."""

    xb: np.ndarray  # (N, T)
    xs: np.ndarray  # (M, T)
    yu: np.ndarray  # (K, T)
    yb: np.ndarray  # (N, K, T)
    ys: np.ndarray  # (M, K, T)
    Q: np.ndarray   # (K, T)

    def x_keys(self) -> list[tuple[str, int, int]]:
        """Access variables in branching order: BSs first, then satellites."""
        N, T = self.xb.shape
        M = self.xs.shape[0]
        return [("b", b, t) for b in range(N) for t in range(T)] + [("s", s, t) for s in range(M) for t in range(T)]

    def x_col(self, key) -> int:
        kind, i, t = key
        return int(self.xb[i, t] if kind == "b" else self.xs[i, t])


def build_inner_lp(
    scenario: Scenario,
    rates: ChannelRealization,
    P: DiscreteDistribution | np.ndarray,
    support: SupportSet,
    fixed_x: dict | None = None,
    no_local: bool = False,
) -> tuple[LinearProgram, InnerIndex]:
    """Relaxed expected-latency minimisation for a fixed distribution.

    ``fixed_x`` maps ``(kind, i, t)`` with kind ``"b"``/``"s"`` to 0 or 1 and
    adds ``x <= 0`` / ``x >= 1`` rows. ``no_local`` adds ``y_u = 0`` rows.
    """
    p = P.array if isinstance(P, DiscreteDistribution) else np.asarray(P, dtype=float)
    xi = support.array / UNIT_BITS
    K, T, N, M = support.K, scenario.T, scenario.N, scenario.M
    if p.size != K:
        raise ValueError("distribution and support lengths differ")
    co = Coefficients.of(scenario, rates, UNIT_BITS)
    cap_u, cap_b, cap_s = co.cap_u, co.cap_b, co.cap_s

    bld = LpBuilder("min")
    xb = np.array([[bld.add_var(f"x_b[{b},{t}]", 0.0, 1.0) for t in range(T)] for b in range(N)], dtype=int).reshape(N, T)
    xs = np.array([[bld.add_var(f"x_s[{s},{t}]", 0.0, 1.0) for t in range(T)] for s in range(M)], dtype=int).reshape(M, T)
    yu = np.array([[bld.add_var(f"y_u[{k},{t}]") for t in range(T)] for k in range(K)], dtype=int).reshape(K, T)
    yb = np.array([[[bld.add_var(f"y_b[{b},{k},{t}]", 0.0, np.inf if co.ok_bs[b, t] else 0.0)
                     for t in range(T)] for k in range(K)] for b in range(N)], dtype=int).reshape(N, K, T)
    ys = np.array([[[bld.add_var(f"y_s[{s},{k},{t}]", 0.0, np.inf if co.ok_sat[s, t] else 0.0)
                     for t in range(T)] for k in range(K)] for s in range(M)], dtype=int).reshape(M, K, T)
    Q = np.array([[bld.add_var(f"Q[{k},{t}]", cost=p[k]) for t in range(T)] for k in range(K)], dtype=int).reshape(K, T)
    idx = InnerIndex(xb, xs, yu, yb, ys, Q)

    for t in range(T):
        row = {int(j): 1.0 for j in xb[:, t]}
        row.update({int(j): 1.0 for j in xs[:, t]})
        bld.add_row(row, EQ, 1.0, tag="single_server")
    for k in range(K):
        for t in range(T):
            row = {int(yu[k, t]): 1.0}
            row.update({int(j): 1.0 for j in yb[:, k, t]})
            row.update({int(j): 1.0 for j in ys[:, k, t]})
            bld.add_row(row, EQ, float(xi[k]), tag="conservation")
    for k in range(K):
        for t in range(T):
            bld.add_row({int(yu[k, t]): 1.0}, LE, cap_u, tag="cap_uav")
    for b in range(N):
        for k in range(K):
            for t in range(T):
                bld.add_row({int(yb[b, k, t]): 1.0, int(xb[b, t]): -cap_b[b]}, LE, 0.0, tag="cap_bs")
    for s in range(M):
        for k in range(K):
            for t in range(T):
                bld.add_row({int(ys[s, k, t]): 1.0, int(xs[s, t]): -cap_s[s]}, LE, 0.0, tag="cap_sat")
    for k in range(K):
        for t in range(T):
            bld.add_row({int(yu[k, t]): co.local, int(Q[k, t]): -1.0}, LE, 0.0, tag="epi_local")
    for k in range(K):
        for t in range(T):
            row = {int(yb[b, k, t]): co.lat_bs[b, t] for b in range(N) if co.ok_bs[b, t]}
            row.update({int(ys[s, k, t]): co.lat_sat[s, t] for s in range(M) if co.ok_sat[s, t]})
            row[int(Q[k, t])] = -1.0
            bld.add_row(row, LE, 0.0, tag="epi_offload")
    for k in range(K):
        row = {}
        for t in range(T):
            row.update({int(yb[b, k, t]): co.en_bs[b, t] for b in range(N) if co.ok_bs[b, t]})
            row.update({int(ys[s, k, t]): co.en_sat[s, t] for s in range(M) if co.ok_sat[s, t]})
        bld.add_row(row, LE, co.e_max - co.e_fly, tag="energy")
    for key, val in (fixed_x or {}).items():
        j = idx.x_col(key)
        if val:
            bld.add_row({j: 1.0}, GE, 1.0, tag="branch")
        else:
            bld.add_row({j: 1.0}, LE, 0.0, tag="branch")
    if no_local:
        for k in range(K):
            for t in range(T):
                bld.add_row({int(yu[k, t]): 1.0}, EQ, 0.0, tag="no_local")
    return bld.build(), idx


@dataclass
class DualIndex:
    p: np.ndarray          # (K,)
    lam_t: np.ndarray      # (T,)
    lam_tilde: np.ndarray  # (K, T)
    lam_hat: np.ndarray    # (K, T)
    lam_k: np.ndarray      # (K,)
    mu_u: np.ndarray       # (K, T)
    mu_b: np.ndarray       # (N, K, T)
    mu_s: np.ndarray       # (M, K, T)
    nu: np.ndarray         # (K, T)
    aux: list[int] = field(default_factory=list)


@dataclass(frozen=True)
class DualCertificate:
    """Multipliers of the inner LP, in the sign convention of the hand dual.

    lam_t: single-server rows; nu: conservation rows; lam_tilde / lam_hat:
    local / offload epigraph rows; lam_k: energy rows; mu_u, mu_b, mu_s:
    capacity rows.
    """

    lam_t: np.ndarray
    nu: np.ndarray
    lam_tilde: np.ndarray
    lam_hat: np.ndarray
    lam_k: np.ndarray
    mu_u: np.ndarray
    mu_b: np.ndarray
    mu_s: np.ndarray

    def objective(self, scenario: Scenario, rates: ChannelRealization, support: SupportSet) -> float:
        co = Coefficients.of(scenario, rates, UNIT_BITS)
        xi = support.array / UNIT_BITS
        return float(-self.lam_t.sum() + self.lam_k.sum() * (co.e_fly - co.e_max)
                     - (self.nu * xi[:, None]).sum() - self.mu_u.sum() * co.cap_u)

    def max_violation(self, scenario: Scenario, rates: ChannelRealization, p, no_local: bool = False) -> float:
        """Largest violation over all dual-feasibility rows and sign constraints."""
        co = Coefficients.of(scenario, rates, UNIT_BITS)
        p = np.asarray(p, dtype=float)
        cap_b, cap_s = co.cap_b, co.cap_s
        v = [0.0]
        v.append(np.max(-(p[:, None] - self.lam_tilde - self.lam_hat), initial=0.0))
        v.append(np.max(-(self.lam_t[None, :] - cap_b[:, None] * self.mu_b.sum(axis=1)), initial=0.0))
        v.append(np.max(-(self.lam_t[None, :] - cap_s[:, None] * self.mu_s.sum(axis=1)), initial=0.0))
        if not no_local:
            v.append(np.max(-(co.local * self.lam_tilde + self.nu + self.mu_u), initial=0.0))
        rb = (co.lat_bs[:, None, :] * self.lam_hat[None] + co.en_bs[:, None, :] * self.lam_k[None, :, None]
              + self.mu_b + self.nu[None])
        v.append(np.max(np.where(co.ok_bs[:, None, :], -rb, 0.0), initial=0.0))
        rs = (co.lat_sat[:, None, :] * self.lam_hat[None] + co.en_sat[:, None, :] * self.lam_k[None, :, None]
              + self.mu_s + self.nu[None])
        v.append(np.max(np.where(co.ok_sat[:, None, :], -rs, 0.0), initial=0.0))
        for arr in (self.lam_tilde, self.lam_hat, self.lam_k, self.mu_u, self.mu_b, self.mu_s):
            v.append(np.max(-arr, initial=0.0))
        return float(max(v))


def _build_dual(
    scenario: Scenario,
    rates: ChannelRealization,
    support: SupportSet,
    p_fixed: np.ndarray | None = None,
    amb: AmbiguitySet | None = None,
    no_local: bool = False,
) -> tuple[LinearProgram, DualIndex]:
    co = Coefficients.of(scenario, rates, UNIT_BITS)
    xi = support.array / UNIT_BITS
    K, T, N, M = support.K, scenario.T, scenario.N, scenario.M
    cap_u, cap_b, cap_s = co.cap_u, co.cap_b, co.cap_s

    bld = LpBuilder("max")
    if p_fixed is None:
        p = np.array([bld.add_var(f"p[{k}]") for k in range(K)], dtype=int)
    else:
        p = np.array([bld.add_var(f"p[{k}]", float(p_fixed[k]), float(p_fixed[k])) for k in range(K)], dtype=int)
    lam_t = np.array([bld.add_var(f"lam[{t}]", -np.inf, np.inf, cost=-1.0) for t in range(T)], dtype=int)

    def grid(name, shape, lo=0.0, cost=None):
        out = np.zeros(shape, dtype=int)
        for ix in np.ndindex(*shape):
            c = 0.0 if cost is None else cost(ix)
            out[ix] = bld.add_var(f"{name}{list(ix)}", lo, np.inf, c)
        return out

    lam_tilde = grid("lam_tilde", (K, T))
    lam_hat = grid("lam_hat", (K, T))
    lam_k = grid("lam_k", (K,), cost=lambda ix: co.e_fly - co.e_max)
    mu_u = grid("mu_u", (K, T), cost=lambda ix: -cap_u)
    mu_b = grid("mu_b", (N, K, T))
    mu_s = grid("mu_s", (M, K, T))
    nu = grid("nu", (K, T), lo=-np.inf, cost=lambda ix: -xi[ix[0]])
    idx = DualIndex(p, lam_t, lam_tilde, lam_hat, lam_k, mu_u, mu_b, mu_s, nu)

    if p_fixed is None:
        bld.add_row({int(j): 1.0 for j in p}, EQ, 1.0, tag="simplex")
        if amb is not None:
            idx.aux = membership_constraints(amb).add_to(bld, [int(j) for j in p])
    for k in range(K):
        for t in range(T):
            bld.add_row({int(p[k]): 1.0, int(lam_tilde[k, t]): -1.0, int(lam_hat[k, t]): -1.0}, GE, 0.0, tag="27a")
    for b in range(N):
        for t in range(T):
            row = {int(lam_t[t]): 1.0}
            row.update({int(mu_b[b, k, t]): -cap_b[b] for k in range(K)})
            bld.add_row(row, GE, 0.0, tag="27b")
    for s in range(M):
        for t in range(T):
            row = {int(lam_t[t]): 1.0}
            row.update({int(mu_s[s, k, t]): -cap_s[s] for k in range(K)})
            bld.add_row(row, GE, 0.0, tag="27c")
    if not no_local:
        for k in range(K):
            for t in range(T):
                bld.add_row({int(lam_tilde[k, t]): co.local, int(nu[k, t]): 1.0, int(mu_u[k, t]): 1.0},
                            GE, 0.0, tag="27d")
    for b in range(N):
        for k in range(K):
            for t in range(T):
                if co.ok_bs[b, t]:
                    bld.add_row({int(lam_hat[k, t]): co.lat_bs[b, t], int(lam_k[k]): co.en_bs[b, t],
                                 int(mu_b[b, k, t]): 1.0, int(nu[k, t]): 1.0}, GE, 0.0, tag="27e")
    for s in range(M):
        for k in range(K):
            for t in range(T):
                if co.ok_sat[s, t]:
                    bld.add_row({int(lam_hat[k, t]): co.lat_sat[s, t], int(lam_k[k]): co.en_sat[s, t],
                                 int(mu_s[s, k, t]): 1.0, int(nu[k, t]): 1.0}, GE, 0.0, tag="27f")
    return bld.build(), idx


def build_dual_lp(scenario, rates, P, support, no_local: bool = False):
    """Hand-derived dual of the relaxed inner problem at a fixed distribution."""
    p = P.array if isinstance(P, DiscreteDistribution) else np.asarray(P, dtype=float)
    return _build_dual(scenario, rates, support, p_fixed=p, no_local=no_local)


def build_outer_lp(scenario, rates, amb: AmbiguitySet, no_local: bool = False):
    """Joint maximisation over the distribution and the inner dual variables."""
    return _build_dual(scenario, rates, amb.support, amb=amb, no_local=no_local)


def certificate_from(sol: LpSolution, idx: DualIndex) -> DualCertificate:
    x = sol.x
    return DualCertificate(
        lam_t=x[idx.lam_t], nu=x[idx.nu], lam_tilde=x[idx.lam_tilde], lam_hat=x[idx.lam_hat],
        lam_k=x[idx.lam_k], mu_u=x[idx.mu_u], mu_b=x[idx.mu_b], mu_s=x[idx.mu_s],
    )


def dual_certificate(scenario, rates, P, support, no_local: bool = False) -> tuple[DualCertificate, float]:
    lp, idx = build_dual_lp(scenario, rates, P, support, no_local)
    sol = solve_lp(lp)
    if not sol.ok:
        raise InfeasibleScenario(f"dual LP status {sol.status.value}")
    return certificate_from(sol, idx), sol.objective


def check_capacity(scenario: Scenario, support: SupportSet, no_local: bool = False) -> None:
    local = 0.0 if no_local else scenario.cap_uav
    best = max(np.concatenate([scenario.cap_bs, scenario.cap_sat]), default=0.0)
    worst = support.array[-1]
    if worst > local + best + 1e-9 * max(1.0, worst):
        raise InfeasibleScenario(
            f"task volume {worst:.6g} bits exceeds UAV + largest server capacity {local + best:.6g} bits")


def worst_case_distribution(scenario, rates, amb: AmbiguitySet, no_local: bool = False):
    """Solve the joint outer LP; return the maximising distribution and value."""
    check_capacity(scenario, amb.support, no_local)
    lp, idx = build_outer_lp(scenario, rates, amb, no_local)
    sol = solve_lp(lp)
    if sol.status is LpStatus.UNBOUNDED:
        raise InfeasibleScenario("inner problem infeasible for some distribution in the ambiguity set")
    if not sol.ok:
        raise RuntimeError(f"outer LP failed: {sol.status.value}")
    P = DiscreteDistribution.from_lp(sol.x[idx.p])
    d = distance(amb.metric, P, amb.reference, amb.support)
    assert d <= amb.theta + 1e-7, f"worst case lies {d - amb.theta:.3g} outside the ball"
    return P, sol.objective


@dataclass
class OffloadPlan:
    x_bs: np.ndarray     # (N, T) binary
    x_sat: np.ndarray    # (M, T)
    y_uav: np.ndarray    # (K, T) bits
    y_bs: np.ndarray     # (N, K, T)
    y_sat: np.ndarray    # (M, K, T)
    support: SupportSet
    worst_case_p: DiscreteDistribution
    expected_latency_s: float
    energy_j: float
    relaxed: bool = False
    relaxed_objective: float = float("nan")
    worst_case_objective: float = float("nan")
    branch_iterations: int = 0
    latency_kt: np.ndarray | None = None  # (K, T) per-slot latency of each support point

    def server_choice(self) -> list[tuple[str, int]]:
        """(kind, index) of the selected server in each slot."""
        out = []
        for t in range(self.x_bs.shape[1] if self.x_bs.size else self.x_sat.shape[1]):
            if self.x_bs.size and self.x_bs[:, t].max() > 0.5:
                out.append(("bs", int(np.argmax(self.x_bs[:, t]))))
            else:
                out.append(("sat", int(np.argmax(self.x_sat[:, t]))))
        return out

    def to_dict(self) -> dict:
        return {
            "x_bs": self.x_bs.tolist(),
            "x_sat": self.x_sat.tolist(),
            "y_uav": self.y_uav.tolist(),
            "y_bs": self.y_bs.tolist(),
            "y_sat": self.y_sat.tolist(),
            "worst_case_p": list(self.worst_case_p.probs),
            "expected_latency_s": self.expected_latency_s,
            "energy_j": self.energy_j,
            "support": list(self.support.points),
            "relaxed": self.relaxed,
            "relaxed_objective": self.relaxed_objective,
            "worst_case_objective": self.worst_case_objective,
            "branch_iterations": self.branch_iterations,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_dict(cls, d: dict) -> "OffloadPlan":
        arr = lambda key: np.array(d[key], dtype=float)
        x_bs, x_sat = arr("x_bs"), arr("x_sat")
        y_uav = arr("y_uav")
        K, T = y_uav.shape
        return cls(
            x_bs=x_bs.reshape(-1, T), x_sat=x_sat.reshape(-1, T), y_uav=y_uav,
            y_bs=arr("y_bs").reshape(-1, K, T), y_sat=arr("y_sat").reshape(-1, K, T),
            support=SupportSet(tuple(d["support"])),
            worst_case_p=DiscreteDistribution(tuple(d["worst_case_p"])),
            expected_latency_s=d["expected_latency_s"], energy_j=d["energy_j"],
            relaxed=d.get("relaxed", False), relaxed_objective=d.get("relaxed_objective", float("nan")),
            worst_case_objective=d.get("worst_case_objective", float("nan")),
            branch_iterations=d.get("branch_iterations", 0),
        )


def _x_values(sol: LpSolution, idx: InnerIndex) -> dict:
    return {key: float(sol.x[idx.x_col(key)]) for key in idx.x_keys()}


def select_branch_variable(xvals: dict, tol: float = INT_TOL):
    """Most fractional access variable (largest min(x, 1 - x)); None if integral."""
    best_key, best = None, tol
    for key, v in xvals.items():
        frac = min(1.0 - v, v)
        # values within round-off count as ties and keep the earlier key
        if frac > best + 1e-12:
            best_key, best = key, frac
    return best_key


def _solve_inner(scenario, rates, P, support, fixed, no_local):
    lp, idx = build_inner_lp(scenario, rates, P, support, fixed, no_local)
    return solve_lp(lp), idx


@dataclass
class DiveResult:
    fixed: dict
    solution: LpSolution
    index: InnerIndex
    relaxed_objective: float
    iterations: int


def dive(scenario, rates, P, support, no_local: bool = False) -> DiveResult:
    """Branching dive: fix the most fractional x to its cheaper child, never backtrack."""
    sol, idx = _solve_inner(scenario, rates, P, support, {}, no_local)
    if not sol.ok:
        raise InfeasibleScenario(f"relaxed inner problem: {sol.status.value}")
    relaxed = sol.objective
    fixed: dict = {}
    iterations = 0
    while True:
        key = select_branch_variable(_x_values(sol, idx))
        if key is None:
            break
        iterations += 1
        s0, _ = _solve_inner(scenario, rates, P, support, {**fixed, key: 0}, no_local)
        s1, _ = _solve_inner(scenario, rates, P, support, {**fixed, key: 1}, no_local)
        lat0 = s0.objective if s0.ok else np.inf
        lat1 = s1.objective if s1.ok else np.inf
        log.debug("branch %s: Lat0=%.6g Lat1=%.6g", key, lat0, lat1)
        if np.isinf(lat0) and np.isinf(lat1):
            raise InfeasibleScenario(f"both children infeasible at {key}")
        if lat0 < lat1:
            fixed[key], sol = 0, s0
        else:
            fixed[key], sol = 1, s1
    return DiveResult(fixed, sol, idx, relaxed, iterations)


def _plan_from_x(scenario, rates, P, support, xvals: dict, no_local: bool):
    """Per-support-point allocations for a fixed integral X.

    With X fixed the problem separates over support points, so every point
    gets its own latency-optimal allocation (also those with zero mass).
    """
    fixed = {key: int(round(v)) for key, v in xvals.items()}
    K = support.K
    lp, idx = build_inner_lp(scenario, rates, np.ones(K), support, fixed, no_local)
    sol = solve_lp(lp)
    if not sol.ok:
        raise InfeasibleScenario(f"allocation LP for the integral plan: {sol.status.value}")
    x = sol.x * UNIT_BITS
    co = Coefficients.of(scenario, rates)
    N, M, T = scenario.N, scenario.M, scenario.T
    x_bs = np.array([[fixed[("b", b, t)] for t in range(T)] for b in range(N)], dtype=float).reshape(N, T)
    x_sat = np.array([[fixed[("s", s, t)] for t in range(T)] for s in range(M)], dtype=float).reshape(M, T)
    y_uav = np.maximum(x[idx.yu], 0.0)
    y_bs = np.maximum(x[idx.yb], 0.0)
    y_sat = np.maximum(x[idx.ys], 0.0)
    lat = np.maximum(co.local * y_uav,
                     np.einsum("bt,bkt->kt", co.lat_bs, y_bs) + np.einsum("st,skt->kt", co.lat_sat, y_sat))
    trans = np.einsum("bt,bkt->k", co.en_bs, y_bs) + np.einsum("st,skt->k", co.en_sat, y_sat)
    p = P.array if isinstance(P, DiscreteDistribution) else np.asarray(P)
    return dict(x_bs=x_bs, x_sat=x_sat, y_uav=y_uav, y_bs=y_bs, y_sat=y_sat,
                expected_latency_s=float(p @ lat.sum(axis=1)),
                energy_j=float(co.e_fly + trans.max(initial=0.0)), latency_kt=lat)


def branch_and_bound(scenario, rates, P, support, no_local: bool = False) -> OffloadPlan:
    """Integral plan for a fixed distribution via the greedy branching dive."""
    check_capacity(scenario, support, no_local)
    res = dive(scenario, rates, P, support, no_local)
    fields_ = _plan_from_x(scenario, rates, P, support, _x_values(res.solution, res.index), no_local)
    P = P if isinstance(P, DiscreteDistribution) else DiscreteDistribution(tuple(P))
    return OffloadPlan(support=support, worst_case_p=P, relaxed_objective=res.relaxed_objective,
                       branch_iterations=res.iterations, **fields_)


def enumerate_best(scenario, rates, P, support, no_local: bool = False) -> tuple[float, dict]:
    """Exhaustive search over per-slot server choices; oracle for small instances."""
    servers = [("b", b) for b in range(scenario.N)] + [("s", s) for s in range(scenario.M)]
    best, best_fixed = np.inf, None
    for combo in itertools.product(servers, repeat=scenario.T):
        fixed = {(kind, i, t): 0 for kind, i in servers for t in range(scenario.T)}
        for t, (kind, i) in enumerate(combo):
            fixed[kind, i, t] = 1
        sol, _ = _solve_inner(scenario, rates, P, support, fixed, no_local)
        if sol.ok and sol.objective < best:
            best, best_fixed = sol.objective, fixed
    return best, best_fixed


def solve_dro(scenario, rates, amb: AmbiguitySet, no_local: bool = False) -> OffloadPlan:
    """Worst-case distribution from the outer LP, then an integral plan against it."""
    P, outer = worst_case_distribution(scenario, rates, amb, no_local)
    plan = branch_and_bound(scenario, rates, P, amb.support, no_local)
    plan.worst_case_objective = outer
    return plan


@dataclass(frozen=True)
class Evaluation:
    latency_s: float
    energy_j: float
    drops: int
    slot_latency_s: tuple[float, ...] = ()


def _allocation_for(plan: OffloadPlan, volume: float, t: int, snap: bool):
    pts = plan.support.array
    k = int(plan.support.snap([volume])[0])
    if np.isclose(pts[k], volume, rtol=1e-9, atol=1e-6):
        return plan.y_uav[k, t], plan.y_bs[:, k, t], plan.y_sat[:, k, t], 0.0
    if not snap:
        raise ValueError(f"realized volume {volume} is not a support point of the plan")
    # Open-loop execution of the nearest planned allocation: the UAV keeps its
    # planned local share, the selected server takes the rest up to capacity.
    local = min(plan.y_uav[k, t], volume)
    rest = volume - local
    y_bs = np.zeros_like(plan.y_bs[:, k, t])
    y_sat = np.zeros_like(plan.y_sat[:, k, t])
    planned = np.concatenate([plan.y_bs[:, k, t], plan.y_sat[:, k, t]])
    xs = np.concatenate([plan.x_bs[:, t], plan.x_sat[:, t]])
    weights = planned if planned.sum() > 0 else xs
    if weights.sum() > 0:
        share = rest * weights / weights.sum()
        y_bs[:] = share[: y_bs.size]
        y_sat[:] = share[y_bs.size:]
        rest = 0.0
    return local, y_bs, y_sat, rest


def evaluate_plan(plan: OffloadPlan, realized, scenario: Scenario, rates: ChannelRealization,
                  snap: bool = True) -> Evaluation:
    """Latency and energy of running `plan` when `realized[t]` bits arrive in slot t.

    Anything beyond the capacity of the UAV or the selected server is dropped,
    and each slot with a drop is charged the retransmission penalty.
    """
    realized = np.asarray(realized, dtype=float)
    T = scenario.T
    if realized.size != T:
        raise ValueError(f"need {T} realized volumes, got {realized.size}")
    co = Coefficients.of(scenario, rates)
    cap_b = scenario.cap_bs * plan.x_bs.T  # (T, N)
    cap_s = scenario.cap_sat * plan.x_sat.T
    total_lat, energy, drops = 0.0, co.e_fly, 0
    slots = []
    for t in range(T):
        y_u, y_b, y_s, dropped = _allocation_for(plan, realized[t], t, snap)
        dropped += max(y_u - scenario.cap_uav, 0.0)
        y_u = min(y_u, scenario.cap_uav)
        over_b = np.maximum(y_b - cap_b[t], 0.0)
        over_s = np.maximum(y_s - cap_s[t], 0.0)
        dropped += over_b.sum() + over_s.sum()
        y_b = y_b - over_b
        y_s = y_s - over_s
        lat = max(co.local * y_u, float(co.lat_bs[:, t] @ y_b + co.lat_sat[:, t] @ y_s))
        if dropped > 1e-6 * max(1.0, realized[t]):
            lat += scenario.retransmission_penalty_s
            drops += 1
        energy += float(co.en_bs[:, t] @ y_b + co.en_sat[:, t] @ y_s)
        total_lat += lat
        slots.append(lat)
    return Evaluation(total_lat, energy, drops, tuple(slots))
