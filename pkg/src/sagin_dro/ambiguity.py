"""Discrete support, empirical reference distribution and metric balls around it.

Kantorovich distances use the ground metric |xi_x - xi_y| measured in units
of the support's mean spacing (range / (K - 1)). The tolerance closed form
for that metric is dimensionless and assumes a support whose range is at
most K, which is exactly what this normalisation provides.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from .lp import LE, GE, LinearProgram, LpBuilder, LpStatus, solve_lp

log = logging.getLogger(__name__)

THETA_FLOOR = 1e-12


class Metric(str, enum.Enum):
    L1 = "l1"
    LINF = "linf"
    KANTOROVICH = "kantorovich"

    @classmethod
    def parse(cls, s: "str | Metric") -> "Metric":
        if isinstance(s, Metric):
            return s
        key = s.strip().lower().replace("-", "").replace("_", "")
        aliases = {"l1": cls.L1, "linf": cls.LINF, "linfinity": cls.LINF, "kantorovich": cls.KANTOROVICH,
                   "kan": cls.KANTOROVICH, "wasserstein": cls.KANTOROVICH}
        if key not in aliases:
            raise ValueError(f"unknown metric {s!r}")
        return aliases[key]


@dataclass(frozen=True)
class SupportSet:
    points: tuple[float, ...]

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.size < 1:
            raise ValueError("support must contain at least one point")
        if np.any(pts < 0):
            raise ValueError("support points must be non-negative")
        if np.any(np.diff(pts) <= 0):
            raise ValueError("support points must be strictly increasing")
        object.__setattr__(self, "points", tuple(float(p) for p in pts))

    @property
    def K(self) -> int:
        return len(self.points)

    @property
    def array(self) -> np.ndarray:
        return np.array(self.points)

    def ground_distance(self) -> np.ndarray:
        pts = self.array
        if self.K == 1:
            return np.zeros((1, 1))
        unit = (pts[-1] - pts[0]) / (self.K - 1)
        return np.abs(pts[:, None] - pts[None, :]) / unit

    def snap(self, values) -> np.ndarray:
        """Index of the nearest support point for each value (ties go low)."""
        v = np.asarray(values, dtype=float)
        pts = self.array
        idx = np.searchsorted(pts, v)
        idx = np.clip(idx, 1, max(self.K - 1, 1)) if self.K > 1 else np.zeros_like(idx)
        if self.K > 1:
            left = pts[idx - 1]
            right = pts[idx]
            idx = np.where(np.abs(v - left) <= np.abs(right - v), idx - 1, idx)
        return idx.astype(int)

    def scaled(self, factor: float) -> "SupportSet":
        return SupportSet(tuple(p * factor for p in self.points))


@dataclass(frozen=True)
class DiscreteDistribution:
    probs: tuple[float, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if np.any(p < 0):
            raise ValueError("probabilities must be non-negative")
        if abs(p.sum() - 1.0) > 1e-9:
            raise ValueError(f"probabilities sum to {p.sum()!r}, not 1")
        object.__setattr__(self, "probs", tuple(float(x) for x in p))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.probs)

    @property
    def K(self) -> int:
        return len(self.probs)

    @classmethod
    def from_lp(cls, p, tol: float = 1e-9) -> "DiscreteDistribution":
        """Clean tiny negative round-off from an LP solution and renormalise."""
        p = np.asarray(p, dtype=float)
        if np.any(p < -tol):
            raise ValueError(f"negative probability {p.min()} beyond tolerance")
        p = np.maximum(p, 0.0)
        return cls(tuple(p / p.sum()))


def empirical_distribution(samples, support: SupportSet) -> DiscreteDistribution:
    """Relative frequency of each support point among `samples`."""
    s = np.asarray(samples, dtype=float)
    if s.size == 0:
        raise ValueError("no samples")
    pts = support.array
    idx = support.snap(s)
    if not np.allclose(pts[idx], s, rtol=1e-12, atol=1e-9):
        bad = s[~np.isclose(pts[idx], s, rtol=1e-12, atol=1e-9)][0]
        raise ValueError(f"sample {bad} is not a support point; quantize first")
    counts = np.bincount(idx, minlength=support.K)
    return DiscreteDistribution(tuple(counts / s.size))


def tolerance(metric: "Metric | str", K: int, history_size: int, beta: float) -> float:
    """Ball radius that holds the true distribution with confidence `beta`."""
    metric = Metric.parse(metric)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"confidence must lie in (0, 1), got {beta}")
    if K < 1 or history_size < 1:
        raise ValueError("K and history_size must be >= 1")
    if metric is Metric.L1:
        theta = K / (2.0 * history_size) * math.log(2.0 * K / (1.0 - beta))
    elif metric is Metric.LINF:
        theta = 1.0 / (2.0 * history_size) * math.log(2.0 * K / (1.0 - beta))
    else:
        theta = K * math.sqrt(2.0 / history_size * math.log(1.0 / (1.0 - beta)))
    return 0.0 if theta < THETA_FLOOR else theta


def _kantorovich_lp(diff: np.ndarray, support: SupportSet) -> LinearProgram:
    """min sum_l u_l b_l  s.t.  sum_l u_l a_lk >= diff_k, u >= 0."""
    K = support.K
    rho = support.ground_distance()
    bld = LpBuilder("min")
    cols = {}
    for x in range(K):
        for y in range(K):
            if x != y:
                cols[x, y] = bld.add_var(f"u[{x},{y}]", cost=rho[x, y])
    for k in range(K):
        coefs = {}
        for (x, y), j in cols.items():
            if x == k:
                coefs[j] = 1.0
            elif y == k:
                coefs[j] = -1.0
        bld.add_row(coefs, GE, float(diff[k]))
    return bld.build()


def distance(metric: "Metric | str", P: DiscreteDistribution, P0: DiscreteDistribution,
             support: SupportSet) -> float:
    metric = Metric.parse(metric)
    if P.K != P0.K or P.K != support.K:
        raise ValueError("distributions and support must share one length")
    diff = P.array - P0.array
    if metric is Metric.L1:
        return float(np.abs(diff).sum())
    if metric is Metric.LINF:
        return float(np.abs(diff).max())
    if support.K == 1:
        return 0.0
    sol = solve_lp(_kantorovich_lp(diff, support))
    if not sol.ok:
        raise RuntimeError(f"Kantorovich LP failed: {sol.status}")
    return max(sol.objective, 0.0)


@dataclass(frozen=True)
class AmbiguitySet:
    metric: Metric
    theta: float
    reference: DiscreteDistribution
    support: SupportSet
    confidence: float | None = None
    history_size: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "metric", Metric.parse(self.metric))
        if self.theta < 0:
            raise ValueError("theta must be >= 0")
        if self.reference.K != self.support.K:
            raise ValueError("reference and support lengths differ")

    @classmethod
    def calibrated(cls, metric, support: SupportSet, samples, beta: float) -> "AmbiguitySet":
        ref = empirical_distribution(samples, support)
        n = len(samples)
        return cls(Metric.parse(metric), tolerance(metric, support.K, n, beta), ref, support, beta, n)

    def contains(self, P: DiscreteDistribution, tol: float = 1e-9) -> bool:
        return distance(self.metric, P, self.reference, self.support) <= self.theta + tol


@dataclass
class MembershipEncoding:
    """Linear rows over (p_1..p_K, aux_1..aux_n) describing P in the ball.

    Auxiliary variables are all non-negative. Probability simplex rows are
    not included.
    """

    K: int
    aux_var_count: int
    aux_names: list[str]
    rows: list[tuple[np.ndarray, str, float]]

    def add_to(self, bld: LpBuilder, p_vars: list[int], prefix: str = "") -> list[int]:
        aux = [bld.add_var(prefix + n) for n in self.aux_names]
        cols = list(p_vars) + aux
        for coefs, rel, rhs in self.rows:
            bld.add_row({cols[j]: v for j, v in enumerate(coefs) if v != 0.0}, rel, rhs, tag="metric")
        return aux

    def feasible(self, p) -> bool:
        """Is there a non-negative aux vector satisfying every row at this p?"""
        p = np.asarray(p, dtype=float)
        bld = LpBuilder("min")
        p_vars = [bld.add_var(f"p{k}", lo=p[k], hi=p[k]) for k in range(self.K)]
        self.add_to(bld, p_vars)
        return solve_lp(bld.build()).status is LpStatus.OPTIMAL


def membership_constraints(amb: AmbiguitySet) -> MembershipEncoding:
    K = amb.support.K
    p0 = amb.reference.array
    theta = amb.theta
    rows = []
    if amb.metric is Metric.L1:
        n = K
        for k in range(K):
            up = np.zeros(K + n); up[k] = 1.0; up[K + k] = -1.0
            rows.append((up, LE, p0[k]))
            dn = np.zeros(K + n); dn[k] = -1.0; dn[K + k] = -1.0
            rows.append((dn, LE, -p0[k]))
        budget = np.zeros(K + n); budget[K:] = 1.0
        rows.append((budget, LE, theta))
        return MembershipEncoding(K, n, [f"s[{k}]" for k in range(K)], rows)
    if amb.metric is Metric.LINF:
        for k in range(K):
            e = np.zeros(K); e[k] = 1.0
            rows.append((e, LE, p0[k] + theta))
            rows.append((-e, LE, theta - p0[k]))
        return MembershipEncoding(K, 0, [], rows)

    rho = amb.support.ground_distance()
    pairs = [(x, y) for x in range(K) for y in range(K) if x != y]
    L = len(pairs)
    budget = np.zeros(K + L)
    for l, (x, y) in enumerate(pairs):
        budget[K + l] = rho[x, y]
    rows.append((budget, LE, theta))
    for k in range(K):
        coefs = np.zeros(K + L)
        coefs[k] = -1.0
        for l, (x, y) in enumerate(pairs):
            if x == k:
                coefs[K + l] = 1.0
            elif y == k:
                coefs[K + l] = -1.0
        # sum_l u_l a_lk - p_k >= -p0_k
        rows.append((coefs, GE, -p0[k]))
    return MembershipEncoding(K, L, [f"u[{x},{y}]" for x, y in pairs], rows)


def quantize_trace(values, K: int) -> tuple[SupportSet, np.ndarray]:
    """Map task volumes onto at most K support points.

    With more than K distinct values the support is the K equal-width bin
    centres over [min, max]; otherwise the distinct values themselves, which
    makes re-quantising a quantised trace a no-op.
    """
    v = np.asarray(values, dtype=float)
    if v.size == 0:
        raise ValueError("no values to quantize")
    if K < 1:
        raise ValueError("K must be >= 1")
    distinct = np.unique(v)
    if distinct.size <= K:
        if distinct.size < K:
            log.warning("only %d distinct values; support shrinks from K=%d", distinct.size, K)
        support = SupportSet(tuple(distinct))
    else:
        lo, hi = v.min(), v.max()
        width = (hi - lo) / K
        support = SupportSet(tuple(lo + width * (i + 0.5) for i in range(K)))
    return support, support.array[support.snap(v)]
