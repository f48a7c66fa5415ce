"""Dense two-phase simplex with primal/dual extraction.

Problems handled here are small (a few hundred rows), so the tableau is kept
dense in a single numpy array. Rows and columns are equilibrated by powers of
two before solving; the returned primal and dual vectors are in the caller's
original units.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-7
CLEAN_TOL = 1e-12
_CLEANUP_ROUNDS = 3
MAX_ITER = 50_000
_REFRESH_EVERY = 64
_BLAND_AFTER = 50

LE, EQ, GE = "<=", "=", ">="
_REL_ALIASES = {"<=": LE, "le": LE, "=": EQ, "==": EQ, "eq": EQ, ">=": GE, "ge": GE}


class LpStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"
    NUMERICAL = "NumericalFailure"
    ITERATION_LIMIT = "IterationLimit"


@dataclass
class LinearProgram:
    """``sense c.x`` subject to ``A[i].x rel[i] b[i]`` and ``lo <= x <= hi``."""

    c: np.ndarray
    A: np.ndarray
    rel: list[str]
    b: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    sense: str = "min"
    names: list[str] | None = None

    def __post_init__(self):
        self.c = np.asarray(self.c, dtype=float).ravel()
        n = self.c.size
        self.A = np.asarray(self.A, dtype=float).reshape(-1, n)
        self.b = np.asarray(self.b, dtype=float).ravel()
        self.lo = np.asarray(self.lo, dtype=float).ravel()
        self.hi = np.asarray(self.hi, dtype=float).ravel()
        self.rel = [_REL_ALIASES[r] for r in self.rel]
        m = self.A.shape[0]
        if self.b.size != m or len(self.rel) != m:
            raise ValueError(f"row count mismatch: A has {m} rows, b {self.b.size}, rel {len(self.rel)}")
        if self.lo.size != n or self.hi.size != n:
            raise ValueError("bounds must have one entry per variable")
        if self.sense not in ("min", "max"):
            raise ValueError(f"sense must be 'min' or 'max', got {self.sense!r}")
        if not np.all(np.isfinite(self.b)):
            raise ValueError("right-hand sides must be finite")
        if np.any(self.lo > self.hi):
            raise ValueError("lower bound above upper bound")

    @property
    def n_vars(self) -> int:
        return self.c.size

    @property
    def n_rows(self) -> int:
        return self.A.shape[0]

    def to_text(self) -> str:
        """One constraint per line; meant for diffing against other solvers."""
        names = self.names or [f"x{j}" for j in range(self.n_vars)]

        def expr(coefs):
            terms = [f"{v:+.12g} {names[j]}" for j, v in enumerate(coefs) if v != 0.0]
            return " ".join(terms) if terms else "0"

        lines = [f"{self.sense} {expr(self.c)}"]
        for i in range(self.n_rows):
            lines.append(f"r{i}: {expr(self.A[i])} {self.rel[i]} {self.b[i]:.12g}")
        for j in range(self.n_vars):
            lines.append(f"bound {self.lo[j]:.12g} <= {names[j]} <= {self.hi[j]:.12g}")
        return "\n".join(lines)


class LpBuilder:
    """Incremental construction of a LinearProgram by named variables."""

    def __init__(self, sense: str = "min"):
        self.sense = sense
        self._c: list[float] = []
        self._lo: list[float] = []
        self._hi: list[float] = []
        self.names: list[str] = []
        self._rows: list[dict[int, float]] = []
        self._rel: list[str] = []
        self._rhs: list[float] = []
        self.row_tags: list[str] = []

    def add_var(self, name: str, lo: float = 0.0, hi: float = np.inf, cost: float = 0.0) -> int:
        self.names.append(name)
        self._c.append(cost)
        self._lo.append(lo)
        self._hi.append(hi)
        return len(self.names) - 1

    def add_row(self, coefs: dict[int, float], rel: str, rhs: float, tag: str = "") -> int:
        self._rows.append(coefs)
        self._rel.append(rel)
        self._rhs.append(rhs)
        self.row_tags.append(tag)
        return len(self._rows) - 1

    def set_cost(self, j: int, cost: float) -> None:
        self._c[j] = cost

    def build(self) -> LinearProgram:
        n = len(self._c)
        A = np.zeros((len(self._rows), n))
        for i, row in enumerate(self._rows):
            for j, v in row.items():
                A[i, j] += v
        return LinearProgram(
            c=np.array(self._c), A=A, rel=list(self._rel), b=np.array(self._rhs),
            lo=np.array(self._lo), hi=np.array(self._hi), sense=self.sense, names=list(self.names),
        )


@dataclass
class LpSolution:
    status: LpStatus
    objective: float = float("nan")
    x: np.ndarray | None = None
    # d(objective)/d(b_i) for each user row, in the problem's own sense
    duals: np.ndarray | None = None
    # c - A^T y; nonzero only on variables resting at a bound
    reduced_costs: np.ndarray | None = None
    iterations: int = 0
    message: str = ""
    basis: list[int] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def primal_residual(lp: LinearProgram, x: np.ndarray) -> float:
    """Largest violation of any row or bound at x."""
    ax = lp.A @ x
    viol = [0.0]
    for i, r in enumerate(lp.rel):
        d = ax[i] - lp.b[i]
        scale = 1.0 + abs(lp.b[i])
        if r == LE:
            viol.append(max(d, 0.0) / scale)
        elif r == GE:
            viol.append(max(-d, 0.0) / scale)
        else:
            viol.append(abs(d) / scale)
    viol.append(float(np.max(np.maximum(lp.lo - x, 0.0), initial=0.0)))
    viol.append(float(np.max(np.maximum(x - lp.hi, 0.0), initial=0.0)))
    return float(max(viol))


def duality_gap(lp: LinearProgram, sol: LpSolution) -> float:
    """Relative gap between c.x and b.y plus bound terms."""
    bound_term = 0.0
    for j, r in enumerate(sol.reduced_costs):
        if r == 0.0:
            continue
        # a reduced cost only pays on the bound the variable is sitting at
        at_lo = np.isfinite(lp.lo[j]) and abs(sol.x[j] - lp.lo[j]) <= abs(sol.x[j] - lp.hi[j])
        bound_term += r * (lp.lo[j] if at_lo else lp.hi[j])
    dual_obj = float(lp.b @ sol.duals) + bound_term
    return abs(sol.objective - dual_obj) / max(1.0, abs(sol.objective))


def complementary_slackness(lp: LinearProgram, sol: LpSolution) -> float:
    slack = lp.A @ sol.x - lp.b
    row_cs = np.abs(slack * sol.duals)
    dist = np.minimum(np.abs(sol.x - lp.lo), np.abs(sol.x - lp.hi))
    col_cs = np.abs(sol.reduced_costs) * np.where(np.isfinite(dist), dist, np.abs(sol.x))
    scale = max(1.0, abs(sol.objective))
    return float(max(np.max(row_cs, initial=0.0), np.max(col_cs, initial=0.0)) / scale)


def _pow2(v: np.ndarray) -> np.ndarray:
    return np.exp2(np.round(np.log2(v)))


def _equilibrate(A: np.ndarray, passes: int = 6) -> tuple[np.ndarray, np.ndarray]:
    """Geometric-mean row/column scaling, rounded to powers of two."""
    m, n = A.shape
    r = np.ones(m)
    s = np.ones(n)
    mag = np.abs(A)
    nz = mag > 0
    if not nz.any():
        return r, s
    for _ in range(passes):
        S = mag * r[:, None] * s[None, :]
        with np.errstate(divide="ignore"):
            logS = np.where(nz, np.log2(np.where(nz, S, 1.0)), 0.0)
        cnt = nz.sum(axis=1)
        row_mean = np.where(cnt > 0, logS.sum(axis=1) / np.maximum(cnt, 1), 0.0)
        r = r * np.exp2(-np.round(row_mean))
        S = mag * r[:, None] * s[None, :]
        with np.errstate(divide="ignore"):
            logS = np.where(nz, np.log2(np.where(nz, S, 1.0)), 0.0)
        cnt = nz.sum(axis=0)
        col_mean = np.where(cnt > 0, logS.sum(axis=0) / np.maximum(cnt, 1), 0.0)
        s = s * np.exp2(-np.round(col_mean))
    return _pow2(r), _pow2(s)


class _Standardized:
    """min c.z s.t. A z = b, z >= 0, b >= 0, plus the map back to user space."""

    def __init__(self, lp: LinearProgram):
        n = lp.n_vars
        sign = 1.0 if lp.sense == "min" else -1.0
        c_user = sign * lp.c

        # user x = offset + M z_struct
        cols: list[tuple[int, float]] = []
        offset = np.zeros(n)
        bound_rows: list[tuple[int, float]] = []
        for j in range(n):
            lo, hi = lp.lo[j], lp.hi[j]
            if np.isfinite(lo):
                offset[j] = lo
                cols.append((j, 1.0))
                if np.isfinite(hi):
                    bound_rows.append((len(cols) - 1, hi - lo))
            elif np.isfinite(hi):
                offset[j] = hi
                cols.append((j, -1.0))
            else:
                cols.append((j, 1.0))
                cols.append((j, -1.0))
        ns = len(cols)
        M = np.zeros((n, ns))
        for k, (j, v) in enumerate(cols):
            M[j, k] = v

        A_rows = lp.A @ M
        b_rows = lp.b - lp.A @ offset
        rels = list(lp.rel)
        n_user_rows = lp.n_rows
        if bound_rows:
            extra = np.zeros((len(bound_rows), ns))
            for i, (k, ub) in enumerate(bound_rows):
                extra[i, k] = 1.0
            A_rows = np.vstack([A_rows, extra])
            b_rows = np.concatenate([b_rows, [ub for _, ub in bound_rows]])
            rels += [LE] * len(bound_rows)
        m = A_rows.shape[0]

        row_scale, col_scale = _equilibrate(A_rows)
        A_s = A_rows * row_scale[:, None] * col_scale[None, :]
        b_s = b_rows * row_scale
        c_s = (c_user @ M) * col_scale

        n_slack = sum(1 for r in rels if r != EQ)
        A_full = np.zeros((m, ns + n_slack))
        A_full[:, :ns] = A_s
        slack_of_row = np.full(m, -1)
        k = ns
        for i, r in enumerate(rels):
            if r == LE:
                A_full[i, k] = 1.0
            elif r == GE:
                A_full[i, k] = -1.0
            else:
                continue
            slack_of_row[i] = k
            k += 1
        flip = np.where(b_s < 0, -1.0, 1.0)
        A_full *= flip[:, None]
        b_s = b_s * flip

        self.A = A_full
        self.b = b_s
        self.c = np.concatenate([c_s, np.zeros(n_slack)])
        self.n_struct = ns
        self.slack_of_row = slack_of_row
        self.flip = flip
        self.row_scale = row_scale
        self.col_scale = col_scale
        self.M = M
        self.offset = offset
        self.sign = sign
        self.n_user_rows = n_user_rows


def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    rows = np.flatnonzero(T[:, c])
    rows = rows[rows != r]
    if rows.size:
        T[rows] -= T[rows, c][:, None] * T[r][None, :]
    T[rows, c] = 0.0


def _refresh(T: np.ndarray, A: np.ndarray, b: np.ndarray, basis: list[int], cost: np.ndarray) -> bool:
    """Rebuild the tableau from the original data to shed accumulated error."""
    B = A[:, basis]
    try:
        body = np.linalg.solve(B, np.column_stack([A, b]))
        y = np.linalg.solve(B.T, cost[basis])
    except np.linalg.LinAlgError:
        return False
    m = A.shape[0]
    T[:m] = body
    T[m, :-1] = cost - A.T @ y
    T[m, -1] = -cost[basis] @ body[:, -1]
    return True


def _run_simplex(T, A, b, basis, cost, allowed, it0, max_iter):
    """Minimise the cost row of T over columns in `allowed`. Returns (status, iterations)."""
    m = A.shape[0]
    it = it0
    degenerate_run = 0
    since_refresh = 0
    while True:
        if it - it0 >= max_iter:
            return LpStatus.ITERATION_LIMIT, it
        rc = T[m, :-1]
        cand = np.flatnonzero(allowed & (rc < -PIVOT_TOL))
        if cand.size == 0:
            # confirm on a freshly rebuilt tableau before declaring optimality
            if since_refresh and _refresh(T, A, b, basis, cost):
                np.maximum(T[:m, -1], 0.0, out=T[:m, -1])
                since_refresh = 0
                continue
            return LpStatus.OPTIMAL, it
        if degenerate_run >= _BLAND_AFTER:
            enter = int(cand[0])
        else:
            enter = int(cand[np.argmin(rc[cand])])
        col = T[:m, enter]
        rows = np.flatnonzero(col > PIVOT_TOL)
        if rows.size == 0:
            if since_refresh and _refresh(T, A, b, basis, cost):
                np.maximum(T[:m, -1], 0.0, out=T[:m, -1])
                since_refresh = 0
                continue
            return LpStatus.UNBOUNDED, it
        # Harris two-pass ratio test: relax each bound by the feasibility
        # tolerance, then take the largest pivot among rows within that step
        rhs = np.maximum(T[rows, -1], 0.0)
        ratios = rhs / col[rows]
        best = ratios.min()
        limit = ((rhs + FEAS_TOL) / col[rows]).min()
        near = rows[ratios <= limit]
        piv = col[near]
        top = near[piv >= piv.max() * (1.0 - 1e-12)]
        leave = int(min(top, key=lambda i: basis[i]))
        degenerate_run = degenerate_run + 1 if best <= FEAS_TOL else 0
        _pivot(T, leave, enter)
        basis[leave] = enter
        it += 1
        since_refresh += 1
        if since_refresh >= _REFRESH_EVERY:
            since_refresh = 0
            # a failed refresh leaves T untouched; the final one is authoritative
            if _refresh(T, A, b, basis, cost):
                np.maximum(T[:m, -1], 0.0, out=T[:m, -1])


def _dual_cleanup(T, A, b, basis, cost, allowed, max_pivots: int = 500) -> int:
    """Dual simplex pivots on a refreshed, dual-feasible tableau until the basic
    solution is primal feasible at CLEAN_TOL. The Harris ratio test tolerates
    bound violations up to FEAS_TOL, which large coefficients can turn into
    visible objective errors; this removes them. Returns the pivot count."""
    m = A.shape[0]
    tol = CLEAN_TOL * max(1.0, np.abs(b).max(initial=0.0))
    for k in range(max_pivots):
        rhs = T[:m, -1]
        r = int(np.argmin(rhs))
        if rhs[r] >= -tol:
            return k
        row = T[r, :-1]
        cand = np.flatnonzero(allowed & (row < -PIVOT_TOL))
        if cand.size == 0:
            return k
        rc = np.maximum(T[m, cand], 0.0)
        ratios = rc / -row[cand]
        enter = int(cand[np.argmin(ratios)])
        _pivot(T, r, enter)
        basis[r] = enter
        if not _refresh(T, A, b, basis, cost):
            return k + 1
    return max_pivots


def solve_lp(lp: LinearProgram, max_iter: int = MAX_ITER) -> LpSolution:
    """Solve ``lp`` with a two-phase simplex; Dantzig pricing with a Bland fallback."""
    std = _Standardized(lp)
    A, b = std.A, std.b
    m, nA = A.shape

    # phase-1 basis: slacks where they already form an identity column, else artificials
    basis: list[int] = []
    art_rows: list[int] = []
    for i in range(m):
        k = std.slack_of_row[i]
        if k >= 0 and A[i, k] > 0:
            basis.append(k)
        else:
            basis.append(-1)
            art_rows.append(i)
    n_art = len(art_rows)
    ntot = nA + n_art
    A_ext = np.zeros((m, ntot))
    A_ext[:, :nA] = A
    for a, i in enumerate(art_rows):
        A_ext[i, nA + a] = 1.0
        basis[i] = nA + a

    T = np.zeros((m + 1, ntot + 1))
    T[:m, :ntot] = A_ext
    T[:m, -1] = b
    iterations = 0

    if n_art:
        cost1 = np.zeros(ntot)
        cost1[nA:] = 1.0
        T[m, :-1] = cost1
        for i in art_rows:
            T[m] -= T[i]
        allowed = np.ones(ntot, dtype=bool)
        status, iterations = _run_simplex(T, A_ext, b, basis, cost1, allowed, 0, max_iter)
        if status is not LpStatus.OPTIMAL:
            return LpSolution(status, iterations=iterations, message="phase 1 did not converge")
        if -T[m, -1] > FEAS_TOL * max(1.0, np.abs(b).max(initial=0.0)):
            return LpSolution(LpStatus.INFEASIBLE, iterations=iterations)
        # drive remaining artificials out of the basis where possible
        for i in range(m):
            if basis[i] >= nA:
                row = T[i, :nA]
                cand = np.flatnonzero(np.abs(row) > PIVOT_TOL)
                if cand.size:
                    _pivot(T, i, int(cand[0]))
                    basis[i] = int(cand[0])
                    iterations += 1

    cost2 = np.zeros(ntot)
    cost2[:nA] = std.c
    if not _refresh(T, A_ext, b, basis, cost2):
        return LpSolution(LpStatus.NUMERICAL, iterations=iterations, message="singular basis after phase 1")
    np.maximum(T[:m, -1], 0.0, out=T[:m, -1])
    allowed = np.zeros(ntot, dtype=bool)
    allowed[:nA] = True
    for _ in range(_CLEANUP_ROUNDS):
        status, iterations = _run_simplex(T, A_ext, b, basis, cost2, allowed, iterations, max_iter)
        if status is not LpStatus.OPTIMAL:
            return LpSolution(status, iterations=iterations)
        if not _refresh(T, A_ext, b, basis, cost2):
            return LpSolution(LpStatus.NUMERICAL, iterations=iterations, message="singular final basis")
        iterations += _dual_cleanup(T, A_ext, b, basis, cost2, allowed)
        if not np.any(allowed & (T[m, :-1] < -PIVOT_TOL)):
            break
        np.maximum(T[:m, -1], 0.0, out=T[:m, -1])

    z = np.zeros(ntot)
    z[basis] = np.maximum(T[:m, -1], 0.0)
    B = A_ext[:, basis]
    try:
        y_s = np.linalg.solve(B.T, cost2[basis])
    except np.linalg.LinAlgError:
        return LpSolution(LpStatus.NUMERICAL, iterations=iterations, message="singular final basis")

    z_struct = z[: std.n_struct] * std.col_scale
    x = std.offset + std.M @ z_struct
    # undo row flips/scaling: y_user = sign * flip * row_scale * y_s
    y_all = std.sign * std.flip * std.row_scale * y_s
    duals = y_all[: std.n_user_rows]
    red = lp.c - lp.A.T @ duals
    objective = float(lp.c @ x)
    return LpSolution(
        LpStatus.OPTIMAL, objective=objective, x=x, duals=duals, reduced_costs=red,
        iterations=iterations, basis=list(basis),
    )


def dual_of(lp: LinearProgram) -> LinearProgram:
    """LP dual whose optimal value equals that of ``lp`` (strong duality).

    A max problem is first rewritten as ``-min(-c.x)``; the returned dual is
    negated accordingly so that both share one optimal value.
    """
    if lp.sense == "max":
        flipped = LinearProgram(-lp.c, lp.A, lp.rel, lp.b, lp.lo, lp.hi, "min", lp.names)
        d = dual_of(flipped)
        return LinearProgram(-d.c, d.A, d.rel, d.b, d.lo, d.hi, "min", d.names)

    n = lp.n_vars
    A = [row for row in lp.A]
    rel = list(lp.rel)
    b = list(lp.b)
    var_kind = []
    for j in range(n):
        lo, hi = lp.lo[j], lp.hi[j]
        if lo == 0.0:
            var_kind.append("nonneg")
        elif hi == 0.0 and not np.isfinite(lo):
            var_kind.append("nonpos")
        else:
            var_kind.append("free")
            if np.isfinite(lo):
                e = np.zeros(n); e[j] = 1.0
                A.append(e); rel.append(GE); b.append(lo)
        if np.isfinite(hi) and not (hi == 0.0 and var_kind[-1] == "nonpos"):
            e = np.zeros(n); e[j] = 1.0
            A.append(e); rel.append(LE); b.append(hi)
    A = np.array(A).reshape(-1, n)
    m = A.shape[0]

    y_lo = np.array([0.0 if r == GE else -np.inf for r in rel])
    y_hi = np.array([0.0 if r == LE else np.inf for r in rel])
    d_rel = [LE if k == "nonneg" else GE if k == "nonpos" else EQ for k in var_kind]
    names = [f"y_{i}" for i in range(m)]
    return LinearProgram(c=np.array(b), A=A.T, rel=d_rel, b=lp.c.copy(), lo=y_lo, hi=y_hi, sense="max", names=names)
