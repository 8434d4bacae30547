"""Linear-programming ground truth for small families.

The joint law of a family is a weight vector over the product of the member
supports. Two programs are solved over it with a dense two-phase tableau
simplex:

* minimax: minimize ``t`` subject to ``P(X_i != X_j) <= t`` for every pair;
* minsum: minimize ``sum_{i<j} P(X_i != X_j)``.

For two members the optimum is the maximal coupling, built in closed form by
``optimal_pair_coupling``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .dist import DiscreteDistribution, Family, check_shared
from .errors import DomainError, SolverStall, TooLarge

LP_TOL = 1e-9
MAX_JOINT = 10**5


@dataclass(frozen=True)
class JointDistribution:
    """Weights on value tuples; coordinate ``i`` belongs to member ``names[i]``."""

    names: tuple
    support: tuple
    weights: np.ndarray

    def marginal(self, i: int) -> dict:
        out: dict = {}
        for tup, w in zip(self.support, self.weights):
            out[tup[i]] = out.get(tup[i], 0.0) + float(w)
        return out

    def marginal_error(self, family: Family) -> float:
        """Largest per-atom gap between the joint's marginals and ``family``."""
        worst = 0.0
        for i, member in enumerate(family.members):
            marg = self.marginal(i)
            for a in member.universe:
                worst = max(worst, abs(marg.get(a, 0.0) - member.prob(a)))
        return worst

    def disagreement(self, i: int, j: int) -> float:
        return float(sum(w for tup, w in zip(self.support, self.weights) if tup[i] != tup[j]))

    def rows(self):
        for tup, w in zip(self.support, self.weights):
            yield tup, float(w)


@dataclass(frozen=True)
class LpReport:
    objective: float
    joint: JointDistribution
    status: str  # "optimal" or "infeasible-tolerance"
    iterations: int = 0


# --- closed form for two members -----------------------------------------------

def optimal_pair_coupling(p: DiscreteDistribution, q: DiscreteDistribution) -> LpReport:
    """Maximal coupling: ``min(p_u, q_u)`` on the diagonal, residuals matched in atom order."""
    check_shared(p, q)
    common = np.minimum(p.p, q.p)
    mass: dict = {}
    for u, w in zip(p.universe, common):
        if w > 0:
            mass[(u, u)] = float(w)
    rp, rq = list(p.p - common), list(q.p - common)
    i = j = 0
    size = len(p.universe)
    while i < size and j < size:
        if rp[i] <= 0:
            i += 1
            continue
        if rq[j] <= 0:
            j += 1
            continue
        w = min(rp[i], rq[j])
        key = (p.universe[i], p.universe[j])
        mass[key] = mass.get(key, 0.0) + w
        rp[i] -= w
        rq[j] -= w
    support = tuple(mass)
    joint = JointDistribution(("X", "Y"), support, np.array([mass[s] for s in support]))
    return LpReport(joint.disagreement(0, 1), joint, "optimal")


# --- dense simplex --------------------------------------------------------------

def _pivot(T: np.ndarray, r: int, c: int) -> None:
    T[r] /= T[r, c]
    col = T[:, c].copy()
    col[r] = 0.0
    T -= np.outer(col, T[r])


def _run(T: np.ndarray, basis: list, ncols: int, max_iters: int, bland_after: int = 50) -> int:
    """Minimize the objective in the last row of ``T`` over columns ``< ncols``.

    The last row holds reduced costs and ``-objective`` in its final entry.
    Pivots pick the most negative reduced cost; after ``bland_after``
    consecutive degenerate pivots they switch to Bland's rule (lowest entering
    index, ties in the ratio test to the lowest basic index) until the
    objective moves again, which rules out cycling.
    """
    m = T.shape[0] - 1
    stalled = 0
    for it in range(max_iters):
        reduced = T[-1, :ncols]
        neg = np.flatnonzero(reduced < -LP_TOL)
        if neg.size == 0:
            return it
        bland = stalled >= bland_after
        c = int(neg[0]) if bland else int(neg[np.argmin(reduced[neg])])
        col = T[:m, c]
        ok = np.flatnonzero(col > LP_TOL)
        if ok.size == 0:
            raise DomainError("linear program is unbounded")
        ratios = T[ok, -1] / col[ok]
        best = ratios.min()
        ties = ok[ratios <= best + LP_TOL * max(1.0, abs(best))]
        r = int(min(ties, key=lambda row: basis[row]))
        stalled = stalled + 1 if best <= LP_TOL else 0
        _pivot(T, r, c)
        basis[r] = c
    raise SolverStall(f"simplex did not converge in {max_iters} pivots")


def solve_standard_form(c: np.ndarray, A: np.ndarray, b: np.ndarray, max_iters: int = 200_000):
    """Minimize ``c @ x`` subject to ``A x = b``, ``x >= 0``; returns ``(x, value, pivots)``.

    Phase 1 minimizes the sum of one artificial per row. Artificials left in
    the basis at level zero are pivoted out, and rows where that is impossible
    are dropped as redundant.
    """
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float)
    c = np.asarray(c, dtype=float)
    m, n = A.shape
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1

    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n:n + m] = np.eye(m)
    T[:m, -1] = b
    T[-1, :n] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    basis = list(range(n, n + m))
    pivots = _run(T, basis, n + m, max_iters)
    if -T[-1, -1] > 1e-7:
        raise DomainError(f"linear program is infeasible (phase 1 residual {-T[-1, -1]:.3g})")

    keep = []
    for r in range(m):
        if basis[r] >= n:
            nz = np.flatnonzero(np.abs(T[r, :n]) > LP_TOL)
            if nz.size == 0:
                continue  # redundant row
            _pivot(T, r, int(nz[0]))
            basis[r] = int(nz[0])
        keep.append(r)
    T = np.vstack([T[keep][:, list(range(n)) + [-1]], np.zeros((1, n + 1))])
    basis = [basis[r] for r in keep]

    T[-1, :n] = c
    for r, j in enumerate(basis):
        T[-1] -= c[j] * T[r]
    pivots += _run(T, basis, n, max_iters - pivots)

    x = np.zeros(n)
    for r, j in enumerate(basis):
        x[j] = T[r, -1]
    return x, float(c @ x), pivots


# --- family programs ------------------------------------------------------------

def _joint_support(family: Family) -> list[tuple]:
    supports = [np.flatnonzero(m.p > 0) for m in family.members]
    size = 1
    for s in supports:
        size *= len(s)
    if size > MAX_JOINT:
        raise TooLarge(f"joint support of {size} tuples exceeds {MAX_JOINT}")
    return list(itertools.product(*supports))


def _marginal_rows(family: Family, tuples: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    rows, rhs = [], []
    for i, member in enumerate(family.members):
        for a in np.flatnonzero(member.p > 0):
            rows.append((tuples[:, i] == a).astype(float))
            rhs.append(member.p[a])
    return np.array(rows), np.array(rhs)


def _report(family: Family, tuples: np.ndarray, w: np.ndarray, objective: float, pivots: int) -> LpReport:
    w = np.where(w > 0, w, 0.0)
    live = np.flatnonzero(w > 0)
    U = family.universe
    joint = JointDistribution(
        family.names, tuple(tuple(U[a] for a in tuples[t]) for t in live), w[live]
    )
    status = "optimal" if joint.marginal_error(family) <= LP_TOL else "infeasible-tolerance"
    return LpReport(objective, joint, status, pivots)


def minimax_disagreement(family: Family, max_iters: int = 200_000) -> LpReport:
    """Smallest achievable ``max_{i<j} P(X_i != X_j)`` over all couplings of ``family``."""
    tuples = np.array(_joint_support(family), dtype=np.int64).reshape(-1, len(family))
    N = len(tuples)
    pairs = list(itertools.combinations(range(len(family)), 2))
    M, rhs = _marginal_rows(family, tuples)
    P = len(pairs)
    # columns: weights (N), t, one slack per pair
    A = np.zeros((len(M) + P, N + 1 + P))
    A[:len(M), :N] = M
    for r, (i, j) in enumerate(pairs):
        A[len(M) + r, :N] = tuples[:, i] != tuples[:, j]
        A[len(M) + r, N] = -1.0
        A[len(M) + r, N + 1 + r] = 1.0
    b = np.concatenate([rhs, np.zeros(P)])
    c = np.zeros(N + 1 + P)
    c[N] = 1.0
    x, value, pivots = solve_standard_form(c, A, b, max_iters)
    return _report(family, tuples, x[:N], value, pivots)


def min_sum_disagreement(family: Family, max_iters: int = 200_000) -> LpReport:
    """Smallest achievable ``sum_{i<j} P(X_i != X_j)`` over all couplings of ``family``."""
    tuples = np.array(_joint_support(family), dtype=np.int64).reshape(-1, len(family))
    pairs = list(itertools.combinations(range(len(family)), 2))
    cost = np.zeros(len(tuples))
    for i, j in pairs:
        cost += tuples[:, i] != tuples[:, j]
    M, rhs = _marginal_rows(family, tuples)
    x, value, pivots = solve_standard_form(cost, M, rhs, max_iters)
    return _report(family, tuples, x, value, pivots)
