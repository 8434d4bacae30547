"""Exact agreement probabilities for both couplings, plus the bound ``F``.

All probability comparisons use the absolute tolerance ``TOL``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .dist import DiscreteDistribution, check_shared, tv_distance
from .errors import DomainError

TOL = 1e-12


def big_f(x: float) -> float:
    """``F(x) = 2x / (1 + x)`` on ``[0, 1]``."""
    if not 0 <= x <= 1:
        raise DomainError(f"F is defined on [0, 1], got {x!r}")
    return 2 * x / (1 + x)


@dataclass(frozen=True)
class AgreementBreakdown:
    """``per_atom[u] = P(X = Y = u)`` aligned with ``universe``."""

    universe: tuple
    per_atom: np.ndarray

    @property
    def total(self) -> float:
        return float(self.per_atom.sum())

    @property
    def disagreement(self) -> float:
        return 1.0 - self.total

    def __getitem__(self, label) -> float:
        for a, v in zip(self.universe, self.per_atom):
            if str(a) == str(label):
                return float(v)
        raise DomainError(f"atom {label!r} not in universe")


def coupling_ii_agreement(p: DiscreteDistribution, q: DiscreteDistribution) -> AgreementBreakdown:
    """``P(X=Y=u) = 1 / sum_v max(p_v/p_u, q_v/q_u)`` where ``p_u, q_u > 0``, else 0."""
    check_shared(p, q)
    return AgreementBreakdown(p.universe, coupling_ii_tuple_per_atom(np.vstack([p.p, q.p])))


def coupling_ii_tuple_per_atom(P: np.ndarray) -> np.ndarray:
    """``P(all rows pick u)`` under the clock coupling, for every atom ``u``.

    The event is ``E_v / E_u >= max_i P[i, v] / P[i, u]`` for all ``v``, which
    has probability ``1 / sum_v max_i P[i, v] / P[i, u]``.
    """
    P = np.asarray(P, dtype=float)
    out = np.zeros(P.shape[1])
    for u in np.flatnonzero((P > 0).all(axis=0)):
        out[u] = 1.0 / (P / P[:, [u]]).max(axis=0).sum()
    return out


def coupling_i_agreement(p: DiscreteDistribution, q: DiscreteDistribution) -> AgreementBreakdown:
    """``P(X=Y=u) = min(p_u,q_u) (1 + |p_u - q_u|) / (1 + tv)``."""
    check_shared(p, q)
    alpha = tv_distance(p, q)
    per_atom = np.minimum(p.p, q.p) * (1.0 + np.abs(p.p - q.p)) / (1.0 + alpha)
    return AgreementBreakdown(p.universe, per_atom)


def coupling_i_disagreement_formula(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    """``F(tv) - sum_u min(p_u,q_u) |p_u - q_u| / (1 + tv)``, the race's ``P(X != Y)``."""
    check_shared(p, q)
    alpha = tv_distance(p, q)
    return big_f(min(alpha, 1.0)) - float((np.minimum(p.p, q.p) * np.abs(p.p - q.p)).sum()) / (1 + alpha)


def coupling_i_tuple_per_atom(P: np.ndarray) -> np.ndarray:
    """``P(all rows take u)`` under the Poisson race, computed by recursion.

    Only events that some unassigned row accepts matter. From a state with
    unassigned rows ``S`` the next such event lands on atom ``x`` with height in
    the band between consecutive values of ``P[S, x]`` (sorted descending),
    with probability ``band width / sum_x max_{i in S} P[i, x]``; the rows
    above the band are assigned ``x``. The recursion runs over subsets of rows
    and is exact; use it for up to a dozen rows.
    """
    P = np.asarray(P, dtype=float)
    m, size = P.shape
    if m > 16:
        raise DomainError("exact race recursion is limited to 16 rows")

    @lru_cache(maxsize=None)
    def solve(mask: int, value: int) -> tuple:
        # value == -1: nobody assigned yet; else the common atom so far
        rows = [i for i in range(m) if mask >> i & 1]
        if not rows:
            out = [0.0] * size
            out[value] = 1.0
            return tuple(out)
        sub = P[rows]
        rate = sub.max(axis=0)
        total_rate = rate.sum()
        acc = np.zeros(size)
        for x in range(size):
            if rate[x] == 0 or (value >= 0 and x != value):
                continue
            order = np.argsort(-sub[:, x], kind="stable")
            levels = sub[order, x]
            taken = 0
            for j in range(len(rows)):
                taken |= 1 << rows[order[j]]
                lower = levels[j + 1] if j + 1 < len(rows) else 0.0
                width = levels[j] - lower
                if width > 0:
                    acc += width / total_rate * np.array(solve(mask & ~taken, x))
        return tuple(acc)

    return np.array(solve((1 << m) - 1, -1))


def coupling_i_tuple_agreement(members: Sequence[DiscreteDistribution]) -> float:
    return float(coupling_i_tuple_per_atom(_stack(members)).sum())


def coupling_ii_tuple_agreement(members: Sequence[DiscreteDistribution]) -> float:
    return float(coupling_ii_tuple_per_atom(_stack(members)).sum())


def _stack(members: Sequence[DiscreteDistribution]) -> np.ndarray:
    members = list(members)
    if not members:
        raise DomainError("need at least one distribution")
    for m in members[1:]:
        check_shared(members[0], m)
    return np.vstack([m.p for m in members])


def tightness_condition(p: DiscreteDistribution, q: DiscreteDistribution) -> bool:
    """True iff every atom has ``p_u == q_u`` or ``min(p_u, q_u) == 0`` (within TOL)."""
    check_shared(p, q)
    return bool(np.all((np.abs(p.p - q.p) <= TOL) | (np.minimum(p.p, q.p) <= TOL)))


@dataclass(frozen=True)
class DominanceResult:
    holds: bool
    witness: object = None
    gap: float = 0.0

    def __bool__(self):
        return self.holds


def dominance_check(p: DiscreteDistribution, q: DiscreteDistribution) -> DominanceResult:
    """Check ``P_II(X=Y=u) >= P_I(X=Y=u) - TOL`` for every atom.

    On failure the witness is the atom with the largest violation.
    """
    two = coupling_ii_agreement(p, q).per_atom
    one = coupling_i_agreement(p, q).per_atom
    diff = two - one
    worst = int(np.argmin(diff))
    if diff[worst] >= -TOL:
        return DominanceResult(True, None, float(diff[worst]))
    return DominanceResult(False, p.universe[worst], float(diff[worst]))


def ktuple_agreement_lower(members: Sequence[DiscreteDistribution]) -> float:
    """``sum_u min_i p_i(u) / sum_u max_i p_i(u)``; both couplings agree at least this often."""
    P = _stack(members)
    if P.shape[0] < 2:
        raise DomainError("need at least two distributions")
    return float(P.min(axis=0).sum() / P.max(axis=0).sum())


def ktuple_alpha(members: Sequence[DiscreteDistribution]) -> float:
    """Smallest possible ``P(not all equal)``: ``1 - sum_u min_i p_i(u)``."""
    return float(1.0 - _stack(members).min(axis=0).sum())


def ktuple_bound(alpha: float, k: int) -> float:
    if not 0 <= alpha <= 1:
        raise DomainError(f"alpha must lie in [0, 1], got {alpha!r}")
    if int(k) != k or k < 2:
        raise DomainError(f"k must be an integer >= 2, got {k!r}")
    return k * alpha / (1 + (k - 1) * alpha)


def agreement(p: DiscreteDistribution, q: DiscreteDistribution, kind: str) -> AgreementBreakdown:
    if kind == "ii":
        return coupling_ii_agreement(p, q)
    if kind == "i":
        return coupling_i_agreement(p, q)
    raise DomainError(f"no closed form for coupling {kind!r}")


def tuple_agreement(members: Sequence[DiscreteDistribution], kind: str) -> float:
    if kind == "ii":
        return coupling_ii_tuple_agreement(members)
    if kind == "i":
        return coupling_i_tuple_agreement(members)
    raise DomainError(f"no closed form for coupling {kind!r}")
