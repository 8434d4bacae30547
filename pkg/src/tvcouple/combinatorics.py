"""(n, k)-assignments and the counting identities behind the sharpness results.

An (n, k)-assignment picks ``z_I`` in ``I`` for every ``n``-subset ``I`` of
``{1..n+k}``; a perturbed assignment may also use 0 ("unassigned"). Subsets
are kept as sorted tuples in lexicographic order and referred to by their
position in that order. All counts are Python ints; the only floats appear in
``check_step_inequality``, which evaluates a user-supplied function.

A zero choice disagrees with every other subset, other zeros included.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Mapping

import numpy as np

from .errors import DomainError, InvalidAssignment, ShapeError, TooLarge
from .exact import TOL, big_f

MAX_PAIR_SCAN = 10**4
MAX_GREEDY = 10**6
MAX_ENUMERATION = 10**6


def _check_nk(n: int, k: int, square: bool = True) -> None:
    if int(n) != n or int(k) != k or n < 1 or k < 1:
        raise DomainError(f"need positive integers, got n={n!r}, k={k!r}")
    if square and k > n:
        raise DomainError(f"need k <= n, got n={n}, k={k}")


@lru_cache(maxsize=64)
def subsets(n: int, k: int) -> tuple:
    return tuple(itertools.combinations(range(1, n + k + 1), n))


@lru_cache(maxsize=16)
def _membership(n: int, k: int) -> np.ndarray:
    subs = subsets(n, k)
    M = np.zeros((len(subs), n + k), dtype=np.float64)
    for row, s in enumerate(subs):
        M[row, [e - 1 for e in s]] = 1.0
    return M


def distance_matrix(n: int, k: int) -> np.ndarray:
    """``d(I, J) = |I - J|`` for all pairs of subsets, as ``int8``."""
    M = _membership(n, k)
    return (n - (M @ M.T)).round().astype(np.int8)


def hamming_distance(I, J) -> int:
    I, J = tuple(sorted(I)), tuple(sorted(J))
    if len(I) != len(J) or len(set(I)) != len(I) or len(set(J)) != len(J):
        raise ShapeError(f"subsets {I} and {J} must be sets of equal size")
    return len(set(I) - set(J))


# --- exact counts -------------------------------------------------------------

def max_distance(n: int, k: int) -> int:
    return min(n, k)


def pair_totals(n: int, k: int) -> dict[int, int]:
    """Ordered pairs of ``n``-subsets of ``{1..n+k}`` at distance ``m``: ``(n+k)!/(m! m! (n-m)! (k-m)!)``."""
    _check_nk(n, k, square=False)
    f = math.factorial
    return {m: f(n + k) // (f(m) ** 2 * f(n - m) * f(k - m)) for m in range(min(n, k) + 1)}


def distant_bound_threshold(n: int, k: int) -> Fraction:
    """``2k/(n+k)`` times the number of distant pairs."""
    _check_nk(n, k)
    return Fraction(2 * k, n + k) * pair_totals(n, k)[k]


def total_disagreement_lower(n: int, k: int) -> int:
    """``sum_{i<k} 2 C(n+i, i+1) C(n+i, i)``: minimum total disagreements, attained by ``min(I)``."""
    _check_nk(n, k, square=False)
    return sum(2 * math.comb(n + i, i + 1) * math.comb(n + i, i) for i in range(k))


@dataclass(frozen=True)
class IdentityCheck:
    lhs: Fraction
    rhs: Fraction

    @property
    def holds(self) -> bool:
        return self.lhs == self.rhs

    def __bool__(self):
        return self.holds


def check_combi_identity(n: int, k: int) -> IdentityCheck:
    """Both sides of ``sum_i C(n+i,i+1) C(n+i,i) = sum_m m/(n+m) (n+k)!/(m! m! (n-m)! (k-m)!)``."""
    _check_nk(n, k, square=False)
    f = math.factorial
    lhs = sum(math.comb(n + i, i + 1) * math.comb(n + i, i) for i in range(k))
    rhs = sum(
        Fraction(m, n + m) * (f(n + k) // (f(m) ** 2 * f(n - m) * f(k - m)))
        for m in range(1, min(k, n) + 1)
    )
    return IdentityCheck(Fraction(lhs), Fraction(rhs))


def distance_profile_probs(n: int, k: int) -> dict[int, Fraction]:
    """``c_m``: probability that two independent uniform ``n``-subsets are at distance ``m``."""
    totals = pair_totals(n, k)
    denom = math.comb(n + k, k) ** 2
    return {m: Fraction(t, denom) for m, t in totals.items()}


@dataclass(frozen=True)
class StepCheck:
    lhs: float
    rhs: float
    eps: float | None = None
    eps_lhs: float | None = None
    eps_rhs: float | None = None

    @property
    def holds(self) -> bool:
        return self.lhs >= self.rhs - TOL

    @property
    def eps_holds(self) -> bool | None:
        if self.eps is None:
            return None
        return self.eps_lhs >= self.eps_rhs - TOL


def check_step_inequality(f: Callable, n: int, k: int, eps: float | None = None) -> StepCheck:
    """Compare ``sum_m c_m f(m/n)`` with ``sum_m c_m F(m/n)`` over ``m = 1..k``.

    With ``eps`` also compares ``sum_m c_m f((1-eps) m/n)`` against
    ``(1 - 3 eps^(2/3)) sum_m c_m F(m/n)``.
    """
    c = distance_profile_probs(n, k)
    ms = range(1, k + 1)
    lhs = sum(float(c[m]) * f(m / n) for m in ms)
    rhs = sum(float(c[m]) * big_f(m / n) for m in ms)
    if eps is None:
        return StepCheck(lhs, rhs)
    if not 0 < eps < 1:
        raise DomainError("eps must lie in (0, 1)")
    eps_lhs = sum(float(c[m]) * f((1 - eps) * m / n) for m in ms)
    return StepCheck(lhs, rhs, eps, eps_lhs, (1 - 3 * eps ** (2 / 3)) * rhs)


# --- assignments --------------------------------------------------------------

@dataclass(frozen=True)
class Assignment:
    """Choices aligned with ``subsets(n, k)``; 0 marks an unassigned subset."""

    n: int
    k: int
    choices: tuple

    def __post_init__(self):
        _check_nk(self.n, self.k, square=False)
        subs = subsets(self.n, self.k)
        if len(self.choices) != len(subs):
            raise ShapeError(f"expected {len(subs)} choices, got {len(self.choices)}")
        for s, z in zip(subs, self.choices):
            if z != 0 and z not in s:
                raise InvalidAssignment(s, z)

    @classmethod
    def from_mapping(cls, n: int, k: int, choices: Mapping) -> "Assignment":
        table = {tuple(sorted(s)): int(z) for s, z in choices.items()}
        subs = subsets(n, k)
        missing = [s for s in subs if s not in table]
        if missing:
            raise ShapeError(f"no choice for subset {missing[0]}")
        return cls(n, k, tuple(table[s] for s in subs))

    def as_dict(self) -> dict:
        return dict(zip(subsets(self.n, self.k), self.choices))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.choices, dtype=np.int64)

    @property
    def zeros(self) -> int:
        return sum(1 for z in self.choices if z == 0)

    @property
    def epsilon(self) -> Fraction:
        return Fraction(self.zeros, len(self.choices))

    def value_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for z in self.choices:
            out[z] = out.get(z, 0) + 1
        return out

    def to_json(self) -> dict:
        return {",".join(map(str, s)): z for s, z in self.as_dict().items()}


def greedy_assignment(n: int, k: int) -> Assignment:
    _check_nk(n, k, square=False)
    if math.comb(n + k, k) > MAX_GREEDY:
        raise TooLarge(f"binomial({n + k}, {k}) exceeds {MAX_GREEDY}")
    return Assignment(n, k, tuple(s[0] for s in subsets(n, k)))


def greedy_class_sizes(n: int, k: int) -> dict[int, int]:
    """Sizes ``N_i = C(n+k-i, k-i+1)`` of the classes ``{I : min(I) = i}``."""
    _check_nk(n, k, square=False)
    return {i: math.comb(n + k - i, k - i + 1) for i in range(1, k + 2)}


def affine_mod_assignment(n: int, k: int, mult: int, modulus: int) -> Assignment:
    """``z_I = mult * sum(I) mod modulus``, residues read in ``{1..modulus}``.

    Raises InvalidAssignment for the first subset whose value is not in it.
    """
    _check_nk(n, k, square=False)
    if modulus < n + k:
        raise DomainError(f"modulus must be at least n + k = {n + k}")
    choices = []
    for s in subsets(n, k):
        z = (mult * sum(s) - 1) % modulus + 1
        if z not in s:
            raise InvalidAssignment(s, z)
        choices.append(z)
    return Assignment(n, k, tuple(choices))


@dataclass(frozen=True)
class DisagreementProfile:
    n: int
    k: int
    counts: dict  # m -> D_m over ordered pairs, m = 1..k
    totals: dict  # m -> number of ordered pairs at distance m

    def __getitem__(self, m: int) -> int:
        return self.counts[m]

    @property
    def total(self) -> int:
        return sum(self.counts.values())


def _disagree(za: np.ndarray, zb: np.ndarray) -> np.ndarray:
    return (za[:, None] != zb[None, :]) | (za == 0)[:, None] | (zb == 0)[None, :]


def count_disagreements(z: Assignment) -> DisagreementProfile:
    """``D_m(z)`` for ``m = 1..min(n, k)``, counting ordered pairs."""
    subs = subsets(z.n, z.k)
    if len(subs) > MAX_PAIR_SCAN:
        raise TooLarge(f"{len(subs)} subsets exceed the pair-scan limit {MAX_PAIR_SCAN}")
    M = _membership(z.n, z.k)
    zz = z.array
    top = max_distance(z.n, z.k)
    counts = np.zeros(top + 1, dtype=np.int64)
    for s in range(0, len(subs), 512):
        dist = (z.n - M[s:s + 512] @ M.T).round().astype(np.int64)
        neq = _disagree(zz[s:s + 512], zz)
        counts += np.bincount(dist[neq], minlength=top + 1)
    return DisagreementProfile(
        z.n, z.k, {m: int(counts[m]) for m in range(1, top + 1)}, pair_totals(z.n, z.k)
    )


def total_disagreements(z: Assignment) -> int:
    """``sum_m D_m(z)`` from class sizes: ordered distinct pairs minus agreeing ones."""
    N = len(z.choices)
    agree = sum(c * (c - 1) for v, c in z.value_counts().items() if v != 0)
    return N * (N - 1) - agree


def check_distant_bound(z: Assignment) -> bool:
    """``D_k(z)`` against ``distant_bound_threshold``; needs ``k <= n``."""
    _check_nk(z.n, z.k)
    return count_disagreements(z)[z.k] >= distant_bound_threshold(z.n, z.k)


@dataclass(frozen=True)
class PerturbedCheck:
    holds: bool
    slack: Fraction  # total disagreements minus the required amount
    epsilon: Fraction

    def __bool__(self):
        return self.holds


def check_perturbed_bound(z: Assignment) -> PerturbedCheck:
    """``sum_m D_m >= (1 - eps^2 (n+k)^2/n^2) * total_disagreement_lower`` with ``eps`` the zero fraction."""
    if len(z.choices) > MAX_PAIR_SCAN:
        raise TooLarge(f"{len(z.choices)} subsets exceed the pair-scan limit {MAX_PAIR_SCAN}")
    eps = z.epsilon
    need = (1 - eps**2 * Fraction(z.n + z.k, z.n) ** 2) * total_disagreement_lower(z.n, z.k)
    slack = total_disagreements(z) - need
    return PerturbedCheck(slack >= 0, slack, eps)


# --- exhaustive enumeration and local search ---------------------------------

def _distant_pairs(n: int, k: int) -> tuple[np.ndarray, np.ndarray]:
    a, b = np.nonzero(distance_matrix(n, k) == max_distance(n, k))
    return a, b


def _all_assignments(n: int, k: int, chunk: int = 1 << 16):
    """Yield blocks of every zero-free assignment, one row per assignment."""
    subs = subsets(n, k)
    options = np.array(subs, dtype=np.int64)  # (N, n)
    N = len(subs)
    total = n**N
    if total > MAX_ENUMERATION:
        raise TooLarge(f"{total} assignments exceed the enumeration limit {MAX_ENUMERATION}")
    powers = n ** np.arange(N - 1, -1, -1, dtype=np.int64)
    for s in range(0, total, chunk):
        codes = np.arange(s, min(s + chunk, total), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % n
        yield options[np.arange(N)[None, :], digits]


def exhaustive_min_distant(n: int, k: int) -> tuple[int, Assignment]:
    """Exact minimum of distant disagreements (distance ``min(n, k)``) over all zero-free assignments."""
    _check_nk(n, k, square=False)
    a, b = _distant_pairs(n, k)
    best, witness = None, None
    for block in _all_assignments(n, k):
        dk = (block[:, a] != block[:, b]).sum(axis=1)
        i = int(np.argmin(dk))
        if best is None or dk[i] < best:
            best, witness = int(dk[i]), tuple(int(v) for v in block[i])
    return best, Assignment(n, k, witness)


def exhaustive_min_total(n: int, k: int) -> tuple[int, Assignment]:
    """Exact minimum of ``sum_m D_m`` over all zero-free (n, k)-assignments."""
    _check_nk(n, k, square=False)
    N = len(subsets(n, k))
    best, witness = None, None
    for block in _all_assignments(n, k):
        onehot = np.zeros((block.shape[0], n + k + 1), dtype=np.int64)
        np.add.at(onehot, (np.repeat(np.arange(block.shape[0]), N), block.ravel()), 1)
        tot = N * N - (onehot**2).sum(axis=1)
        i = int(np.argmin(tot))
        if best is None or tot[i] < best:
            best, witness = int(tot[i]), tuple(int(v) for v in block[i])
    return best, Assignment(n, k, witness)


@dataclass(frozen=True)
class SearchResult:
    best: int
    witness: Assignment
    threshold: Fraction
    below_threshold: bool  # some restart ended strictly below the threshold
    restarts: int
    best_per_restart: tuple


def _descend(z: np.ndarray, A: np.ndarray, opts: np.ndarray, max_iters: int) -> np.ndarray:
    """Steepest descent on ``D_k`` with single-choice moves; ``A`` is the distant-pair adjacency."""
    N = len(z)
    width = int(opts.max()) + 1
    onehot = np.zeros((N, width), dtype=np.int64)
    onehot[np.arange(N), z] = 1
    C = A @ onehot  # C[I, v] = #distant J with z_J = v
    rows = np.arange(N)[:, None]
    for _ in range(max_iters):
        # moving z_I from a to b lowers D_k by 2 (C[I, b] - C[I, a])
        delta = C[rows, opts] - C[np.arange(N), z][:, None]
        flat = int(np.argmax(delta))
        if delta.flat[flat] <= 0:
            break
        i, j = divmod(flat, opts.shape[1])
        old, new = z[i], opts[i, j]
        z[i] = new
        col = A[:, i]
        C[:, old] -= col
        C[:, new] += col
    return z


def local_search_min_distant(
    n: int, k: int, seed: int = 0, restarts: int = 100, iters: int = 10_000, start: str = "random"
) -> SearchResult:
    """Best ``D_k`` found by steepest descent from ``restarts`` starting points.

    ``start`` is ``"random"`` (each ``z_I`` uniform in ``I``, restart ``r``
    seeded from ``(seed, r)``) or ``"greedy"``.
    """
    _check_nk(n, k)
    subs = subsets(n, k)
    if len(subs) > MAX_PAIR_SCAN:
        raise TooLarge(f"{len(subs)} subsets exceed the pair-scan limit {MAX_PAIR_SCAN}")
    opts = np.array(subs, dtype=np.int64)
    A = (distance_matrix(n, k) == k).astype(np.int64)
    threshold = distant_bound_threshold(n, k)
    best, witness, below, per = None, None, False, []
    for r in range(restarts):
        if start == "greedy":
            z = opts[:, 0].copy()
        elif start == "random":
            rng = np.random.default_rng([seed, r])
            z = opts[np.arange(len(subs)), rng.integers(0, n, size=len(subs))]
        else:
            raise DomainError(f"unknown start {start!r}")
        z = _descend(z, A, opts, iters)
        dk = int((z[:, None] != z[None, :])[A.astype(bool)].sum())
        per.append(dk)
        below |= dk < threshold
        if best is None or dk < best:
            best, witness = dk, Assignment(n, k, tuple(int(v) for v in z))
    return SearchResult(best, witness, threshold, below, restarts, tuple(per))


# --- Q-count --------------------------------------------------------------------

def falling5(n: int) -> int:
    """``n_5 = n!/(n-5)!``."""
    return math.perm(n, 5)


@lru_cache(maxsize=16)
def _triples(n: int) -> tuple:
    return tuple(itertools.combinations(range(1, n + 1), 3))


@lru_cache(maxsize=16)
def _unique_common(n: int) -> np.ndarray:
    """``T[I, J]`` is the element shared by ``I`` and ``J`` when they share exactly one, else 0."""
    trip = _triples(n)
    M = np.zeros((len(trip), n + 1), dtype=np.int64)
    for row, s in enumerate(trip):
        M[row, list(s)] = 1
    inter = M @ M.T
    T = np.zeros_like(inter)
    ii, jj = np.nonzero(inter == 1)
    prod = M[ii] * M[jj]
    T[ii, jj] = prod.argmax(axis=1)
    return T


def _check_triple_assignment(n: int, z) -> np.ndarray:
    if int(n) != n or n < 5:
        raise DomainError("Q-count needs n >= 5")
    trip = _triples(n)
    if isinstance(z, Mapping):
        table = {tuple(sorted(s)): v for s, v in z.items()}
        try:
            z = [table[s] for s in trip]
        except KeyError as exc:
            raise DomainError(f"no choice for triple {exc.args[0]}") from None
    z = np.asarray(z, dtype=np.int64)
    if z.shape != (len(trip),):
        raise DomainError(f"expected {len(trip)} choices")
    for s, v in zip(trip, z):
        if v not in s:
            raise DomainError(f"choice {v} is not in triple {s}")
    return z


def q_count(z, n: int) -> int:
    """Ordered pairs of 3-subsets meeting in exactly one element that both choose.

    ``z`` maps each 3-subset of ``{1..n}`` (or is aligned with their
    lexicographic order) to one of its elements.
    """
    z = _check_triple_assignment(n, z)
    T = _unique_common(n)
    return int(((T == z[:, None]) & (T == z[None, :]) & (T > 0)).sum())


def min_triple_assignment(n: int) -> np.ndarray:
    return np.array([s[0] for s in _triples(n)], dtype=np.int64)


@dataclass(frozen=True)
class QSearchResult:
    n: int
    best: int
    witness: tuple
    exhaustive: bool
    min_value: int  # Q of z_I = min(I), which is n_5 / 20
    pair_total: int  # n_5 / 4

    @property
    def beats_min_by(self) -> int:
        return self.best - self.min_value

    @property
    def reaches_min_plus_4(self) -> bool:
        return self.best >= self.min_value + 4

    @property
    def reaches_n5_over_5_plus_4(self) -> bool:
        return self.best >= falling5(self.n) // 5 + 4


def _q_ascend(z: np.ndarray, T: np.ndarray, opts: np.ndarray, max_iters: int) -> np.ndarray:
    N = len(z)
    rows = np.arange(N)
    # C[I, v] = #J with T[I, J] = v and z_J = v
    C = np.zeros((N, int(opts.max()) + 1), dtype=np.int64)
    hit = (T == z[None, :]) & (T > 0)
    np.add.at(C, (np.nonzero(hit)[0], T[hit]), 1)
    for _ in range(max_iters):
        delta = C[rows[:, None], opts] - C[rows, z][:, None]
        flat = int(np.argmax(delta))
        if delta.flat[flat] <= 0:
            break
        i, j = divmod(flat, opts.shape[1])
        old, new = z[i], opts[i, j]
        z[i] = new
        col = T[:, i]
        C[col == old, old] -= 1
        C[col == new, new] += 1
    return z


def q_search(n: int, seed: int = 0, restarts: int = 50, exhaustive: bool | None = None, iters: int = 100_000) -> QSearchResult:
    """Largest ``Q`` found; ``n = 5`` defaults to full enumeration of ``3**10`` assignments."""
    if int(n) != n or n < 5:
        raise DomainError("Q-search needs n >= 5")
    if n > 12:
        raise TooLarge("Q-search is limited to n <= 12")
    trip = _triples(n)
    opts = np.array(trip, dtype=np.int64)
    T = _unique_common(n)
    if exhaustive is None:
        exhaustive = n == 5
    if exhaustive:
        total = 3 ** len(trip)
        if total > MAX_ENUMERATION:
            raise TooLarge(f"{total} assignments exceed the enumeration limit")
        ii, jj = np.nonzero(T)
        common = T[ii, jj]
        powers = 3 ** np.arange(len(trip) - 1, -1, -1, dtype=np.int64)
        best, witness = -1, None
        for s in range(0, total, 1 << 14):
            codes = np.arange(s, min(s + (1 << 14), total), dtype=np.int64)
            Z = opts[np.arange(len(trip))[None, :], (codes[:, None] // powers) % 3]
            q = ((Z[:, ii] == common) & (Z[:, jj] == common)).sum(axis=1)
            i = int(np.argmax(q))
            if q[i] > best:
                best, witness = int(q[i]), tuple(int(v) for v in Z[i])
    else:
        best, witness = -1, None
        for r in range(restarts):
            if r == 0:
                z = min_triple_assignment(n)
            else:
                rng = np.random.default_rng([seed, r])
                z = opts[np.arange(len(trip)), rng.integers(0, 3, size=len(trip))]
            z = _q_ascend(z, T, opts, iters)
            q = q_count(z, n)
            if q > best:
                best, witness = q, tuple(int(v) for v in z)
    return QSearchResult(n, best, witness, exhaustive, q_count(min_triple_assignment(n), n), falling5(n) // 4)
