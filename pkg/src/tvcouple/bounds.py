"""Lower bounds that every disagreement bound must satisfy, and the families behind them."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from numbers import Rational
from typing import Callable, Iterable

from .dist import DiscreteDistribution, Family
from .errors import DomainError, TooLarge
from .exact import TOL, big_f

# constant of the sufficient size condition n >= a k^2 + 6k
A_CONST = 1 / math.log(1.5)
SNAP = 1e-12
MAX_SET_FAMILY = 10**5


def _check_open_unit(x) -> None:
    if not 0 < x < 1:
        raise DomainError(f"x must lie in (0, 1), got {x!r}")


def inverse_floor(x) -> int:
    """``floor(1/x)``: exact for rationals, snapped for floats within 1e-12 of ``1/n``."""
    if isinstance(x, Rational):
        return math.floor(1 / Fraction(x))
    n = round(1 / x)
    if n >= 1 and abs(x - 1 / n) <= SNAP:
        return n
    return math.floor(1 / x)


def _is_inverse_integer(x) -> bool:
    if isinstance(x, Rational):
        return Fraction(x).numerator == 1
    n = round(1 / x)
    return n >= 1 and abs(x - 1 / n) <= SNAP


def lb_inverse_integer(n: int) -> float:
    """``F(1/n) = 2/(n+1)``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    return 2 / (n + 1)


def lb_all_x(x):
    """``2x / (1 + 1/floor(1/x))``; returns a Fraction for rational input."""
    _check_open_unit(x)
    n = inverse_floor(x)
    if isinstance(x, Rational):
        return 2 * Fraction(x) / (1 + Fraction(1, n))
    return 2 * x / (1 + 1 / n)


def lb_pointwise(x):
    """``max(2(n-1)x/n, 4n/(n^2-1) - 2nx/(n-1))`` for ``x`` in ``[1/n, 1/(n-1))``."""
    _check_open_unit(x)
    n = inverse_floor(x) if _is_inverse_integer(x) else inverse_floor(x) + 1
    if isinstance(x, Rational):
        x = Fraction(x)
        return max(Fraction(2 * (n - 1), n) * x, Fraction(4 * n, n * n - 1) - Fraction(2 * n, n - 1) * x)
    return max(2 * (n - 1) * x / n, 4 * n / (n * n - 1) - 2 * n * x / (n - 1))


def perturb_bound(f: Callable, epsilon: float, delta: float) -> Callable:
    """``x -> f((1 - eps) x + delta) + 2 eps``, a disagreement bound whenever ``f`` is."""
    if not 0 <= delta <= epsilon <= 1:
        raise DomainError("need 0 <= delta <= epsilon <= 1")

    def perturbed(x):
        return f((1 - epsilon) * x + delta) + 2 * epsilon

    return perturbed


@dataclass(frozen=True)
class KnCondition:
    k: int
    n: int
    threshold: int
    coarse_threshold: int

    @property
    def holds(self) -> bool:
        return self.n >= self.threshold

    @property
    def coarse_holds(self) -> bool:
        return self.n >= self.coarse_threshold

    def __bool__(self):
        return self.holds


def lb_kn_condition(k: int, n: int) -> KnCondition:
    """Whether ``n >= ceil(a k^2 + 6k)`` with ``a = 1/ln(3/2)``; also reports ``3k^2 + 6k``.

    When it holds, ``F(k/n)`` is a lower bound on any disagreement bound at ``k/n``.
    """
    if int(k) != k or k < 2 or int(n) != n or n < 1:
        raise DomainError("need integers k >= 2 and n >= 1")
    return KnCondition(int(k), int(n), math.ceil(A_CONST * k * k + 6 * k), 3 * k * k + 6 * k)


def kn_points(kmax: int, x_min: float = 0.0, n_max: int | None = None) -> list[tuple[int, int, Fraction]]:
    """Reduced fractions ``k/n`` (``2 <= k <= kmax``) where the size condition holds."""
    out = []
    for k in range(2, kmax + 1):
        start = lb_kn_condition(k, 1).threshold
        stop = n_max if n_max is not None else (math.floor(k / x_min) if x_min > 0 else start + 50)
        for n in range(start, stop + 1):
            if math.gcd(k, n) == 1:
                out.append((k, n, Fraction(k, n)))
    return sorted(out, key=lambda t: t[2])


# --- witness families ---------------------------------------------------------

def complement_family(size: int, first: int = 1) -> Family:
    """``size`` members over ``first .. first+size-1``; member ``i`` is uniform off atom ``i``."""
    if int(size) != size or size < 2:
        raise DomainError("complement family needs at least two members")
    universe = list(range(first, first + size))
    return Family(
        tuple(f"S{i}" for i in universe),
        tuple(DiscreteDistribution.uniform(universe, [a for a in universe if a != i]) for i in universe),
    )


def witness_complement_family(n: int) -> Family:
    """``n + 1`` members over ``{0..n}``, member ``i`` uniform on ``{0..n} - {i}``; pairwise TV ``1/n``."""
    if int(n) != n or n < 1:
        raise DomainError(f"n must be a positive integer, got {n!r}")
    fam = complement_family(n + 1, first=0)
    return Family(tuple(f"X{i}" for i in range(n + 1)), fam.members)


def witness_perturbed_family(x) -> Family:
    """``n + 1`` members over ``{0..n}`` with ``n = floor(1/x)`` and pairwise TV exactly ``x``.

    Member ``i`` puts ``eps = (1 - n x)/(n + 1)`` on ``i`` and ``x + eps`` on every other atom.
    """
    _check_open_unit(x)
    n = inverse_floor(x)
    x = float(x)
    eps = max((1 - n * x) / (n + 1), 0.0)
    universe = list(range(n + 1))
    members = tuple(
        DiscreteDistribution(universe, [eps if a == i else x + eps for a in universe]) for i in universe
    )
    return Family(tuple(f"X{i}" for i in universe), members)


def set_name(subset: Iterable[int]) -> str:
    return "I" + "_".join(str(e) for e in subset)


def witness_set_family(n: int, k: int) -> Family:
    """One member per ``n``-subset ``I`` of ``{1..n+k}``, uniform on ``I``."""
    if int(n) != n or int(k) != k or not 1 <= k <= n:
        raise DomainError("need integers 1 <= k <= n")
    if math.comb(n + k, k) > MAX_SET_FAMILY:
        raise TooLarge(f"binomial({n + k}, {k}) exceeds {MAX_SET_FAMILY}")
    universe = list(range(1, n + k + 1))
    subsets = list(combinations(universe, n))
    return Family(tuple(set_name(s) for s in subsets), tuple(DiscreteDistribution.uniform(universe, s) for s in subsets))


# --- curve --------------------------------------------------------------------

@dataclass(frozen=True)
class BoundCurve:
    rows: tuple  # (x, F(x), lower(x)) as floats

    def __iter__(self):
        return iter(self.rows)

    def __len__(self):
        return len(self.rows)


def lower_envelope(x):
    return max(lb_all_x(x), lb_pointwise(x))


def emit_bounds_curve(grid: Iterable) -> BoundCurve:
    """Rows ``(x, F(x), max(lb_all_x, lb_pointwise))``; pass Fractions for exact floors."""
    grid = list(grid)
    rows = []
    prev = None
    for x in grid:
        _check_open_unit(x)
        if prev is not None and not x > prev:
            raise DomainError("grid must be strictly increasing")
        prev = x
        f, low = big_f(float(x)), float(lower_envelope(x))
        if low > f + TOL:
            raise AssertionError(f"lower bound {low} exceeds F = {f} at x = {x}")
        rows.append((float(x), f, low))
    return BoundCurve(tuple(rows))


def step_grid(step) -> list[Fraction]:
    """``step, 2 step, ...`` strictly inside (0, 1), as exact decimal fractions."""
    h = Fraction(str(step))
    if not 0 < h < 1:
        raise DomainError("grid step must lie in (0, 1)")
    return [h * j for j in range(1, math.ceil(1 / h)) if h * j < 1]
