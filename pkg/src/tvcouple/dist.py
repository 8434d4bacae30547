"""Finite distributions, families of them, and total-variation quantities.

Atoms are opaque labels (ints, floats or strings). A universe is always kept in
canonical order: numerically when every label parses as a number, otherwise
lexicographically by ``str``. That order is the tie-break used everywhere else
in the package.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, EmptyUniverse, GridOverflow, InvalidCdf, UniverseMismatch, UnknownMember

SUM_TOL = 1e-9
MAX_GRID = 10**7


def _as_number(label):
    if isinstance(label, bool):
        return None
    if isinstance(label, (int, float)):
        return float(label)
    try:
        return float(label)
    except (TypeError, ValueError):
        return None


def canonical_universe(labels: Iterable) -> tuple:
    labels = list(labels)
    if not labels:
        raise EmptyUniverse("universe has no atoms")
    if len({str(a) for a in labels}) != len(labels):
        raise DomainError(f"duplicate atom labels in {labels!r}")
    nums = [_as_number(a) for a in labels]
    if all(v is not None and not math.isnan(v) for v in nums):
        order = sorted(range(len(labels)), key=lambda i: (nums[i], str(labels[i])))
    else:
        order = sorted(range(len(labels)), key=lambda i: str(labels[i]))
    return tuple(labels[i] for i in order)


class DiscreteDistribution:
    """Probability vector over a canonical universe.

    ``probs`` is either a mapping label -> probability (missing labels are 0)
    or a sequence aligned with the canonical order of ``universe``. The input
    must sum to 1 within 1e-9 and is then divided by its sum.
    """

    __slots__ = ("universe", "p", "_index")

    def __init__(self, universe: Iterable, probs: Mapping | Sequence[float]):
        universe = canonical_universe(universe)
        index = {str(a): i for i, a in enumerate(universe)}
        if isinstance(probs, Mapping):
            p = np.zeros(len(universe))
            for label, value in probs.items():
                i = index.get(str(label))
                if i is None:
                    if value != 0:
                        raise DomainError(f"atom {label!r} with positive mass is outside the universe")
                    continue
                p[i] += float(value)
        else:
            p = np.array(probs, dtype=float)
            if p.shape != (len(universe),):
                raise DomainError(f"expected {len(universe)} probabilities, got shape {p.shape}")
        if not np.all(np.isfinite(p)) or np.any(p < 0):
            raise DomainError("probabilities must be finite and nonnegative")
        total = p.sum()
        if abs(total - 1.0) > SUM_TOL:
            raise DomainError(f"probabilities sum to {total!r}, not 1")
        p = p / total
        p.flags.writeable = False
        self.universe = universe
        self.p = p
        self._index = index

    def __repr__(self):
        body = ", ".join(f"{a!r}: {v:.6g}" for a, v in zip(self.universe, self.p) if v > 0)
        return f"DiscreteDistribution({{{body}}})"

    def __eq__(self, other):
        return (
            isinstance(other, DiscreteDistribution)
            and self.universe == other.universe
            and np.array_equal(self.p, other.p)
        )

    def __hash__(self):
        return hash((self.universe, self.p.tobytes()))

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise DomainError(f"atom {label!r} not in universe") from None

    def prob(self, label) -> float:
        return float(self.p[self.index(label)])

    def as_dict(self, drop_zero: bool = True) -> dict:
        return {a: float(v) for a, v in zip(self.universe, self.p) if v > 0 or not drop_zero}

    @property
    def support(self) -> tuple:
        return tuple(a for a, v in zip(self.universe, self.p) if v > 0)

    def on(self, universe: Iterable) -> "DiscreteDistribution":
        """The same law embedded in a larger universe (extra atoms get mass 0)."""
        universe = canonical_universe(universe)
        keys = {str(a) for a in universe}
        missing = [a for a in self.support if str(a) not in keys]
        if missing:
            raise UniverseMismatch(f"atoms {missing!r} are not in the target universe")
        return DiscreteDistribution(universe, self.as_dict())

    @classmethod
    def point_mass(cls, universe: Iterable, label) -> "DiscreteDistribution":
        return cls(universe, {label: 1.0})

    @classmethod
    def uniform(cls, universe: Iterable, support: Iterable | None = None) -> "DiscreteDistribution":
        universe = canonical_universe(universe)
        support = list(universe if support is None else support)
        return cls(universe, {a: 1.0 / len(support) for a in support})


def check_shared(p: DiscreteDistribution, q: DiscreteDistribution) -> None:
    if p.universe != q.universe:
        raise UniverseMismatch(f"universes differ: {p.universe!r} vs {q.universe!r}")


def tv_distance(p: DiscreteDistribution, q: DiscreteDistribution) -> float:
    check_shared(p, q)
    # rounding can push disjoint supports a few ulps past 1
    return min(float(0.5 * np.abs(p.p - q.p).sum()), 1.0)


def overlap_sums(p: DiscreteDistribution, q: DiscreteDistribution) -> tuple[float, float]:
    """``(sum_u min(p_u, q_u), sum_u max(p_u, q_u))``, i.e. ``(1 - tv, 1 + tv)``."""
    check_shared(p, q)
    return float(np.minimum(p.p, q.p).sum()), float(np.maximum(p.p, q.p).sum())


@dataclass(frozen=True)
class Family:
    """Named distributions on one universe, in a fixed order."""

    names: tuple
    members: tuple
    universe: tuple = field(init=False)

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        members = tuple(self.members)
        if not members:
            raise DomainError("a family needs at least one member")
        if len(names) != len(members):
            raise DomainError("names and members differ in length")
        if len(set(names)) != len(names):
            raise DomainError(f"duplicate member names in {names!r}")
        universe = members[0].universe
        for m in members:
            if m.universe != universe:
                raise UniverseMismatch("family members must share a universe")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "members", members)
        object.__setattr__(self, "universe", universe)

    @classmethod
    def aligned(cls, named: Mapping[str, DiscreteDistribution] | Sequence[tuple[str, DiscreteDistribution]]):
        """Build a family from members on possibly different universes, using their union."""
        items = list(named.items()) if isinstance(named, Mapping) else list(named)
        labels = {}
        for _, d in items:
            for a in d.universe:
                labels.setdefault(str(a), a)
        universe = canonical_universe(labels.values())
        return cls(tuple(n for n, _ in items), tuple(d.on(universe) for _, d in items))

    @classmethod
    def from_tables(cls, universe: Iterable, tables: Mapping[str, Mapping | Sequence[float]]) -> "Family":
        universe = canonical_universe(universe)
        return cls(tuple(tables), tuple(DiscreteDistribution(universe, t) for t in tables.values()))

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(zip(self.names, self.members))

    def __getitem__(self, name: str) -> DiscreteDistribution:
        return self.members[self.position(name)]

    def position(self, name: str) -> int:
        try:
            return self.names.index(str(name))
        except ValueError:
            raise UnknownMember(f"no member named {name!r}") from None

    def matrix(self) -> np.ndarray:
        """Members stacked row-wise, shape ``(len(family), len(universe))``."""
        return np.vstack([m.p for m in self.members])

    def subfamily(self, names: Iterable[str]) -> "Family":
        names = list(names)
        return Family(tuple(names), tuple(self[n] for n in names))

    def to_dict(self) -> dict:
        return {
            "universe": [str(a) for a in self.universe],
            "variables": [
                {"name": n, "probs": {str(a): v for a, v in m.as_dict().items()}} for n, m in self
            ],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_dict(cls, data: Mapping) -> "Family":
        try:
            universe = [str(a) for a in data["universe"]]
            variables = data["variables"]
            tables = {str(v["name"]): {str(k): float(x) for k, x in v["probs"].items()} for v in variables}
        except (KeyError, TypeError, AttributeError) as exc:
            raise DomainError(f"malformed family document: {exc}") from None
        if len(tables) != len(variables):
            raise DomainError("duplicate variable names")
        return cls.from_tables(universe, tables)

    @classmethod
    def load(cls, path) -> "Family":
        with open(path) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{path}: invalid JSON ({exc})") from None
        return cls.from_dict(data)


# --- discretization of real-valued laws --------------------------------------

def _normal_cdf(mean: float, sd: float) -> Callable:
    scale = sd * math.sqrt(2.0)
    erfc = np.vectorize(math.erfc, otypes=[float])
    return lambda x: 0.5 * erfc(-(np.asarray(x, dtype=float) - mean) / scale)


@dataclass(frozen=True)
class CdfSpec:
    """A right-continuous CDF together with an interval holding (almost) all of its mass.

    Set ``vectorized`` when ``evaluator`` accepts numpy arrays.
    """

    evaluator: Callable
    lo: float
    hi: float
    vectorized: bool = False

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.vectorized:
            return np.asarray(self.evaluator(x), dtype=float).reshape(x.shape)
        return np.array([float(self.evaluator(v)) for v in x.ravel()]).reshape(x.shape)

    @classmethod
    def normal(cls, mean: float = 0.0, sd: float = 1.0, width: float = 12.0) -> "CdfSpec":
        return cls(_normal_cdf(mean, sd), mean - width * sd, mean + width * sd, vectorized=True)

    @classmethod
    def uniform(cls, a: float = 0.0, b: float = 1.0) -> "CdfSpec":
        return cls(lambda x: np.clip((np.asarray(x, dtype=float) - a) / (b - a), 0.0, 1.0), a, b, vectorized=True)

    @classmethod
    def point_mass(cls, x0: float) -> "CdfSpec":
        return cls(lambda x: (np.asarray(x, dtype=float) >= x0).astype(float), x0, x0, vectorized=True)


def _decimal(x: float) -> Fraction:
    return Fraction(repr(float(x)))


def discretize(spec: CdfSpec, epsilon: float) -> DiscreteDistribution:
    """Round a real law down to the grid ``epsilon * Z``.

    Cell ``k`` collects the mass of ``[k*eps, (k+1)*eps)``; the first cell also
    takes everything below it and the last everything above it. Left limits of
    the CDF are taken one ulp below each grid point, so an atom sitting exactly
    on a grid point stays in the cell that starts there. Grid points are the
    doubles nearest to ``k * eps`` with ``eps`` read as its shortest decimal.
    Empty cells at either end of the grid are dropped.
    """
    if not (epsilon > 0 and math.isfinite(epsilon)):
        raise DomainError("epsilon must be positive and finite")
    if not (math.isfinite(spec.lo) and math.isfinite(spec.hi)) or spec.hi < spec.lo:
        raise DomainError("support bounds must be finite with lo <= hi")
    if (spec.hi - spec.lo) / epsilon > MAX_GRID:
        raise GridOverflow(f"(hi - lo)/epsilon exceeds {MAX_GRID}")
    eps = _decimal(epsilon)
    k0 = math.floor(_decimal(spec.lo) / eps)
    k1 = math.floor(_decimal(spec.hi) / eps)
    points = np.array([float(k * eps) for k in range(k0, k1 + 2)])

    if spec(np.array([spec.lo]))[0] < 0:
        raise InvalidCdf("CDF is negative at the lower bound")
    if abs(spec(np.array([spec.hi]))[0] - 1.0) > SUM_TOL:
        raise InvalidCdf("CDF does not reach 1 at the upper bound")
    left = spec(np.nextafter(points, -np.inf))
    if np.any(left < -1e-12) or np.any(left > 1 + 1e-12) or np.any(np.diff(left) < -1e-12):
        raise InvalidCdf("CDF is not a nondecreasing map into [0, 1] on the grid")
    left = np.clip(np.maximum.accumulate(left), 0.0, 1.0)

    # masses of [x_k, x_{k+1}) for k0..k1; the extra point closes the last cell
    mass = np.diff(left)
    mass[0] += left[0]
    mass[-1] += 1.0 - left[-1]
    atoms = points[:-1]
    keep = np.flatnonzero(mass > 1e-12)
    if keep.size == 0:
        raise InvalidCdf("no mass on the grid")
    sl = slice(keep[0], keep[-1] + 1)
    mass, atoms = mass[sl], atoms[sl]
    return DiscreteDistribution(atoms.tolist(), mass / mass.sum())


def discretized_tv(a: CdfSpec, b: CdfSpec, epsilon: float) -> float:
    """TV distance between the ``epsilon``-discretizations of two laws."""
    fam = Family.aligned([("a", discretize(a, epsilon)), ("b", discretize(b, epsilon))])
    return tv_distance(*fam.members)
