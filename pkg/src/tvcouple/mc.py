"""Monte Carlo disagreement frequencies with binomial error bars."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .couplings import sample_indices
from .dist import Family
from .errors import DomainError

MIN_REPLICATES = 1000


@dataclass(frozen=True)
class McEstimate:
    event: str  # member names joined by "|": the event "not all equal"
    estimate: float
    stderr: float  # sqrt(p(1-p)/N) at the point estimate
    n: int
    seed: int


def event_label(names: Sequence[str]) -> str:
    return "|".join(names)


def disagreement_frequencies(idx: np.ndarray, positions: Sequence[Sequence[int]]) -> list[float]:
    """Fraction of rows of ``idx`` where the listed columns are not all equal."""
    out = []
    for cols in positions:
        block = idx[:, list(cols)]
        out.append(float((block != block[:, :1]).any(axis=1).mean()))
    return out


def mc_estimate(family: Family, kind: str, events: Sequence[Sequence[str]], n: int, seed: int, start: int = 0) -> list[McEstimate]:
    """Estimate ``P(not all equal)`` for each tuple of member names in ``events``.

    Replicates ``start .. start+n-1`` are the coupled draws of ``kind`` under
    ``seed``; every event is read off the same draws.
    """
    if n < MIN_REPLICATES:
        raise DomainError(f"need at least {MIN_REPLICATES} replicates, got {n}")
    events = [tuple(e) for e in events]
    if any(len(e) < 2 for e in events):
        raise DomainError("each event needs at least two members")
    positions = [[family.position(name) for name in e] for e in events]
    idx = sample_indices(family, kind, n, seed, start)
    out = []
    for e, p in zip(events, disagreement_frequencies(idx, positions)):
        out.append(McEstimate(event_label(e), p, math.sqrt(p * (1 - p) / n), n, seed))
    return out


def atom_frequencies(family: Family, kind: str, n: int, seed: int, start: int = 0) -> np.ndarray:
    """Empirical marginal of every member, shape ``(members, atoms)``."""
    idx = sample_indices(family, kind, n, seed, start)
    size = len(family.universe)
    return np.stack([np.bincount(idx[:, i], minlength=size) / n for i in range(len(family))])
