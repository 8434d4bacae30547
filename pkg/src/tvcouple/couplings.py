"""Samplers that couple every member of a family on one source of randomness.

* Coupling I (Poisson race): events ``(atom, height)`` arrive in time order and
  a member takes the atom of the first event whose height is at most its
  probability of that atom.
* Coupling II (exponential clocks): a member with law ``p`` takes
  ``argmin_u E_u / p_u`` over atoms with ``p_u > 0``.
* Star coupling: a uniformly chosen pivot member is sampled, and every other
  member is maximally coupled to it.

Each sampler has a single-sample form taking an explicit randomness object and
a batched form (``sample_indices``) used for Monte Carlo. For a given seed and
replicate number both forms return the same values.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dist import Family
from .errors import DomainError, ExhaustedStream, UniverseMismatch
from .randomness import (
    ClockTable,
    PoissonEvent,
    PoissonStream,
    clock_matrix,
    clocks_for,
    derive_key,
    event_block,
    uniform_block,
)

KINDS = ("i", "ii", "star")
_CHUNK = 20_000


@dataclass(frozen=True)
class SampleVector:
    values: dict
    kind: str
    seed: int | None = None
    replicate: int | None = None

    def __getitem__(self, name):
        return self.values[name]


def _vector(family: Family, idx, kind, seed, replicate) -> SampleVector:
    return SampleVector({n: family.universe[int(i)] for n, i in zip(family.names, idx)}, kind, seed, replicate)


# --- Coupling II --------------------------------------------------------------

def coupling_ii_indices(P: np.ndarray, clocks: np.ndarray) -> np.ndarray:
    """Atom index chosen by each member for each row of clocks.

    ``P`` is ``(members, atoms)``, ``clocks`` is ``(reps, atoms)``; returns
    ``(reps, members)``. Zero-probability atoms get ratio ``+inf``; ``argmin``
    keeps the first minimizer, which is the smallest label.
    """
    with np.errstate(divide="ignore"):
        inv = np.where(P > 0, 1.0 / P, np.inf)
    out = np.empty((clocks.shape[0], P.shape[0]), dtype=np.int64)
    for s in range(0, clocks.shape[0], _CHUNK):
        block = clocks[s:s + _CHUNK, None, :] * inv[None, :, :]
        out[s:s + _CHUNK] = block.argmin(axis=2)
    return out


def sample_coupling_ii(family: Family, clocks: ClockTable) -> SampleVector:
    if tuple(map(str, clocks.universe)) != tuple(map(str, family.universe)):
        raise UniverseMismatch("clock table and family use different universes")
    idx = coupling_ii_indices(family.matrix(), clocks.array[None, :])[0]
    return _vector(family, idx, "ii", clocks.seed, clocks.replicate)


# --- Coupling I ---------------------------------------------------------------

def _as_event(ev) -> PoissonEvent:
    if isinstance(ev, PoissonEvent):
        return ev
    time, atom, height = ev
    return PoissonEvent(float(time), atom, float(height), -1)


def sample_coupling_i(family: Family, stream: PoissonStream | Iterable, max_events: int) -> SampleVector:
    """Run the race on ``stream`` (a PoissonStream or any time-ordered events).

    Raises ExhaustedStream if some member is still unassigned after
    ``max_events`` events; replay a fresh stream with a larger budget.
    """
    if max_events < 1:
        raise DomainError("max_events must be at least 1")
    if isinstance(stream, PoissonStream) and tuple(map(str, stream.universe)) != tuple(map(str, family.universe)):
        raise UniverseMismatch("stream and family use different universes")
    P = family.matrix()
    values: list = [None] * len(family)
    pending = len(family)
    last_time = -np.inf
    events = iter(stream)
    for _ in range(max_events):
        try:
            ev = _as_event(next(events))
        except StopIteration:
            break
        if not ev.time > last_time:
            raise DomainError("events must arrive in strictly increasing time")
        last_time = ev.time
        j = family.members[0].index(ev.atom)
        for i in range(len(values)):
            if values[i] is None and ev.height <= P[i, j]:
                values[i] = j
                pending -= 1
        if pending == 0:
            seed = getattr(stream, "seed", None)
            rep = getattr(stream, "replicate", None)
            return _vector(family, values, "i", seed, rep)
    raise ExhaustedStream(f"{pending} member(s) unassigned after {max_events} events")


def sample_coupling_i_retrying(family: Family, seed: int, replicate: int = 0, budget: int | None = None) -> SampleVector:
    """Coupling I with a budget of ``64 * |U|`` events, doubled until it suffices."""
    budget = budget or 64 * len(family.universe)
    while True:
        try:
            return sample_coupling_i(family, PoissonStream(family.universe, seed, replicate), budget)
        except ExhaustedStream:
            budget *= 2


def coupling_i_indices(P: np.ndarray, seed: int, replicates: np.ndarray, max_events: int = 1 << 24) -> np.ndarray:
    """Batched Coupling I; replicate ``r`` reads the stream ``PoissonStream(U, seed, r)``."""
    m, size = P.shape
    replicates = np.asarray(replicates, dtype=np.int64)
    out = np.full((len(replicates), m), -1, dtype=np.int64)
    for s in range(0, len(replicates), _CHUNK):
        rows = np.arange(s, min(s + _CHUNK, len(replicates)))
        start, block = 0, 2 * size
        while rows.size:
            if start >= max_events:
                raise ExhaustedStream(f"replicates unassigned after {max_events} events")
            atoms, heights = event_block(size, seed, replicates[rows], start, block)
            for i in range(m):
                todo = out[rows, i] < 0
                if not todo.any():
                    continue
                acc = heights[todo] <= P[i][atoms[todo]]
                hit = acc.any(axis=1)
                first = acc.argmax(axis=1)
                chosen = atoms[todo][np.arange(first.size), first]
                target = rows[todo][hit]
                out[target, i] = chosen[hit]
            rows = rows[(out[rows] < 0).any(axis=1)]
            start += block
            block = min(block * 2, 1024 * size)
    return out


# --- star coupling ------------------------------------------------------------

def _inverse_cdf(weights: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Row-wise inverse CDF; never lands on a zero-weight atom."""
    cum = np.cumsum(weights, axis=1)
    idx = (cum <= (u * cum[:, -1])[:, None]).sum(axis=1)
    last = weights.shape[1] - 1 - np.argmax(weights[:, ::-1] > 0, axis=1)
    return np.minimum(idx, last)


def star_indices(P: np.ndarray, seed: int, replicates: np.ndarray) -> np.ndarray:
    """Batched star coupling; one uniform column per decision, keyed on ``(seed, "star")``."""
    m, size = P.shape
    key = derive_key(seed, "star")
    out = np.empty((len(replicates), m), dtype=np.int64)
    for s in range(0, len(replicates), _CHUNK):
        reps = np.asarray(replicates[s:s + _CHUNK], dtype=np.int64)
        u = uniform_block(key, reps, np.arange(2 + 2 * m))
        pivot = np.minimum((u[:, 0] * m).astype(np.int64), m - 1)
        x = _inverse_cdf(P[pivot], u[:, 1])
        block = np.empty((len(reps), m), dtype=np.int64)
        for i in range(m):
            pk = P[pivot, x]
            keep = u[:, 2 + 2 * i] * pk < np.minimum(P[i, x], pk)
            resid = np.maximum(P[i][None, :] - P[pivot], 0.0)
            y = x.copy()
            move = ~keep & (resid.sum(axis=1) > 0)
            if move.any():
                y[move] = _inverse_cdf(resid[move], u[move, 3 + 2 * i])
            block[:, i] = y
        block[np.arange(len(reps)), pivot] = x
        out[s:s + _CHUNK] = block
    return out


def sample_star_coupling(family: Family, seed: int, replicate: int = 0) -> SampleVector:
    idx = star_indices(family.matrix(), seed, np.array([replicate]))[0]
    return _vector(family, idx, "star", seed, replicate)


# --- batched front end --------------------------------------------------------

def sample_indices(family: Family, kind: str, n: int, seed: int, start: int = 0) -> np.ndarray:
    """Atom indices for replicates ``start .. start+n-1``, shape ``(n, len(family))``."""
    P = family.matrix()
    reps = np.arange(start, start + n)
    if kind == "ii":
        return coupling_ii_indices(P, clock_matrix(family.universe, seed, n, start))
    if kind == "i":
        return coupling_i_indices(P, seed, reps)
    if kind == "star":
        return star_indices(P, seed, reps)
    raise DomainError(f"unknown coupling kind {kind!r}; expected one of {KINDS}")


def sample(family: Family, kind: str, seed: int, replicate: int = 0) -> SampleVector:
    """One coupled draw using the single-sample code path of ``kind``."""
    if kind == "ii":
        return sample_coupling_ii(family, clocks_for(family.universe, seed, replicate))
    if kind == "i":
        return sample_coupling_i_retrying(family, seed, replicate)
    if kind == "star":
        return sample_star_coupling(family, seed, replicate)
    raise DomainError(f"unknown coupling kind {kind!r}; expected one of {KINDS}")
