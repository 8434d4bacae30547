"""Shared randomness: per-atom exponential clocks and a marked Poisson stream.

Every random number is a pure function of ``(seed, tag, label, replicate,
index)``. A BLAKE2b-64 digest of ``(seed, tag, label)`` gives a key; the
replicate selects a SplitMix64 sub-stream of that key and the index a position
in it::

    state_r = mix64(key + GOLDEN * (replicate + 1))
    word    = mix64(state_r + GOLDEN * (index + 1))
    uniform = ((word >> 12) + 0.5) * 2**-52          # strictly inside (0, 1)

``mix64`` is the SplitMix64 output finalizer. The scalar (pure ``int``) and
batched (numpy ``uint64``) paths produce bit-identical values.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field

import numpy as np

from .dist import canonical_universe
from .errors import DomainError, EmptyUniverse

GENERATOR = "splitmix64/blake2b-64"
MASK = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def parse_seed(text) -> int:
    """Accept ints or decimal / ``0x`` hex strings in ``[0, 2**64)``."""
    try:
        seed = int(text, 0) if isinstance(text, str) else int(text)
    except (TypeError, ValueError):
        raise DomainError(f"bad seed {text!r}") from None
    if not 0 <= seed <= MASK:
        raise DomainError(f"seed {seed} outside [0, 2**64)")
    return seed


def derive_key(seed: int, tag: str, label="") -> int:
    seed = parse_seed(seed)
    h = hashlib.blake2b(digest_size=8)
    h.update(seed.to_bytes(8, "little"))
    h.update(b"\x1f" + tag.encode() + b"\x1f" + str(label).encode())
    return int.from_bytes(h.digest(), "little")


def mix64(x: int) -> int:
    x &= MASK
    x = ((x ^ (x >> 30)) * _M1) & MASK
    x = ((x ^ (x >> 27)) * _M2) & MASK
    return x ^ (x >> 31)


def _mix64_np(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> np.uint64(30))
    x = x * np.uint64(_M1)
    x = x ^ (x >> np.uint64(27))
    x = x * np.uint64(_M2)
    return x ^ (x >> np.uint64(31))


def uniform(key: int, replicate: int, index: int) -> float:
    state = mix64(key + GOLDEN * (replicate + 1))
    word = mix64(state + GOLDEN * (index + 1))
    return ((word >> 12) + 0.5) * 2.0**-52


def uniform_block(key: int, replicates, indices) -> np.ndarray:
    """Uniforms for every (replicate, index) pair, shape ``(len(replicates), len(indices))``."""
    r = np.asarray(replicates, dtype=np.uint64).reshape(-1, 1)
    k = np.asarray(indices, dtype=np.uint64).reshape(1, -1)
    g = np.uint64(GOLDEN)
    state = _mix64_np(np.uint64(key) + g * (r + np.uint64(1)))
    word = _mix64_np(state + g * (k + np.uint64(1)))
    return ((word >> np.uint64(12)).astype(np.float64) + 0.5) * 2.0**-52


# --- exponential clocks -------------------------------------------------------

@dataclass(frozen=True)
class ClockTable:
    """One Exp(1) clock per atom, aligned with the canonical universe."""

    universe: tuple
    clocks: tuple
    seed: int
    replicate: int = 0

    def __getitem__(self, label) -> float:
        for a, c in zip(self.universe, self.clocks):
            if str(a) == str(label):
                return c
        raise DomainError(f"atom {label!r} not in universe")

    @property
    def array(self) -> np.ndarray:
        return np.array(self.clocks)


def clocks_for(universe, seed: int, replicate: int = 0) -> ClockTable:
    """Clock of atom ``u`` is ``-log(U)`` with ``U`` keyed on ``(seed, "clock", label)``.

    Keying on the label (not the position) makes a clock independent of the
    rest of the universe.
    """
    universe = canonical_universe(universe) if universe else ()
    if not universe:
        raise EmptyUniverse("clocks need a nonempty universe")
    clocks = tuple(float(-np.log(uniform(derive_key(seed, "clock", a), replicate, 0))) for a in universe)
    return ClockTable(universe, clocks, parse_seed(seed), replicate)


def clock_matrix(universe, seed: int, n: int, start: int = 0) -> np.ndarray:
    """Clocks for replicates ``start .. start+n-1`` as an ``(n, |U|)`` array."""
    universe = canonical_universe(universe) if universe else ()
    if not universe:
        raise EmptyUniverse("clocks need a nonempty universe")
    reps = np.arange(start, start + n, dtype=np.uint64)
    cols = [uniform_block(derive_key(seed, "clock", a), reps, [0])[:, 0] for a in universe]
    return -np.log(np.column_stack(cols))


# --- marked Poisson stream ----------------------------------------------------

@dataclass(frozen=True)
class PoissonEvent:
    time: float
    atom: object
    height: float
    index: int


@dataclass
class PoissonStream:
    """Events at rate ``|U|`` with uniform atom and uniform height in ``(0, 1)``.

    Event ``k`` draws its inter-arrival gap, atom and height from three keyed
    sub-streams at index ``k``; the cursor only accumulates time.
    """

    universe: tuple
    seed: int
    replicate: int = 0
    _count: int = field(default=0, repr=False)
    _time: float = field(default=0.0, repr=False)

    def __post_init__(self):
        self.universe = canonical_universe(self.universe) if self.universe else ()
        if not self.universe:
            raise EmptyUniverse("a stream needs a nonempty universe")
        self.seed = parse_seed(self.seed)
        self._keys = stream_keys(self.seed)

    def next_event(self) -> PoissonEvent:
        k, r, size = self._count, self.replicate, len(self.universe)
        gap = float(-np.log(uniform(self._keys[0], r, k))) / size
        atom_idx = min(int(uniform(self._keys[1], r, k) * size), size - 1)
        height = uniform(self._keys[2], r, k)
        self._time += gap
        self._count += 1
        return PoissonEvent(self._time, self.universe[atom_idx], height, k)

    def __iter__(self):
        while True:
            yield self.next_event()

    @property
    def consumed(self) -> int:
        return self._count


def stream_keys(seed: int) -> tuple[int, int, int]:
    return tuple(derive_key(seed, "stream", part) for part in ("time", "atom", "height"))


def event_block(universe_size: int, seed: int, replicates, start: int, length: int):
    """Atom indices and heights of events ``start .. start+length-1`` per replicate."""
    keys = stream_keys(seed)
    idx = np.arange(start, start + length, dtype=np.uint64)
    atoms = np.minimum((uniform_block(keys[1], replicates, idx) * universe_size).astype(np.int64), universe_size - 1)
    heights = uniform_block(keys[2], replicates, idx)
    return atoms, heights


def event_times(universe_size: int, seed: int, replicate: int, length: int) -> np.ndarray:
    gaps = -np.log(uniform_block(stream_keys(seed)[0], [replicate], np.arange(length))[0]) / universe_size
    return np.cumsum(gaps)
