"""Partition of the probability simplex on three atoms induced by one coupled draw.

Each point ``a`` of the simplex is a law on ``{0, 1, 2}``. Coupling all of them
with one shared source of randomness assigns every point an atom, which splits
the simplex into three regions. For the clock coupling the regions are convex
quadrilaterals meeting at a pivot; for the race they are only star-shaped, so
they are drawn by evaluating the sampler on a barycentric grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from html import escape

import numpy as np

from .couplings import coupling_ii_indices
from .errors import DomainError
from .randomness import GENERATOR, clocks_for, event_block

UNIVERSE = (0, 1, 2)
MAX_RESOLUTION = 2000
PALETTE = ("#1b9e77", "#d95f02", "#7570b3")
SIZE = 600.0
MARGIN = 20.0
# screen positions of the corners: atom 0 bottom left, 1 bottom right, 2 top
CORNERS = np.array([
    [MARGIN, MARGIN + SIZE * math.sqrt(3) / 2],
    [MARGIN + SIZE, MARGIN + SIZE * math.sqrt(3) / 2],
    [MARGIN + SIZE / 2, MARGIN],
])


@dataclass(frozen=True)
class SimplexRender:
    """``colors[i, j]`` is the atom taken by the law ``(i, j, R - i - j) / R``; -1 off the simplex."""

    resolution: int
    kind: str
    seed: int
    colors: np.ndarray
    pivot: tuple | None = None  # barycentric, clock coupling only
    regions: tuple | None = None  # barycentric polygons, clock coupling only
    svg: str = ""

    def color_at(self, i: int, j: int) -> int:
        return int(self.colors[i, j])

    def region_areas(self) -> np.ndarray:
        """Area fraction of each region: exact for the clock coupling, grid counts otherwise."""
        if self.regions is not None:
            return np.array([polygon_area(poly) for poly in self.regions])
        on = self.colors[self.colors >= 0]
        return np.bincount(on, minlength=3) / on.size


def grid_points(resolution: int) -> tuple[np.ndarray, np.ndarray]:
    """Integer coordinates ``(i, j)`` with ``i + j <= R`` and their barycentric laws."""
    R = resolution
    ii, jj = np.meshgrid(np.arange(R + 1), np.arange(R + 1), indexing="ij")
    keep = ii + jj <= R
    ij = np.column_stack([ii[keep], jj[keep]])
    bary = np.column_stack([ij[:, 0], ij[:, 1], R - ij.sum(axis=1)]) / R
    return ij, bary


def polygon_area(poly) -> float:
    """Area of a barycentric polygon as a fraction of the whole simplex."""
    pts = np.asarray(poly, dtype=float)[:, :2]
    x, y = pts[:, 0], pts[:, 1]
    return float(abs(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))


def clock_regions(clocks) -> tuple[tuple, tuple]:
    """Pivot ``E / sum(E)`` and the region polygons ``[corner_i, Q_k, U, Q_j]``.

    ``Q_k`` lies on the edge opposite corner ``k``, where the boundary between
    the other two regions meets it.
    """
    E = np.asarray(clocks, dtype=float)
    if E.shape != (3,) or not np.all(E > 0):
        raise DomainError("need three positive clocks")
    pivot = E / E.sum()
    eye = np.eye(3)
    Q = []
    for k in range(3):
        q = E.copy()
        q[k] = 0.0
        Q.append(q / q.sum())
    regions = []
    for i in range(3):
        j, k = [m for m in range(3) if m != i]
        regions.append(tuple(tuple(map(float, v)) for v in (eye[i], Q[k], pivot, Q[j])))
    return tuple(map(float, pivot)), tuple(regions)


def race_colors(bary: np.ndarray, seed: int) -> np.ndarray:
    """Atom taken by each law in ``bary`` in the race on stream ``(seed, replicate 0)``."""
    out = np.full(len(bary), -1, dtype=np.int64)
    pending = np.arange(len(bary))
    start = 0
    while pending.size:
        atoms, heights = event_block(3, seed, [0], start, 64)
        for a, h in zip(atoms[0], heights[0]):
            hit = h <= bary[pending, a]
            out[pending[hit]] = a
            pending = pending[~hit]
            if not pending.size:
                break
        start += 64
    return out


def _to_screen(bary) -> np.ndarray:
    return np.asarray(bary, dtype=float) @ CORNERS


def _fmt(v: float) -> str:
    return f"{v:.3f}".rstrip("0").rstrip(".")


def _cell_paths(colors: np.ndarray, R: int) -> list[str]:
    """One ``<path>`` per atom, made of horizontal runs of equal colour."""
    dx = SIZE / R
    dy = SIZE * math.sqrt(3) / 2 / R
    pieces: list[list[str]] = [[], [], []]
    for s in range(R + 1):  # rows of constant third coordinate
        i = np.arange(R - s, -1, -1)
        j = R - s - i
        row = colors[i, j]
        y = CORNERS[0, 1] - s * dy - dy / 2
        x0 = MARGIN + s * dx / 2 - dx / 2
        cut = np.flatnonzero(np.diff(row)) + 1
        for lo, hi in zip(np.r_[0, cut], np.r_[cut, row.size]):
            pieces[row[lo]].append(f"M{_fmt(x0 + lo * dx)} {_fmt(y)}h{_fmt((hi - lo) * dx)}v{_fmt(dy)}h{_fmt(-(hi - lo) * dx)}z")
    return [
        f'<path fill="{PALETTE[c]}" d="{"".join(p)}"/>' for c, p in enumerate(pieces) if p
    ]


def _svg(render: SimplexRender, header: str) -> str:
    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(SIZE + 2 * MARGIN)}" '
        f'height="{_fmt(SIZE * math.sqrt(3) / 2 + 2 * MARGIN)}">',
        f"<desc>{escape(header)}</desc>",
    ]
    if render.regions is not None:
        for c, poly in enumerate(render.regions):
            pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in _to_screen(poly))
            out.append(f'<polygon fill="{PALETTE[c]}" points="{pts}"/>')
        px, py = _to_screen(render.pivot)
        for poly in render.regions:
            qx, qy = _to_screen(poly[1])
            out.append(f'<line x1="{_fmt(px)}" y1="{_fmt(py)}" x2="{_fmt(qx)}" y2="{_fmt(qy)}" stroke="black"/>')
        out.append(f'<circle cx="{_fmt(px)}" cy="{_fmt(py)}" r="4" fill="black"/>')
    else:
        out.extend(_cell_paths(render.colors, render.resolution))
    outline = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in CORNERS)
    out.append(f'<polygon fill="none" stroke="black" points="{outline}"/>')
    for c, (x, y) in enumerate(CORNERS):
        out.append(f'<text x="{_fmt(x)}" y="{_fmt(y + (14 if c < 2 else -4))}" font-size="12">{c}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_simplex(kind: str, seed: int, resolution: int = 60, clocks=None, header: str = "") -> SimplexRender:
    """Colour the simplex by the atom each law takes in one coupled draw.

    ``clocks`` overrides the seeded clocks of the clock coupling.
    """
    if int(resolution) != resolution or not 1 <= resolution <= MAX_RESOLUTION:
        raise DomainError(f"resolution must be an integer in [1, {MAX_RESOLUTION}]")
    R = int(resolution)
    ij, bary = grid_points(R)
    colors = np.full((R + 1, R + 1), -1, dtype=np.int64)
    pivot = regions = None
    if kind == "ii":
        E = clocks_for(UNIVERSE, seed).array if clocks is None else np.asarray(clocks, dtype=float)
        pivot, regions = clock_regions(E)
        colors[ij[:, 0], ij[:, 1]] = coupling_ii_indices(bary, E[None, :])[0]
    elif kind == "i":
        if clocks is not None:
            raise DomainError("clocks apply to the clock coupling only")
        colors[ij[:, 0], ij[:, 1]] = race_colors(bary, seed)
    else:
        raise DomainError(f"render supports couplings 'i' and 'ii', got {kind!r}")
    render = SimplexRender(R, kind, seed, colors, pivot, regions)
    header = header or f"tvcouple render kind={kind} seed={seed} generator={GENERATOR} resolution={R}"
    return SimplexRender(R, kind, seed, colors, pivot, regions, _svg(render, header))
