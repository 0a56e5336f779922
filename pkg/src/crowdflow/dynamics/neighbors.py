"""Fixed-radius k-nearest neighbour search on a uniform hash grid."""
from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, slots=True)
class NeighborSet:
    indices: tuple[int, ...] = ()
    distances: tuple[float, ...] = ()

    def __len__(self) -> int:
        return len(self.indices)


EMPTY = NeighborSet()


class SpatialHash:
    """Buckets points into square cells of side ``cell``.

    A query of radius ``<= cell`` only needs the 3x3 block of cells around
    the query point, which makes the search exact.
    """

    def __init__(self, cell: float):
        self.cell = float(cell)
        self.buckets: dict[tuple[int, int], list[int]] = defaultdict(list)
        self.points: dict[int, tuple[float, float]] = {}

    def key(self, x: float, y: float) -> tuple[int, int]:
        return math.floor(x / self.cell), math.floor(y / self.cell)

    def insert(self, idx: int, x: float, y: float) -> None:
        self.points[idx] = (x, y)
        self.buckets[self.key(x, y)].append(idx)

    def candidates(self, x: float, y: float):
        cx, cy = self.key(x, y)
        for dx in (-1, 0, 1):
            for dy in (-1, 0, 1):
                yield from self.buckets.get((cx + dx, cy + dy), ())


def build_neighbor_index(particles, h: float, k_cap: int) -> list[NeighborSet]:
    """Up to ``k_cap`` nearest alive neighbours within distance ``h`` of each particle.

    Returns one ``NeighborSet`` per input particle (dead particles get an
    empty set). Neighbours are sorted by distance, ties by particle id, and
    reported by particle id. Queries are batched per grid cell: every
    particle in a cell is compared against the 3x3 block around it at once.
    """
    if not h > 0:
        raise ValueError(f"neighbour radius must be positive, got {h}")
    grid = SpatialHash(h)
    slot = {}
    for i, p in enumerate(particles):
        if p.alive:
            grid.insert(p.id, p.pos.x, p.pos.y)
            slot[p.id] = i

    out = [EMPTY] * len(particles)
    for (cx, cy), members in grid.buckets.items():
        cand = np.array([j for dx in (-1, 0, 1) for dy in (-1, 0, 1)
                         for j in grid.buckets.get((cx + dx, cy + dy), ())], dtype=np.int64)
        cpts = np.array([grid.points[j] for j in cand], dtype=np.float64)
        for i in members:
            qx, qy = grid.points[i]
            d = np.hypot(cpts[:, 0] - qx, cpts[:, 1] - qy)
            keep = (d <= h) & (cand != i)
            dk, jk = d[keep], cand[keep]
            order = np.lexsort((jk, dk))[:k_cap]
            out[slot[i]] = NeighborSet(tuple(int(j) for j in jk[order]),
                                       tuple(float(x) for x in dk[order]))
    return out
