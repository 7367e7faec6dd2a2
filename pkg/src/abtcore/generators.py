"""Seeded synthetic bipartite graphs for tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .graph import BipartiteGraph


def _pairs_from_cells(cells: np.ndarray, width: int) -> list[tuple[int, int]]:
    return [(int(c // width), int(c % width)) for c in cells]


def random_bipartite(upper: int, lower: int, m: int, seed: int) -> BipartiteGraph:
    """``m`` distinct edges drawn uniformly from the ``upper x lower`` grid
    (isolated vertices are dropped, so the counts may shrink)."""
    rng = np.random.default_rng(seed)
    m = min(m, upper * lower)
    cells = rng.choice(upper * lower, size=m, replace=False) if m else np.empty(0, dtype=np.int64)
    return _compact(_pairs_from_cells(cells, lower))


def planted_communities(
    upper: int,
    lower: int,
    communities: int,
    p_in: float | tuple[float, float],
    noise_edges: int,
    seed: int,
) -> BipartiteGraph:
    """Dense blocks on a sparse background.

    Vertices are split into ``communities`` contiguous groups per layer; the
    block between upper group ``i`` and lower group ``i`` gets edge density
    ``p_in`` (or a density drawn uniformly from the ``(lo, hi)`` range), and
    ``noise_edges`` uniform edges are added across the whole grid.
    """
    rng = np.random.default_rng(seed)
    ub = np.linspace(0, upper, communities + 1).astype(int)
    lb = np.linspace(0, lower, communities + 1).astype(int)
    edges: set[tuple[int, int]] = set()
    for i in range(communities):
        u0, u1, l0, l1 = ub[i], ub[i + 1], lb[i], lb[i + 1]
        w = l1 - l0
        size = (u1 - u0) * w
        if size == 0:
            continue
        p = p_in if isinstance(p_in, (int, float)) else rng.uniform(*p_in)
        k = int(rng.binomial(size, p))
        for c in rng.choice(size, size=k, replace=False):
            edges.add((int(u0 + c // w), int(l0 + c % w)))
    if noise_edges:
        us = rng.integers(0, upper, size=noise_edges)
        ls = rng.integers(0, lower, size=noise_edges)
        edges.update(zip(us.tolist(), ls.tolist()))
    return _compact(sorted(edges))


def _compact(pairs: list[tuple[int, int]]) -> BipartiteGraph:
    ups = sorted({u for u, _ in pairs})
    lows = sorted({v for _, v in pairs})
    um = {u: i for i, u in enumerate(ups)}
    lm = {v: i for i, v in enumerate(lows)}
    return BipartiteGraph(
        len(ups),
        len(lows),
        [(um[u], lm[v]) for u, v in pairs],
        upper_labels=ups,
        lower_labels=lows,
    )
