"""Core indexes and their query algorithms.

A :class:`Chain` is the per-(alpha, beta) tau level plus its vertex blocks:
blocks sorted by ascending key, each holding the vertices whose maximal key
equals the block key, and ``ptr[t-1]`` naming the first block with key >= t.
Walking from ``ptr[t-1]`` to the end yields exactly the core for ``t``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Mapping, Sequence

from .decomposition import DecompResult, decompose_optimized
from .graph import BipartiteGraph, Subgraph
from .peeling import PeelState, online_core

KINDS = ("total", "ab", "bt", "at")


@dataclass
class Chain:
    keys: list[int] = field(default_factory=list)
    blocks: list[tuple[int, ...]] = field(default_factory=list)
    ptr: list[int] = field(default_factory=list)

    @classmethod
    def from_levels(cls, levels: Mapping[int, int]) -> "Chain":
        """Build from ``{vertex: maximal key}`` (keys >= 1)."""
        groups: dict[int, list[int]] = {}
        for x, k in levels.items():
            groups.setdefault(k, []).append(x)
        keys = sorted(groups)
        blocks = [tuple(sorted(groups[k])) for k in keys]
        ptr: list[int] = []
        i = 0
        for t in range(1, (keys[-1] if keys else 0) + 1):
            while keys[i] < t:
                i += 1
            ptr.append(i)
        return cls(keys, blocks, ptr)

    @property
    def depth(self) -> int:
        return len(self.ptr)

    def walk(self, t: int) -> Iterator[tuple[int, tuple[int, ...]]]:
        """Blocks from the one referenced by ``t`` to the end, ascending key."""
        if t < 1 or t > len(self.ptr):
            return
        for i in range(self.ptr[t - 1], len(self.blocks)):
            yield self.keys[i], self.blocks[i]

    def collect(self, t: int) -> list[int]:
        out: list[int] = []
        for _, blk in self.walk(t):
            out.extend(blk)
        return out

    def levels(self) -> dict[int, int]:
        return {x: k for k, blk in zip(self.keys, self.blocks) for x in blk}


class TotalIndex:
    """Four-level index: ``levels[alpha-1][beta-1]`` is the tau chain of (alpha, beta)."""

    kind = "total"

    def __init__(self, upper_count: int, levels: list[list[Chain]]):
        self.upper_count = upper_count
        self.levels = levels

    @property
    def alpha_max(self) -> int:
        return len(self.levels)

    def chain(self, alpha: int, beta: int) -> Chain | None:
        if not (1 <= alpha <= len(self.levels)):
            return None
        row = self.levels[alpha - 1]
        if not (1 <= beta <= len(row)):
            return None
        return row[beta - 1]

    def size_cells(self) -> int:
        n = 0
        for row in self.levels:
            n += len(row)
            for ch in row:
                n += len(ch.ptr) + sum(len(b) + 1 for b in ch.blocks)
        return n

    def __eq__(self, other) -> bool:
        return isinstance(other, TotalIndex) and self.upper_count == other.upper_count and self.levels == other.levels


class TwoDIndex:
    """Partial index over one parameter plane.

    ``bt``: ``chains[beta-1]`` keyed by tau_max(1, beta, .).
    ``at``: ``chains[alpha-1]`` keyed by tau_max(alpha, 1, .).
    ``ab``: ``chains[alpha-1]`` holds upper vertices keyed by their largest beta
    in an (alpha, beta)-core and ``lower_chains[beta-1]`` lower vertices keyed
    by their largest alpha.
    """

    def __init__(self, kind: str, upper_count: int, chains: list[Chain], lower_chains: list[Chain] | None = None):
        if kind not in ("ab", "bt", "at"):
            raise ValueError(f"unknown 2D index kind {kind!r}")
        self.kind = kind
        self.upper_count = upper_count
        self.chains = chains
        self.lower_chains = lower_chains if lower_chains is not None else []

    def size_cells(self) -> int:
        return sum(len(c.ptr) + sum(len(b) + 1 for b in c.blocks) for c in self.chains + self.lower_chains)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, TwoDIndex)
            and (self.kind, self.upper_count, self.chains, self.lower_chains)
            == (other.kind, other.upper_count, other.chains, other.lower_chains)
        )


# -- construction ------------------------------------------------------------


def build_total_index(d: DecompResult) -> TotalIndex:
    levels: list[list[Chain]] = []
    for a in range(1, d.alpha_max + 1):
        levels.append([Chain.from_levels(d.tau_max.get((a, b), {})) for b in range(1, d.beta_max(a) + 1)])
    return TotalIndex(d.upper_count, levels)


def _ab_levels(g: BipartiteGraph, transpose: bool) -> list[Chain]:
    # For each alpha, peel beta upward on the (alpha,1)-core and record every
    # upper vertex's last surviving beta (or the mirror image when transposed).
    h = g.transpose() if transpose else g
    chains: list[Chain] = []
    outer = PeelState(h, tau=0)
    a = 1
    while True:
        outer.peel(a, 1)
        if not any(x < h.upper_count for x in outer.alive):
            break
        st = outer.copy()
        last: dict[int, int] = {}
        b = 1
        while st:
            for x in st.alive:
                if x < h.upper_count:
                    last[x] = b
            b += 1
            st.peel(a, b)
        chains.append(Chain.from_levels(last))
        a += 1
    return chains


def build_2d_index(g: BipartiteGraph, kind: str) -> TwoDIndex:
    if kind == "bt":
        d = decompose_optimized(g, max_alpha=1)
        return TwoDIndex("bt", g.upper_count, [Chain.from_levels(d.tau_max[(1, b)]) for b in range(1, d.beta_max(1) + 1)])
    if kind == "at":
        d = decompose_optimized(g, max_beta=1)
        return TwoDIndex("at", g.upper_count, [Chain.from_levels(d.tau_max[(a, 1)]) for a in range(1, d.alpha_max + 1)])
    if kind == "ab":
        upper = _ab_levels(g, transpose=False)
        # The transposed graph numbers old lower vertices first; map them back.
        lower_t = _ab_levels(g, transpose=True)
        lower = [Chain(c.keys, [tuple(g.upper_count + x for x in blk) for blk in c.blocks], c.ptr) for c in lower_t]
        return TwoDIndex("ab", g.upper_count, upper, lower)
    raise ValueError(f"unknown 2D index kind {kind!r}; expected one of ab, bt, at")


def build_index(g: BipartiteGraph, kind: str):
    if kind == "total":
        return build_total_index(decompose_optimized(g))
    return build_2d_index(g, kind)


# -- queries -------------------------------------------------------------------


def query_total(idx: TotalIndex, alpha: int, beta: int, tau: int, g: BipartiteGraph, ab: TwoDIndex | None = None) -> Subgraph:
    """Chain walk from ``I[alpha][beta][tau]``; empty when any level is too short."""
    if tau == 0:
        return ab_core(ab, alpha, beta, g) if ab is not None else online_core(g, alpha, beta, 0)
    if alpha < 1 or beta < 1 or tau < 1:
        raise ValueError("alpha, beta, tau must be >= 1")
    if len(idx.levels) < alpha or len(idx.levels[alpha - 1]) < beta or idx.levels[alpha - 1][beta - 1].depth < tau:
        return Subgraph.empty()
    return Subgraph.from_nodes(g, idx.levels[alpha - 1][beta - 1].collect(tau))


def ab_nodes(idx: TwoDIndex, alpha: int, beta: int) -> list[int]:
    """Vertices of the (alpha, beta)-core from an AB index."""
    if alpha > len(idx.chains) or beta > len(idx.lower_chains):
        return []
    up = idx.chains[alpha - 1].collect(beta)
    lo = idx.lower_chains[beta - 1].collect(alpha)
    if not up or not lo:
        return []
    return up + lo


def ab_core(idx: TwoDIndex, alpha: int, beta: int, g: BipartiteGraph) -> Subgraph:
    return Subgraph.from_nodes(g, ab_nodes(idx, alpha, beta))


def seed_nodes(idx: TwoDIndex, alpha: int, beta: int, tau: int) -> list[int]:
    """The stored core that contains the (alpha, beta)_tau-core."""
    if idx.kind == "ab":
        return ab_nodes(idx, alpha, beta)
    key, other = (beta, alpha) if idx.kind == "bt" else (alpha, beta)
    if key > len(idx.chains):
        return []
    return idx.chains[key - 1].collect(tau)


def query_via_2d(
    idx: TwoDIndex,
    alpha: int,
    beta: int,
    tau: int,
    g: BipartiteGraph,
    ab: TwoDIndex | None = None,
) -> Subgraph:
    """Fetch the seed core from ``idx``, restore its edges and peel it with the
    full constraints.  ``tau = 0`` on BT/AT goes through ``ab`` when given."""
    if alpha < 1 or beta < 1 or tau < 0:
        raise ValueError("need alpha >= 1, beta >= 1, tau >= 0")
    if tau == 0 and idx.kind != "ab":
        return ab_core(ab, alpha, beta, g) if ab is not None else online_core(g, alpha, beta, 0)
    seed = seed_nodes(idx, alpha, beta, tau)
    if not seed:
        return Subgraph.empty()
    exact = (
        (idx.kind == "ab" and tau == 0)
        or (idx.kind == "bt" and alpha == 1)
        or (idx.kind == "at" and beta == 1)
    )
    if exact:
        return Subgraph.from_nodes(g, seed)
    return online_core(g, alpha, beta, tau, nodes=seed)


def query(idx, alpha: int, beta: int, tau: int, g: BipartiteGraph, ab: TwoDIndex | None = None) -> Subgraph:
    if isinstance(idx, TotalIndex):
        return query_total(idx, alpha, beta, tau, g, ab)
    return query_via_2d(idx, alpha, beta, tau, g, ab)
