"""Bipartite graph container, edge-list I/O and small hashing helpers.

Vertices live in two disjoint dense id spaces: upper ids ``0..nu-1`` and lower
ids ``0..nl-1``.  Algorithms that need a single array index per vertex use the
combined *node* id: ``u`` for an upper vertex and ``nu + v`` for a lower one,
so upper vertices always sort before lower ones.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, TextIO

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3
_MASK64 = (1 << 64) - 1


class EdgeListError(ValueError):
    """Malformed edge-list input."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def fnv1a64(data: bytes, h: int = FNV_OFFSET) -> int:
    for b in data:
        h ^= b
        h = (h * FNV_PRIME) & _MASK64
    return h


def edge_list_hash(pairs: Iterable[tuple[int, int]]) -> int:
    """64-bit FNV-1a over the sorted edge list, each edge packed as two LE int64."""
    h = FNV_OFFSET
    for u, v in sorted(pairs):
        h = fnv1a64(struct.pack("<qq", u, v), h)
    return h


class BipartiteGraph:
    """Immutable two-layer graph.

    ``edges[eid]`` is the ``(u, v)`` pair of edge ``eid``; edges are sorted
    lexicographically so ids are deterministic.  ``upper_adj[u]`` holds the
    sorted lower neighbours of ``u`` and ``upper_eids[u]`` the matching edge
    ids (likewise for the lower layer).
    """

    __slots__ = (
        "upper_count",
        "lower_count",
        "edges",
        "upper_adj",
        "lower_adj",
        "upper_eids",
        "lower_eids",
        "upper_labels",
        "lower_labels",
        "_eid",
        "_checksum",
    )

    def __init__(
        self,
        upper_count: int,
        lower_count: int,
        edges: Iterable[tuple[int, int]],
        upper_labels: Sequence[int] | None = None,
        lower_labels: Sequence[int] | None = None,
    ):
        pairs = sorted(set((int(u), int(v)) for u, v in edges))
        for u, v in pairs:
            if not (0 <= u < upper_count and 0 <= v < lower_count):
                raise ValueError(f"edge ({u}, {v}) outside vertex ranges")
        self.upper_count = upper_count
        self.lower_count = lower_count
        self.edges: tuple[tuple[int, int], ...] = tuple(pairs)
        up: list[list[int]] = [[] for _ in range(upper_count)]
        ue: list[list[int]] = [[] for _ in range(upper_count)]
        lo: list[list[int]] = [[] for _ in range(lower_count)]
        le: list[list[int]] = [[] for _ in range(lower_count)]
        for eid, (u, v) in enumerate(pairs):
            up[u].append(v)
            ue[u].append(eid)
            lo[v].append(u)
            le[v].append(eid)
        self.upper_adj = tuple(tuple(a) for a in up)
        self.upper_eids = tuple(tuple(a) for a in ue)
        self.lower_adj = tuple(tuple(a) for a in lo)
        self.lower_eids = tuple(tuple(a) for a in le)
        self.upper_labels = tuple(upper_labels) if upper_labels is not None else tuple(range(upper_count))
        self.lower_labels = tuple(lower_labels) if lower_labels is not None else tuple(range(lower_count))
        self._eid = {p: i for i, p in enumerate(pairs)}
        self._checksum: int | None = None

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return self.upper_count + self.lower_count

    @property
    def m(self) -> int:
        return len(self.edges)

    def edge_id(self, u: int, v: int) -> int:
        try:
            return self._eid[(u, v)]
        except KeyError:
            raise KeyError(f"no edge ({u}, {v})") from None

    def has_edge(self, u: int, v: int) -> bool:
        return (u, v) in self._eid

    def upper_degree(self, u: int) -> int:
        return len(self.upper_adj[u])

    def lower_degree(self, v: int) -> int:
        return len(self.lower_adj[v])

    # -- combined node ids ----------------------------------------------

    def node_of_upper(self, u: int) -> int:
        return u

    def node_of_lower(self, v: int) -> int:
        return self.upper_count + v

    def is_upper(self, node: int) -> bool:
        return node < self.upper_count

    def split_node(self, node: int) -> tuple[bool, int]:
        """Return ``(is_upper, layer_id)`` for a combined node id."""
        if node < self.upper_count:
            return True, node
        return False, node - self.upper_count

    def edge_nodes(self, eid: int) -> tuple[int, int]:
        u, v = self.edges[eid]
        return u, self.upper_count + v

    def node_neighbors(self, node: int) -> Iterator[tuple[int, int]]:
        """Yield ``(neighbour node, eid)`` pairs."""
        nu = self.upper_count
        if node < nu:
            for v, e in zip(self.upper_adj[node], self.upper_eids[node]):
                yield nu + v, e
        else:
            for u, e in zip(self.lower_adj[node - nu], self.lower_eids[node - nu]):
                yield u, e

    def node_adjacency(self, nodes: Iterable[int] | None = None) -> list[dict[int, int]]:
        """Per-node ``{neighbour node: eid}`` maps, restricted to the induced
        subgraph on ``nodes`` when given (other entries stay empty)."""
        adj: list[dict[int, int]] = [dict() for _ in range(self.n)]
        if nodes is None:
            for eid, (u, v) in enumerate(self.edges):
                lv = self.upper_count + v
                adj[u][lv] = eid
                adj[lv][u] = eid
            return adj
        keep = set(nodes)
        for node in keep:
            row = adj[node]
            for nb, e in self.node_neighbors(node):
                if nb in keep:
                    row[nb] = e
        return adj

    def checksum(self) -> int:
        """FNV-1a over the sorted internal edge list."""
        if self._checksum is None:
            self._checksum = edge_list_hash(self.edges)
        return self._checksum

    def transpose(self) -> "BipartiteGraph":
        """Same graph with the two layers swapped."""
        return BipartiteGraph(
            self.lower_count,
            self.upper_count,
            ((v, u) for u, v in self.edges),
            self.lower_labels,
            self.upper_labels,
        )

    def __repr__(self) -> str:
        return f"BipartiteGraph(|U|={self.upper_count}, |L|={self.lower_count}, |E|={self.m})"


@dataclass(frozen=True)
class Subgraph:
    """A vertex-induced subgraph given by internal ids of both layers."""

    upper: frozenset[int]
    lower: frozenset[int]
    edges: frozenset[tuple[int, int]]

    @classmethod
    def empty(cls) -> "Subgraph":
        return cls(frozenset(), frozenset(), frozenset())

    @classmethod
    def induced(cls, g: BipartiteGraph, upper: Iterable[int], lower: Iterable[int]) -> "Subgraph":
        """Restore edges by scanning the adjacency of the smaller side."""
        U = frozenset(upper)
        L = frozenset(lower)
        edges = []
        if len(U) <= len(L):
            for u in U:
                edges.extend((u, v) for v in g.upper_adj[u] if v in L)
        else:
            for v in L:
                edges.extend((u, v) for u in g.lower_adj[v] if u in U)
        return cls(U, L, frozenset(edges))

    @classmethod
    def from_nodes(cls, g: BipartiteGraph, nodes: Iterable[int]) -> "Subgraph":
        nu = g.upper_count
        U, L = [], []
        for x in nodes:
            if x < nu:
                U.append(x)
            else:
                L.append(x - nu)
        return cls.induced(g, U, L)

    def nodes(self, g: BipartiteGraph) -> frozenset[int]:
        nu = g.upper_count
        return self.upper | frozenset(nu + v for v in self.lower)

    def __len__(self) -> int:
        return len(self.upper) + len(self.lower)

    def __bool__(self) -> bool:
        return bool(self.upper or self.lower)

    def as_graph(self) -> BipartiteGraph:
        """Standalone graph on the subgraph's vertices (ids re-compacted)."""
        U = sorted(self.upper)
        L = sorted(self.lower)
        ui = {u: i for i, u in enumerate(U)}
        li = {v: i for i, v in enumerate(L)}
        return BipartiteGraph(len(U), len(L), ((ui[u], li[v]) for u, v in self.edges), U, L)

    def external_edges(self, g: BipartiteGraph) -> list[tuple[int, int]]:
        return sorted((g.upper_labels[u], g.lower_labels[v]) for u, v in self.edges)

    def result_hash(self, g: BipartiteGraph) -> int:
        return edge_list_hash(self.external_edges(g))


# -- edge-list I/O ----------------------------------------------------------


def load_edge_list(source: TextIO | str, swap: bool = False) -> BipartiteGraph:
    """Parse a KONECT-style two-column edge list.

    Lines starting with ``%`` or ``#`` are comments, blank lines are skipped.
    External ids are compacted per layer in order of first appearance sorted
    by value; the original ids survive as ``upper_labels``/``lower_labels``.
    """
    if isinstance(source, str):
        source = io.StringIO(source)
    raw: list[tuple[int, int]] = []
    for lineno, line in enumerate(source, start=1):
        s = line.strip()
        if not s or s[0] in "%#":
            continue
        toks = s.split()
        if len(toks) != 2:
            raise EdgeListError(lineno, f"expected 2 tokens, got {len(toks)}")
        try:
            a, b = int(toks[0]), int(toks[1])
        except ValueError:
            raise EdgeListError(lineno, f"non-integer token in {s!r}") from None
        if a < 0 or b < 0:
            raise EdgeListError(lineno, "negative vertex id")
        raw.append((b, a) if swap else (a, b))
    ups = sorted({a for a, _ in raw})
    lows = sorted({b for _, b in raw})
    ui = {x: i for i, x in enumerate(ups)}
    li = {x: i for i, x in enumerate(lows)}
    return BipartiteGraph(len(ups), len(lows), ((ui[a], li[b]) for a, b in raw), ups, lows)


def write_edge_list(g: BipartiteGraph, out: TextIO, external: bool = True) -> None:
    for u, v in g.edges:
        if external:
            out.write(f"{g.upper_labels[u]} {g.lower_labels[v]}\n")
        else:
            out.write(f"{u} {v}\n")


def complete_bipartite(a: int, b: int) -> BipartiteGraph:
    return BipartiteGraph(a, b, ((u, v) for u in range(a) for v in range(b)))
