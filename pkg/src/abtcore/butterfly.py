"""Butterfly counting, enumeration and the bloom-edge index.

Most routines accept either a :class:`BipartiteGraph` or work on the residual
adjacency maps used while peeling (``adj[node] = {neighbour: eid}``).
"""

from __future__ import annotations

from typing import Iterable, Sequence

from .graph import BipartiteGraph

Adjacency = Sequence[dict[int, int]]


class InvalidEdgeError(KeyError):
    pass


class EdgeAlreadyDeleted(RuntimeError):
    pass


def _driving_layer(adj: Adjacency, nodes: Iterable[int], nu: int) -> list[int]:
    # Wedge work is sum of deg^2 over the *opposite* layer, so drive from the
    # side whose partner layer is lighter.
    ups, lows = [], []
    cost_up = cost_low = 0
    for x in nodes:
        d = len(adj[x])
        if x < nu:
            ups.append(x)
            cost_low += d * d
        else:
            lows.append(x)
            cost_up += d * d
    return ups if cost_up <= cost_low else lows


def supports_from_adjacency(adj: Adjacency, nodes: Iterable[int], nu: int, m: int) -> list[int]:
    """Per-edge butterfly counts on the subgraph described by ``adj``.

    ``sup(a, v) = sum over w in nb(v) - {a} of (|nb(a) & nb(w)| - 1)``, with
    the common-neighbour counts collected from wedges ``a - v - w``.
    """
    sup = [0] * m
    for a in _driving_layer(adj, list(nodes), nu):
        na = adj[a]
        common: dict[int, int] = {}
        for v in na:
            for w in adj[v]:
                if w != a:
                    common[w] = common.get(w, 0) + 1
        if not common:
            continue
        for v, e in na.items():
            s = 0
            for w in adj[v]:
                if w != a:
                    s += common[w] - 1
            sup[e] = s
    return sup


def butterflies_from_adjacency(adj: Adjacency, nodes: Iterable[int], nu: int) -> int:
    total = 0
    for a in _driving_layer(adj, list(nodes), nu):
        common: dict[int, int] = {}
        for v in adj[a]:
            for w in adj[v]:
                if w > a:
                    common[w] = common.get(w, 0) + 1
        for c in common.values():
            total += c * (c - 1) // 2
    return total


def count_butterflies_total(g: BipartiteGraph) -> int:
    """Number of 2x2 bicliques, summing C(|nb(a) & nb(w)|, 2) over same-layer pairs."""
    adj = g.node_adjacency()
    return butterflies_from_adjacency(adj, range(g.n), g.upper_count)


def edge_supports(g: BipartiteGraph) -> list[int]:
    """``sup[eid]`` = number of butterflies that contain edge ``eid``."""
    adj = g.node_adjacency()
    return supports_from_adjacency(adj, range(g.n), g.upper_count, g.m)


def butterflies_of_edge(adj: Adjacency, a: int, b: int) -> list[tuple[int, int, int, int]]:
    """Butterflies ``(a, w, b, x)`` through edge ``a-b`` in node ids.

    ``w`` is on ``a``'s layer and ``x`` on ``b``'s layer; the intersection
    ``nb(a) & nb(w)`` iterates the smaller map.
    """
    out = []
    na = adj[a]
    for w in adj[b]:
        if w == a:
            continue
        nw = adj[w]
        small, big = (na, nw) if len(na) <= len(nw) else (nw, na)
        for x in small:
            if x != b and x in big:
                out.append((a, w, b, x))
    return out


def enumerate_butterflies_containing(g: BipartiteGraph, u: int, v: int) -> list[tuple[int, int, int, int]]:
    """All butterflies through edge ``(u, v)`` as ``(u, w, v, x)`` with
    ``u, w`` upper ids and ``v, x`` lower ids."""
    if not g.has_edge(u, v):
        raise InvalidEdgeError(f"({u}, {v}) is not an edge")
    nu = g.upper_count
    adj = g.node_adjacency()
    return [(a, w, bb - nu, x - nu) for a, w, bb, x in butterflies_of_edge(adj, u, nu + v)]


def count_caterpillars(g: BipartiteGraph) -> int:
    """Number of three-edge paths; each is centred on a unique middle edge."""
    return sum((g.upper_degree(u) - 1) * (g.lower_degree(v) - 1) for u, v in g.edges)


class BloomEdgeIndex:
    """Blooms (2 x k bicliques) keyed by a same-layer pair ``(a, w)``.

    Priority of a node is ``(degree, node id)``; bloom ``(a, w)`` collects the
    common neighbours ``x`` of ``a`` and ``w`` with lower priority than ``a``
    where ``w`` also ranks below ``a``.  Every butterfly therefore lands in the
    single bloom anchored at its highest-priority vertex.

    ``mids[b]`` maps each alive middle ``x`` of bloom ``b`` to its edge pair
    ``(eid(a, x), eid(w, x))``; ``edge_blooms[e]`` lists ``(b, twin, x)``.
    ``sup`` is kept exact for every alive edge.
    """

    __slots__ = ("pairs", "mids", "edge_blooms", "sup", "alive")

    def __init__(self, pairs, mids, edge_blooms, sup, alive):
        self.pairs: list[tuple[int, int]] = pairs
        self.mids: list[dict[int, tuple[int, int]]] = mids
        self.edge_blooms: list[list[tuple[int, int, int]]] = edge_blooms
        self.sup: list[int] = sup
        self.alive: list[bool] = alive

    @classmethod
    def from_adjacency(cls, adj: Adjacency, nodes: Iterable[int], m: int) -> "BloomEdgeIndex":
        nodes = list(nodes)
        pri = {x: (len(adj[x]), x) for x in nodes}
        pairs: list[tuple[int, int]] = []
        mids: list[dict[int, tuple[int, int]]] = []
        edge_blooms: list[list[tuple[int, int, int]]] = [[] for _ in range(m)]
        sup = [0] * m
        alive = [False] * m
        for x in nodes:
            for e in adj[x].values():
                alive[e] = True
        for a in nodes:
            pa = pri[a]
            wedges: dict[int, list[int]] = {}
            for v in adj[a]:
                if pri[v] >= pa:
                    continue
                for w in adj[v]:
                    if w != a and pri[w] < pa:
                        wedges.setdefault(w, []).append(v)
            for w, vs in wedges.items():
                if len(vs) < 2:
                    continue
                b = len(pairs)
                pairs.append((a, w))
                row = {}
                k1 = len(vs) - 1
                aw, ww = adj[a], adj[w]
                for x in vs:
                    e1, e2 = aw[x], ww[x]
                    row[x] = (e1, e2)
                    edge_blooms[e1].append((b, e2, x))
                    edge_blooms[e2].append((b, e1, x))
                    sup[e1] += k1
                    sup[e2] += k1
                mids.append(row)
        return cls(pairs, mids, edge_blooms, sup, alive)

    @classmethod
    def build(cls, g: BipartiteGraph) -> "BloomEdgeIndex":
        return cls.from_adjacency(g.node_adjacency(), range(g.n), g.m)

    def bloom_sizes(self) -> list[int]:
        return [len(r) for r in self.mids]

    def memory_cells(self) -> int:
        return sum(len(lst) for lst in self.edge_blooms)

    def delete(self, e: int) -> list[tuple[int, int]]:
        """Delete edge ``e``; return ``(eid, new support)`` for every alive edge whose
        support changed.  Work is proportional to ``sup(e)`` plus the number of
        blooms ``e`` sits in."""
        if not (0 <= e < len(self.alive)):
            raise InvalidEdgeError(e)
        if not self.alive[e]:
            raise EdgeAlreadyDeleted(f"edge {e} already deleted")
        self.alive[e] = False
        sup = self.sup
        touched: dict[int, None] = {}
        for b, twin, x in self.edge_blooms[e]:
            row = self.mids[b]
            if x not in row:
                continue
            del row[x]
            k1 = len(row)
            if k1 == 0:
                continue
            sup[twin] -= k1
            touched[twin] = None
            for e1, e2 in row.values():
                sup[e1] -= 1
                sup[e2] -= 1
                touched[e1] = None
                touched[e2] = None
        sup[e] = 0
        return [(t, sup[t]) for t in touched if self.alive[t]]

    def copy(self) -> "BloomEdgeIndex":
        # edge_blooms is append-only after build, so it can be shared.
        return BloomEdgeIndex(
            self.pairs,
            [dict(r) for r in self.mids],
            self.edge_blooms,
            list(self.sup),
            list(self.alive),
        )


def build_be_index(g: BipartiteGraph) -> BloomEdgeIndex:
    return BloomEdgeIndex.build(g)


def be_delete_edge(idx: BloomEdgeIndex, e: int) -> list[tuple[int, int]]:
    return idx.delete(e)
