"""Online (alpha, beta)_tau-core computation by peeling weakly engaged vertices."""

from __future__ import annotations

import random
from typing import Iterable, Sequence

from .buckets import BucketQueue
from .butterfly import BloomEdgeIndex, supports_from_adjacency
from .graph import BipartiteGraph, Subgraph


def vertex_engagements(g: BipartiteGraph, sup: Sequence[int], tau: int) -> list[int]:
    """Strong-tie count per combined node id (``sup >= tau``)."""
    eng = [0] * g.n
    nu = g.upper_count
    for e, (u, v) in enumerate(g.edges):
        if sup[e] >= tau:
            eng[u] += 1
            eng[nu + v] += 1
    return eng


class PeelState:
    """Residual subgraph with supports and engagements at strength ``tau``.

    ``adj[x]`` only holds alive neighbours.  Supports of strong ties are exact;
    once an edge turns weak it is no longer updated (it can never become
    strong again).  With ``use_be`` deletions go through a bloom-edge index,
    which keeps every alive support exact.  ``track_ties`` keeps strong ties in
    a support-keyed bucket queue so :meth:`raise_tau` only touches the edges
    that actually demote.
    """

    def __init__(
        self,
        g: BipartiteGraph,
        nodes: Iterable[int] | None = None,
        tau: int = 1,
        use_be: bool = False,
        track_ties: bool = False,
    ):
        if tau < 0:
            raise ValueError("tau must be >= 0")
        self.g = g
        self.nu = g.upper_count
        self.adj = g.node_adjacency(nodes)
        if nodes is None:
            self.alive = {x for x in range(g.n) if self.adj[x]}
        else:
            self.alive = {x for x in nodes if self.adj[x]}
        self.tau = tau
        self.be: BloomEdgeIndex | None = None
        self.ties: BucketQueue | None = None
        # strong ties whose support changed since they were last bucketed
        self.dirty: set[int] = set()
        if tau == 0 and not use_be:
            self.sup: list[int] | None = None
            self.eng = [len(a) for a in self.adj]
            return
        if use_be:
            self.be = BloomEdgeIndex.from_adjacency(self.adj, self.alive, g.m)
            self.sup = list(self.be.sup)
        else:
            self.sup = supports_from_adjacency(self.adj, self.alive, self.nu, g.m)
        sup = self.sup
        eng = [0] * g.n
        if track_ties:
            self.ties = BucketQueue()
        for x in self.alive:
            if x >= self.nu:
                continue
            for y, e in self.adj[x].items():
                if sup[e] >= tau:
                    eng[x] += 1
                    eng[y] += 1
                    if self.ties is not None:
                        self.ties.insert(e, sup[e])
        self.eng = eng

    # -- bookkeeping -------------------------------------------------------

    def copy(self) -> "PeelState":
        c = object.__new__(PeelState)
        c.g = self.g
        c.nu = self.nu
        c.adj = [dict(a) if a else {} for a in self.adj]
        c.alive = set(self.alive)
        c.tau = self.tau
        c.eng = list(self.eng)
        c.ties = self.ties.copy() if self.ties is not None else None
        c.dirty = set(self.dirty)
        c.be = self.be.copy() if self.be is not None else None
        c.sup = list(self.sup) if self.sup is not None else None
        return c

    def __len__(self) -> int:
        return len(self.alive)

    def __bool__(self) -> bool:
        return bool(self.alive)

    def subgraph(self) -> Subgraph:
        nu = self.nu
        U = frozenset(x for x in self.alive if x < nu)
        L = frozenset(x - nu for x in self.alive if x >= nu)
        edges = frozenset((x, y - nu) for x in U for y in self.adj[x])
        return Subgraph(U, L, edges)

    def min_engagement(self) -> tuple[int, int]:
        """``(min upper eng, min lower eng)`` over alive vertices (0 if a layer is empty)."""
        mu = ml = None
        nu = self.nu
        eng = self.eng
        for x in self.alive:
            k = eng[x]
            if x < nu:
                if mu is None or k < mu:
                    mu = k
            elif ml is None or k < ml:
                ml = k
        return mu or 0, ml or 0

    # -- strength level ------------------------------------------------------

    def raise_tau(self, tau: int) -> set[int]:
        """Move to a higher strength level, demoting ties with ``sup < tau``.
        Returns the vertices whose engagement dropped."""
        if tau < self.tau:
            raise ValueError("strength level can only increase")
        touched: set[int] = set()
        if tau == self.tau:
            return touched
        if self.sup is None:
            raise ValueError("state was built at tau=0 without supports")
        eng = self.eng
        if self.ties is not None:
            ties, sup = self.ties, self.sup
            for f in self.dirty:
                if f in ties:
                    ties.insert(f, sup[f])
            self.dirty.clear()
            for k in range(self.tau, tau):
                for e in self.ties.take(k):
                    x, y = self.g.edge_nodes(e)
                    eng[x] -= 1
                    eng[y] -= 1
                    touched.add(x)
                    touched.add(y)
        else:
            sup = self.sup
            lo = self.tau
            for x in self.alive:
                if x >= self.nu:
                    continue
                for y, e in self.adj[x].items():
                    if lo <= sup[e] < tau:
                        eng[x] -= 1
                        eng[y] -= 1
                        touched.add(x)
                        touched.add(y)
        self.tau = tau
        return touched

    # -- peeling -------------------------------------------------------------

    def _weaken(self, x: int, y: int, weak: BucketQueue, alpha: int, beta: int) -> None:
        eng = self.eng
        eng[x] -= 1
        eng[y] -= 1
        for z in (x, y):
            if z in self.alive and eng[z] < (alpha if z < self.nu else beta):
                weak.insert(z, max(eng[z], 0))

    def peel(
        self,
        alpha: int,
        beta: int,
        candidates: Iterable[int] | None = None,
        rng: random.Random | None = None,
    ) -> list[int]:
        """Remove weakly engaged vertices until every alive upper vertex has
        ``>= alpha`` strong ties and every lower one ``>= beta``.

        Returns removed node ids in removal order.  ``candidates`` restricts the
        initial scan when the caller knows only those vertices changed.  With
        ``rng`` the next victim is drawn uniformly from all weak vertices
        instead of lowest-engagement-first.
        """
        nu = self.nu
        eng = self.eng
        alive = self.alive
        weak = BucketQueue()
        for x in (alive if candidates is None else candidates):
            if x in alive and eng[x] < (alpha if x < nu else beta):
                weak.insert(x, max(eng[x], 0))
        removed: list[int] = []
        tau = self.tau
        sup = self.sup
        adj = self.adj
        ties = self.ties
        while weak:
            if rng is None:
                x, _ = weak.pop_min()
            else:
                x = rng.choice(sorted(weak))
                weak.discard(x)
            alive.discard(x)
            removed.append(x)
            nx = adj[x]
            for y in list(nx):
                e = nx[y]
                if sup is None or sup[e] >= tau:
                    eng[y] -= 1
                    if y in alive and eng[y] < (alpha if y < nu else beta):
                        weak.insert(y, max(eng[y], 0))
                    if ties is not None:
                        ties.discard(e)
                if sup is not None:
                    if self.be is not None:
                        self._be_drop(e, weak, alpha, beta)
                    else:
                        self._drop_butterflies(x, y, weak, alpha, beta)
                del nx[y]
                del adj[y][x]
        return removed

    def _be_drop(self, e: int, weak: BucketQueue, alpha: int, beta: int) -> None:
        sup = self.sup
        tau = self.tau
        ties = self.ties
        for f, s in self.be.delete(e):
            old = sup[f]
            sup[f] = s
            if old >= tau:
                if s < tau:
                    if ties is not None:
                        ties.discard(f)
                    p, q = self.g.edge_nodes(f)
                    self._weaken(p, q, weak, alpha, beta)
                elif ties is not None:
                    self.dirty.add(f)

    def _drop_butterflies(self, a: int, b: int, weak: BucketQueue, alpha: int, beta: int) -> None:
        # Only strong ties are decremented; a weak tie's stale support stays < tau.
        adj = self.adj
        sup = self.sup
        tau = self.tau
        ties = self.ties
        na = adj[a]
        for w in adj[b]:
            if w == a:
                continue
            nw = adj[w]
            ewb = nw[b]
            small, big = (na, nw) if len(na) <= len(nw) else (nw, na)
            for x in small:
                if x == b or x not in big:
                    continue
                for f in (na[x], ewb, nw[x]):
                    s = sup[f]
                    if s >= tau:
                        s -= 1
                        sup[f] = s
                        if s == tau - 1:
                            if ties is not None:
                                ties.discard(f)
                            p, q = self.g.edge_nodes(f)
                            self._weaken(p, q, weak, alpha, beta)
                        elif ties is not None:
                            self.dirty.add(f)


def peel(ctx: PeelState, alpha: int, beta: int, tau: int, rng: random.Random | None = None) -> Subgraph:
    """Support-aware peeling of ``ctx`` in place; returns the residual core."""
    if tau != ctx.tau:
        ctx.raise_tau(tau)
    ctx.peel(alpha, beta, rng=rng)
    return ctx.subgraph()


def online_core(
    g: BipartiteGraph,
    alpha: int,
    beta: int,
    tau: int,
    nodes: Iterable[int] | None = None,
    rng: random.Random | None = None,
) -> Subgraph:
    """The (alpha, beta)_tau-core of ``g`` (or of the subgraph induced by ``nodes``)."""
    if alpha < 1 or beta < 1 or tau < 0:
        raise ValueError("need alpha >= 1, beta >= 1, tau >= 0")
    ctx = PeelState(g, nodes, tau=tau)
    ctx.peel(alpha, beta, rng=rng)
    return ctx.subgraph()


PeelContext = PeelState
