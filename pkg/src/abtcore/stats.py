"""Global graph statistics: degree extremes, parameter extremes, degeneracy."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .buckets import BucketQueue
from .graph import BipartiteGraph
from .peeling import PeelState


@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    upper: int
    lower: int
    d_max_upper: int
    d_max_lower: int
    degeneracy: int
    alpha_max: int
    beta_max: int
    tau_max: int

    def as_dict(self) -> dict:
        return asdict(self)


def degeneracy(g: BipartiteGraph) -> int:
    """Largest k with a nonempty k-core, treating ``g`` as a general graph."""
    if g.m == 0:
        return 0
    deg = [len(g.upper_adj[u]) for u in range(g.upper_count)] + [
        len(g.lower_adj[v]) for v in range(g.lower_count)
    ]
    q = BucketQueue()
    for x, d in enumerate(deg):
        q.insert(x, d)
    best = 0
    while q:
        x, d = q.pop_min()
        best = max(best, d)
        for y, _ in g.node_neighbors(x):
            if y in q:
                deg[y] -= 1
                q.update(y, deg[y])
    return best


def _last_nonempty(st: PeelState, step) -> int:
    k = 0
    while True:
        step(st, k + 1)
        if not st:
            return k
        k += 1


def stats(g: BipartiteGraph) -> GraphStats:
    """alpha_max / beta_max: largest alpha (beta) with a nonempty (alpha,1)_1
    ((1,beta)_1) core; tau_max: largest tau with a nonempty (1,1)_tau-core."""
    if g.m == 0:
        return GraphStats(g.n, 0, g.upper_count, g.lower_count, 0, 0, 0, 0, 0, 0)
    base = PeelState(g, tau=1)
    a_max = _last_nonempty(base.copy(), lambda st, a: st.peel(a, 1))
    b_max = _last_nonempty(base.copy(), lambda st, b: st.peel(1, b))

    def up_tau(st, t):
        if t > st.tau:
            st.raise_tau(t)
        st.peel(1, 1)

    t_max = _last_nonempty(base, up_tau)
    return GraphStats(
        n=g.n,
        m=g.m,
        upper=g.upper_count,
        lower=g.lower_count,
        d_max_upper=max((len(a) for a in g.upper_adj), default=0),
        d_max_lower=max((len(a) for a in g.lower_adj), default=0),
        degeneracy=degeneracy(g),
        alpha_max=a_max,
        beta_max=b_max,
        tau_max=t_max,
    )
