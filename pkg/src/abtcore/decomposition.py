"""Full (alpha, beta)_tau-core decomposition.

Both variants fill the same table ``tau_max[(alpha, beta)][node]``: the
largest ``tau >= 1`` such that ``node`` is in the (alpha, beta)_tau-core.
``decompose`` walks every (alpha, beta, tau) with intersection-based butterfly
enumeration.  ``decompose_optimized`` shares work between parameter values
whose cores coincide and routes edge deletions through a bloom-edge index.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .graph import BipartiteGraph
from .peeling import PeelState


@dataclass
class DecompResult:
    upper_count: int
    tau_max: dict[tuple[int, int], dict[int, int]] = field(default_factory=dict)
    beta_max_of: list[int] = field(default_factory=list)

    @property
    def alpha_max(self) -> int:
        return len(self.beta_max_of)

    def beta_max(self, alpha: int) -> int:
        if 1 <= alpha <= len(self.beta_max_of):
            return self.beta_max_of[alpha - 1]
        return 0

    def value(self, alpha: int, beta: int, node: int) -> int:
        """tau_max(alpha, beta, node), 0 when the node is not in the (alpha, beta)_1-core."""
        return self.tau_max.get((alpha, beta), {}).get(node, 0)

    def tau_max_of(self, alpha: int, beta: int) -> int:
        row = self.tau_max.get((alpha, beta))
        return max(row.values()) if row else 0

    def runs(self, alpha: int, beta: int) -> list[tuple[int, list[int]]]:
        """Vertices grouped by tau_max, ascending tau."""
        groups: dict[int, list[int]] = {}
        for x, t in self.tau_max.get((alpha, beta), {}).items():
            groups.setdefault(t, []).append(x)
        return [(t, sorted(groups[t])) for t in sorted(groups)]

    def core_nodes(self, alpha: int, beta: int, tau: int) -> set[int]:
        return {x for x, t in self.tau_max.get((alpha, beta), {}).items() if t >= tau}


@dataclass
class DecompTrace:
    """What the optimized decomposition visited and what it inferred.

    ``skipped`` maps a skipped ``(alpha, beta, tau)`` to the visited
    combination whose core it equals.  ``beta_min[(alpha, beta)]`` is the
    per-tau minimum lower engagement observed for a visited (alpha, beta).
    """

    collect_cores: bool = False
    visited: dict[tuple[int, int, int], frozenset[int]] = field(default_factory=dict)
    skipped: dict[tuple[int, int, int], tuple[int, int, int]] = field(default_factory=dict)
    skipped_betas: list[tuple[int, int]] = field(default_factory=list)
    skipped_alphas: list[int] = field(default_factory=list)
    beta_min: dict[tuple[int, int], list[int]] = field(default_factory=dict)
    peel_calls: int = 0

    def link(self, combo: tuple[int, int, int], source: tuple[int, int, int]) -> None:
        self.skipped[combo] = self.skipped.get(source, source)

    def visit(self, alpha, beta, tau, st: PeelState) -> None:
        self.peel_calls += 1
        if self.collect_cores:
            self.visited[(alpha, beta, tau)] = frozenset(st.alive)


def decompose(g: BipartiteGraph, max_alpha: int | None = None, max_beta: int | None = None) -> DecompResult:
    """Three nested loops over alpha, beta and tau.

    The tau loop starts from a copy of the (alpha, beta)_1-core state; moving
    from tau to tau+1 demotes ties whose support equals tau and peels, and each
    vertex removed in that step gets tau_max = tau.
    """
    res = DecompResult(g.upper_count)
    outer = PeelState(g, tau=1)
    alpha = 1
    while max_alpha is None or alpha <= max_alpha:
        outer.peel(alpha, 1)
        if not outer:
            break
        mid = outer.copy()
        beta = 1
        while max_beta is None or beta <= max_beta:
            mid.peel(alpha, beta)
            if not mid:
                break
            st = _with_ties(mid)
            row: dict[int, int] = {}
            tau = 1
            while st:
                touched = st.raise_tau(tau + 1)
                for x in st.peel(alpha, beta, candidates=touched):
                    row[x] = tau
                tau += 1
            res.tau_max[(alpha, beta)] = row
            beta += 1
        res.beta_max_of.append(beta - 1)
        alpha += 1
    return res


def _with_ties(st: PeelState) -> PeelState:
    c = st.copy()
    if c.ties is None:
        from .buckets import BucketQueue

        c.ties = BucketQueue()
        sup, tau, nu = c.sup, c.tau, c.nu
        for x in c.alive:
            if x < nu:
                for e in c.adj[x].values():
                    if sup[e] >= tau:
                        c.ties.insert(e, sup[e])
    return c


def decompose_optimized(
    g: BipartiteGraph,
    max_alpha: int | None = None,
    max_beta: int | None = None,
    trace: DecompTrace | None = None,
) -> DecompResult:
    """Decomposition with computation sharing.

    * tau: ``beta_min[t]`` from the previous beta run says whether the
      (alpha, beta)_t-core was already visited.  Transitions between two
      visited cores are not re-recorded, and once every remaining core is a
      visited one the tau loop stops.  A vertex dropped between tau and tau+1
      is written for every beta' up to the min lower engagement of the tau-core.
    * beta: after a run, jump straight to ``beta* + 1`` where beta* is the
      smallest lower engagement seen in any of its cores.
    * alpha: symmetric, using the smallest upper engagement over the whole
      alpha iteration.
    * every edge deletion goes through a bloom-edge index, rebuilt once per
      alpha on the (alpha, 1)_1-core.
    """
    res = DecompResult(g.upper_count)
    table = res.tau_max
    beta_cap = max_beta if max_beta is not None else 1 << 60
    outer = PeelState(g, tau=1, use_be=True)
    alpha = 1
    while max_alpha is None or alpha <= max_alpha:
        outer.peel(alpha, 1)
        if not outer:
            break
        mid = PeelState(g, nodes=outer.alive, tau=1, use_be=True, track_ties=True)
        prev_bmin: list[int] | None = None
        prev_amin: list[int] | None = None
        prev_beta = 0
        alpha_star: int | None = None
        beta = 1
        last_beta = 0
        while beta <= beta_cap:
            mid.peel(alpha, beta)
            if not mid:
                break
            st = mid.copy()
            bmin: list[int] = []
            amin: list[int] = []
            tau = 1
            while st:
                if prev_bmin is not None and all(b >= beta for b in prev_bmin[tau - 1:]):
                    # Every remaining core equals one from the previous run.
                    bmin.extend(prev_bmin[tau - 1:])
                    amin.extend(prev_amin[tau - 1:])
                    if trace is not None:
                        for t in range(tau, len(prev_bmin) + 1):
                            trace.link((alpha, beta, t), (alpha, prev_beta, t))
                    break
                if trace is not None:
                    trace.visit(alpha, beta, tau, st)
                mu, ml = st.min_engagement()
                bmin.append(ml)
                amin.append(mu)
                seen_here = prev_bmin is not None and tau - 1 < len(prev_bmin) and prev_bmin[tau - 1] >= beta
                seen_next = prev_bmin is not None and (tau >= len(prev_bmin) or prev_bmin[tau] >= beta)
                touched = st.raise_tau(tau + 1)
                removed = st.peel(alpha, beta, candidates=touched)
                if not (seen_here and seen_next):
                    hi = min(ml, beta_cap)
                    for b2 in range(beta, hi + 1):
                        row = table.setdefault((alpha, b2), {})
                        for x in removed:
                            row[x] = tau
                tau += 1
            if trace is not None:
                trace.beta_min[(alpha, beta)] = list(bmin)
            a_run = min(amin)
            alpha_star = a_run if alpha_star is None else min(alpha_star, a_run)
            beta_star = min(min(bmin), beta_cap)
            last_beta = max(last_beta, beta_star)
            if beta_star > beta and trace is not None:
                for b2 in range(beta + 1, beta_star + 1):
                    trace.skipped_betas.append((alpha, b2))
                    for t in range(1, len(bmin) + 1):
                        trace.link((alpha, b2, t), (alpha, beta, t))
            prev_bmin, prev_amin, prev_beta = bmin, amin, beta
            beta = max(beta, beta_star) + 1
        res.beta_max_of.append(last_beta)
        if alpha_star is not None and alpha_star > alpha:
            top = alpha_star if max_alpha is None else min(alpha_star, max_alpha)
            for a2 in range(alpha + 1, top + 1):
                for b2 in range(1, last_beta + 1):
                    table[(a2, b2)] = dict(table[(alpha, b2)])
                res.beta_max_of.append(last_beta)
                if trace is not None:
                    trace.skipped_alphas.append(a2)
                    for b2 in range(1, last_beta + 1):
                        for t in range(1, max(table[(alpha, b2)].values()) + 1):
                            trace.link((a2, b2, t), (alpha, b2, t))
            alpha = top + 1
        else:
            alpha += 1
    return res
