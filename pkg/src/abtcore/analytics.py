"""Cohesion metrics and parameter sweeps over cores."""

from __future__ import annotations

import csv
import math
from dataclasses import astuple, dataclass
from typing import Iterable, Sequence, TextIO

from .butterfly import count_butterflies_total, count_caterpillars
from .graph import BipartiteGraph, Subgraph
from .peeling import PeelState
from .stats import stats

PROFILE_HEADER = ("alpha", "beta", "tau", "upper", "lower", "edges", "density", "clustering")
MAX_PROFILE_ROWS = 10_000


def _as_graph(g: BipartiteGraph | Subgraph) -> BipartiteGraph:
    return g.as_graph() if isinstance(g, Subgraph) else g


def density(g: BipartiteGraph | Subgraph) -> float:
    """|E| / (|U| |L|); 0 when either layer is empty."""
    if isinstance(g, Subgraph):
        nu, nl, m = len(g.upper), len(g.lower), len(g.edges)
    else:
        nu, nl, m = g.upper_count, g.lower_count, g.m
    if nu == 0 or nl == 0:
        return 0.0
    return m / (nu * nl)


def clustering_coefficient(g: BipartiteGraph | Subgraph) -> float:
    """4 * butterflies / three-edge paths; 0 without any three-edge path."""
    h = _as_graph(g)
    cat = count_caterpillars(h)
    if cat == 0:
        return 0.0
    return 4 * count_butterflies_total(h) / cat


@dataclass(frozen=True)
class CoreProfileRow:
    alpha: int
    beta: int
    tau: int
    upper_size: int
    lower_size: int
    edge_count: int
    density: float
    clustering: float


def tau_steps(tau_max: int) -> list[int]:
    """0 followed by 1, 2, 4, ... up to ``tau_max`` (always including it)."""
    out = [0]
    t = 1
    while t <= tau_max:
        out.append(t)
        t *= 2
    if tau_max >= 1 and out[-1] != tau_max:
        out.append(tau_max)
    return out


def profile_cores(
    g: BipartiteGraph,
    alphas: Sequence[int] | None = None,
    betas: Sequence[int] | None = None,
    taus: Sequence[int] | None = None,
    max_rows: int = MAX_PROFILE_ROWS,
) -> list[CoreProfileRow]:
    """One row per nonempty core over the sampled grid.

    Defaults span alpha (beta) up to the largest upper (lower) degree, which
    bounds every nonempty core including tau = 0, and the tau steps from
    :func:`tau_steps`.  Cores are nested, so a sweep stops growing beta (and
    alpha) at the first empty core.  The tau sweep at fixed (alpha, beta)
    reuses one peeling state.
    """
    st = stats(g)
    alphas = list(alphas) if alphas is not None else list(range(1, st.d_max_upper + 1))
    betas = list(betas) if betas is not None else list(range(1, st.d_max_lower + 1))
    taus = sorted(set(taus)) if taus is not None else tau_steps(st.tau_max)
    nested = alphas == sorted(alphas) and betas == sorted(betas)
    rows: list[CoreProfileRow] = []
    for a in alphas:
        any_b = False
        for b in betas:
            got = False
            for core, t in _tau_sweep(g, a, b, taus):
                got = True
                rows.append(_row(a, b, t, core))
                if len(rows) >= max_rows:
                    return rows
            if got:
                any_b = True
            elif nested:
                break
        if nested and not any_b:
            break
    return rows


def _tau_sweep(g: BipartiteGraph, alpha: int, beta: int, taus: Sequence[int]):
    rest = list(taus)
    if rest and rest[0] == 0:
        base = PeelState(g, tau=0)
        base.peel(alpha, beta)
        if not base:
            return
        yield base.subgraph(), 0
        rest = rest[1:]
        nodes = base.alive
    else:
        nodes = None
    if not rest:
        return
    st = PeelState(g, nodes=nodes, tau=rest[0])
    for t in rest:
        st.raise_tau(t)
        st.peel(alpha, beta)
        if not st:
            return
        yield st.subgraph(), t


def _row(a: int, b: int, t: int, core: Subgraph) -> CoreProfileRow:
    return CoreProfileRow(a, b, t, len(core.upper), len(core.lower), len(core.edges), density(core), clustering_coefficient(core))


def write_profile_csv(rows: Iterable[CoreProfileRow], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(PROFILE_HEADER)
    for r in rows:
        w.writerow(astuple(r))


def community_params(delta: int) -> tuple[int, int]:
    """(ceil(0.6 delta), ceil(0.4 delta)), the fixed (alpha, beta) for tau sweeps."""
    return max(1, math.ceil(0.6 * delta)), max(1, math.ceil(0.4 * delta))
