"""Command-line interface.

Exit codes: 0 ok, 1 usage error, 2 data error (bad input, missing or
incompatible index), 3 internal error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import random
import statistics
import struct
import sys
import time
from pathlib import Path
from typing import Callable, Sequence

from .butterfly import count_butterflies_total, count_caterpillars, edge_supports, enumerate_butterflies_containing
from .decomposition import decompose_optimized
from .graph import BipartiteGraph, EdgeListError, Subgraph, edge_list_hash, fnv1a64, load_edge_list, write_edge_list
from .index import KINDS, build_index, query
from .peeling import online_core
from .serialize import IndexFormatError, load_index, save_index
from .stats import stats

INDEX_DIR_ENV = "ABTCORE_INDEX_DIR"
METHODS = ("online", "total", "ab", "bt", "at", "hybrid")

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_INTERNAL = 0, 1, 2, 3


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# -- shared helpers ---------------------------------------------------------------


def _load_graph(args) -> BipartiteGraph:
    path = Path(args.input)
    if not path.is_file():
        raise DataError(f"input file {path} not found")
    with path.open() as fh:
        return load_edge_list(fh, swap=args.swap)


def _index_dir(args) -> Path:
    if args.index_dir:
        return Path(args.index_dir)
    env = os.environ.get(INDEX_DIR_ENV)
    if env:
        return Path(env)
    p = Path(args.input)
    return p.with_name(p.name + ".index")


def _index_path(args, kind: str) -> Path:
    return _index_dir(args) / f"{kind}.bcix"


def _router_path(args) -> Path:
    return _index_dir(args) / "router.json"


def _build_hint(args, kind: str) -> str:
    return f"run: python3 -m abtcore build-index --input {args.input} --kind {kind}"


def _require_index(args, g: BipartiteGraph, kind: str):
    path = _index_path(args, kind)
    if not path.is_file():
        raise DataError(f"no {kind} index at {path}; {_build_hint(args, kind)}")
    try:
        return load_index(path, g)
    except IndexFormatError as e:
        raise DataError(f"{path}: {e}; rebuild it ({_build_hint(args, kind)})") from None


def _indexes(args, g: BipartiteGraph, kinds: Sequence[str], build_missing: bool = False) -> dict:
    out = {}
    for k in kinds:
        if build_missing and not _index_path(args, k).is_file():
            out[k] = build_index(g, k)
        else:
            out[k] = _require_index(args, g, k)
    return out


def _load_router(args):
    from .router import QueryRouter

    p = _router_path(args)
    if not p.is_file():
        return None
    return QueryRouter.from_json(p.read_text())


def _check_params(a: int, b: int, t: int) -> None:
    if a < 1 or b < 1 or t < 0:
        raise UsageError("need --alpha >= 1, --beta >= 1, --tau >= 0")


def _method_fn(method: str, args, g: BipartiteGraph, build_missing: bool = False) -> Callable[[int, int, int], Subgraph]:
    if method == "online":
        return lambda a, b, t: online_core(g, a, b, t)
    if method == "hybrid":
        from .router import hybrid_query

        idx = _indexes(args, g, ("ab", "bt", "at"), build_missing)
        r = _load_router(args)
        return lambda a, b, t: hybrid_query(g, idx, r, a, b, t)
    idx = _indexes(args, g, (method,), build_missing)[method]
    ab = None
    if method in ("total", "bt", "at"):
        p = _index_path(args, "ab")
        if p.is_file():
            ab = _require_index(args, g, "ab")
    return lambda a, b, t: query(idx, a, b, t, g, ab)


# -- subcommands --------------------------------------------------------------------


def cmd_ingest(args, out) -> int:
    g = _load_graph(args)
    if args.output:
        with open(args.output, "w") as fh:
            write_edge_list(g, fh)
    print(f"upper={g.upper_count} lower={g.lower_count} edges={g.m} checksum={g.checksum():#018x}", file=out)
    return EXIT_OK


def cmd_stats(args, out) -> int:
    s = stats(_load_graph(args)).as_dict()
    if args.format == "json":
        print(json.dumps(s), file=out)
    else:
        for k, v in s.items():
            print(f"{k}={v}", file=out)
    return EXIT_OK


def cmd_count(args, out) -> int:
    g = _load_graph(args)
    if args.edge is not None:
        u, v = args.edge
        try:
            ui = g.upper_labels.index(u)
            vi = g.lower_labels.index(v)
        except ValueError:
            raise DataError(f"({u}, {v}) is not an edge") from None
        if not g.has_edge(ui, vi):
            raise DataError(f"({u}, {v}) is not an edge")
        bs = enumerate_butterflies_containing(g, ui, vi)
        print(f"edge={u},{v} butterflies={len(bs)}", file=out)
        return EXIT_OK
    print(f"butterflies={count_butterflies_total(g)} caterpillars={count_caterpillars(g)}", file=out)
    if args.supports:
        sup = edge_supports(g)
        with open(args.supports, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["upper", "lower", "support"])
            for e, (u, v) in enumerate(g.edges):
                w.writerow([g.upper_labels[u], g.lower_labels[v], sup[e]])
    return EXIT_OK


def cmd_build_index(args, out) -> int:
    g = _load_graph(args)
    kinds = KINDS if args.kind == "all" else (args.kind,)
    d = _index_dir(args)
    d.mkdir(parents=True, exist_ok=True)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["kind", "build_seconds", "bytes", "path"])
    for k in kinds:
        t0 = time.perf_counter()
        idx = build_index(g, k)
        dt = time.perf_counter() - t0
        path = _index_path(args, k)
        size = save_index(idx, g, path)
        w.writerow([k, f"{dt:.6f}", size, str(path)])
    return EXIT_OK


def _emit_core(core: Subgraph, g: BipartiteGraph, fmt: str, elapsed_ms: float, out) -> None:
    edges = core.external_edges(g)
    h = edge_list_hash(edges)
    summary = {"upper": len(core.upper), "lower": len(core.lower), "edges": len(edges), "elapsed_ms": round(elapsed_ms, 3), "hash": f"{h:#018x}"}
    if fmt == "json":
        print(
            json.dumps(
                {
                    "upper": sorted(g.upper_labels[u] for u in core.upper),
                    "lower": sorted(g.lower_labels[v] for v in core.lower),
                    "edges": edges,
                    "summary": summary,
                }
            ),
            file=out,
        )
        return
    if fmt == "csv":
        print("upper,lower", file=out)
        for u, v in edges:
            print(f"{u},{v}", file=out)
    else:
        for u, v in edges:
            print(f"{u} {v}", file=out)
    print(
        f"% |U|={summary['upper']} |L|={summary['lower']} |E|={summary['edges']} "
        f"elapsed_ms={summary['elapsed_ms']} hash={summary['hash']}",
        file=out,
    )


def cmd_query(args, out) -> int:
    _check_params(args.alpha, args.beta, args.tau)
    g = _load_graph(args)
    fn = _method_fn(args.method, args, g)
    t0 = time.perf_counter()
    core = fn(args.alpha, args.beta, args.tau)
    ms = (time.perf_counter() - t0) * 1000
    _emit_core(core, g, args.format, ms, out)
    return EXIT_OK


def cmd_decompose(args, out) -> int:
    g = _load_graph(args)
    d = decompose_optimized(g)
    dest = open(args.output, "w", newline="") if args.output else out
    try:
        w = csv.writer(dest, lineterminator="\n")
        w.writerow(["alpha", "beta", "layer", "vertex", "tau_max"])
        nu = g.upper_count
        for (a, b) in sorted(d.tau_max):
            for x, t in sorted(d.tau_max[(a, b)].items()):
                layer, lab = ("upper", g.upper_labels[x]) if x < nu else ("lower", g.lower_labels[x - nu])
                w.writerow([a, b, layer, lab, t])
    finally:
        if dest is not out:
            dest.close()
    print(f"% alpha_max={d.alpha_max} cells={sum(len(r) for r in d.tau_max.values())}", file=sys.stderr)
    return EXIT_OK


def cmd_train_router(args, out) -> int:
    from .router import DEFAULT_GRID, HyperParams, RouterUsageError, cross_validate, generate_training_set, train_classifier, write_training_csv

    g = _load_graph(args)
    idx = _indexes(args, g, ("ab", "bt", "at"))
    try:
        data = generate_training_set(g, idx, args.samples, args.seed)
        if not data:
            raise UsageError("no training samples; pass --samples N with N >= 5")
        grid = DEFAULT_GRID
        if args.hidden:
            grid = tuple(HyperParams(hidden=h, optimizer=o) for o in args.optimizers for h in args.hidden)
        scores: list = []
        best = cross_validate(data, grid, args.seed, scores=scores)
        r = train_classifier(data, best, args.seed)
    except RouterUsageError as e:
        raise UsageError(str(e)) from None
    if args.training_csv:
        with open(args.training_csv, "w", newline="") as fh:
            write_training_csv(data, fh)
    p = _router_path(args)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(r.to_json())
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["hidden", "optimizer", "cv_error", "selected"])
    for hp, err in scores:
        w.writerow([hp.hidden, hp.optimizer, repr(err), int(hp == best)])
    print(f"% router written to {p}", file=sys.stderr)
    return EXIT_OK


def bench_queries(g: BipartiteGraph, n: int, seed: int) -> list[tuple[int, int, int]]:
    """``n`` triples drawn uniformly from the box bounded by the graph's extremes."""
    s = stats(g)
    rng = random.Random(seed)
    if s.alpha_max == 0:
        return [(1, 1, 1)] * n
    return [(rng.randint(1, s.alpha_max), rng.randint(1, s.beta_max), rng.randint(1, max(1, s.tau_max))) for _ in range(n)]


def cmd_bench(args, out) -> int:
    g = _load_graph(args)
    qs = bench_queries(g, args.queries, args.seed)
    methods = args.methods or list(METHODS)
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["method", "queries", "mean_ms", "median_ms", "result_hash"])
    means = {}
    for m in methods:
        fn = _method_fn(m, args, g, build_missing=args.build_missing)
        times, hashes = [], []
        for q in qs:
            t0 = time.perf_counter()
            core = fn(*q)
            times.append((time.perf_counter() - t0) * 1000)
            hashes.append(core.result_hash(g))
        combined = fnv1a64(struct.pack(f"<{len(hashes)}Q", *hashes))
        means[m] = statistics.fmean(times) if times else 0.0
        w.writerow([m, len(qs), f"{means[m]:.4f}", f"{(statistics.median(times) if times else 0.0):.4f}", f"{combined:#018x}"])
    if "online" in means and "total" in means and means["online"] < means["total"]:
        print("warning: online mean time below total-index mean time", file=sys.stderr)
    return EXIT_OK


def cmd_profile(args, out) -> int:
    from .analytics import profile_cores, write_profile_csv

    g = _load_graph(args)
    rows = profile_cores(g, alphas=args.alpha, betas=args.beta, taus=args.tau, max_rows=args.max_rows)
    if args.output:
        with open(args.output, "w", newline="") as fh:
            write_profile_csv(rows, fh)
    else:
        write_profile_csv(rows, out)
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def _int_list(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {s!r}") from None


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="abtcore", description="Tau-strengthened (alpha, beta)-cores of bipartite graphs.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def add(name, fn, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--input", "-i", required=True, help="edge-list file (upper id, lower id per line)")
        sp.add_argument("--swap", action="store_true", help="treat the second column as the upper layer")
        sp.add_argument("--index-dir", help=f"index directory (default ${INDEX_DIR_ENV} or <input>.index)")
        sp.set_defaults(func=fn)
        return sp

    sp = add("ingest", cmd_ingest, "validate an edge list and report its size")
    sp.add_argument("--output", "-o", help="write the deduplicated edge list here")

    sp = add("stats", cmd_stats, "degree, parameter extremes and degeneracy")
    sp.add_argument("--format", choices=("kv", "json"), default="kv")

    sp = add("count", cmd_count, "butterfly and three-path counts")
    sp.add_argument("--edge", nargs=2, type=int, metavar=("U", "V"), help="count butterflies through one edge")
    sp.add_argument("--supports", help="write per-edge supports as CSV")

    sp = add("build-index", cmd_build_index, "build and save an index")
    sp.add_argument("--kind", choices=(*KINDS, "all"), required=True)

    sp = add("query", cmd_query, "compute one (alpha, beta)_tau-core")
    sp.add_argument("--alpha", type=int, required=True)
    sp.add_argument("--beta", type=int, required=True)
    sp.add_argument("--tau", type=int, required=True)
    sp.add_argument("--method", choices=METHODS, default="online")
    sp.add_argument("--format", choices=("edge-list", "csv", "json"), default="edge-list")

    sp = add("decompose", cmd_decompose, "full tau_max table as CSV")
    sp.add_argument("--output", "-o")

    sp = add("train-router", cmd_train_router, "time strategies on sampled queries and fit the router")
    sp.add_argument("--samples", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--hidden", type=_int_list, help="hidden sizes to try, e.g. 10,20,30")
    sp.add_argument("--optimizers", type=lambda s: s.split(","), default=["lbfgs"])
    sp.add_argument("--training-csv", help="also export the labeled queries")

    sp = add("bench", cmd_bench, "mean/median query time per method")
    sp.add_argument("--queries", type=int, default=50)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--methods", type=lambda s: s.split(","), help=f"subset of {','.join(METHODS)}")
    sp.add_argument("--build-missing", action="store_true", help="build absent indexes in memory")

    sp = add("profile", cmd_profile, "density and clustering over a parameter sweep")
    sp.add_argument("--alpha", type=_int_list)
    sp.add_argument("--beta", type=_int_list)
    sp.add_argument("--tau", type=_int_list)
    sp.add_argument("--max-rows", type=int, default=10_000)
    sp.add_argument("--output", "-o")
    return p


def main(argv: Sequence[str] | None = None, out=None, err=None) -> int:
    out = out if out is not None else sys.stdout
    err = err if err is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        if getattr(args, "methods", None):
            bad = [m for m in args.methods if m not in METHODS]
            if bad:
                raise UsageError(f"unknown method(s) {','.join(bad)}")
        return args.func(args, out)
    except UsageError as e:
        print(f"usage error: {e}", file=err)
        return EXIT_USAGE
    except (DataError, EdgeListError, IndexFormatError, OSError) as e:
        print(f"error: {e}", file=err)
        return EXIT_DATA
    except SystemExit as e:  # --help
        return int(e.code or 0)
    except Exception as e:  # pragma: no cover - defensive
        print(f"internal error: {type(e).__name__}: {e}", file=err)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
