"""Learned routing between the three 2D-index query strategies.

Classes are 1-based: 1 = AB seed, 2 = BT seed, 3 = AT seed.  The classifier
is a one-hidden-layer network (sigmoid hidden units, softmax output) trained
on cross-entropy; model selection uses the misrouting cost
``t[predicted] - t[actual]`` averaged over held-out folds.
"""

from __future__ import annotations

import csv
import json
import math
import random
import statistics
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy.optimize import minimize

from .graph import BipartiteGraph, Subgraph
from .index import TwoDIndex, ab_core, query_via_2d

STRATEGIES = ("ab", "bt", "at")
ROUTER_FORMAT = 1
DEFAULT_CLASS = 2
TRAINING_FRACTION = 0.05

Strategy = Callable[[int, int, int], Subgraph]


class RouterUsageError(ValueError):
    pass


@dataclass(frozen=True)
class LabeledQuery:
    features: tuple[int, int, int]
    times: tuple[float, float, float]
    label: int

    @classmethod
    def from_times(cls, features, times) -> "LabeledQuery":
        times = tuple(float(t) for t in times)
        if any(t < 0 for t in times):
            raise ValueError("times must be non-negative")
        # min() over (time, index) breaks exact ties toward the lower index.
        label = min(range(3), key=lambda i: (times[i], i)) + 1
        return cls(tuple(int(f) for f in features), times, label)


@dataclass(frozen=True)
class HyperParams:
    hidden: int = 30
    optimizer: str = "lbfgs"  # gd | momentum | lbfgs
    lr: float = 0.5
    momentum: float = 0.9
    max_iter: int = 400
    l2: float = 1e-4


DEFAULT_GRID = tuple(HyperParams(hidden=h, optimizer=o) for o in ("lbfgs", "momentum") for h in (10, 20, 30, 50))


# -- strategies and the sampling space -----------------------------------------


def strategy_callables(g: BipartiteGraph, indexes: dict[str, TwoDIndex]) -> list[Strategy]:
    ab = indexes["ab"]

    def make(kind):
        idx = indexes[kind]
        return lambda a, b, t: query_via_2d(idx, a, b, t, g, ab)

    return [make(k) for k in STRATEGIES]


def parameter_space(indexes: dict[str, TwoDIndex]) -> list[tuple[int, int, int]]:
    """All (alpha, beta, tau) with a nonempty (alpha, beta)-core and tau no larger
    than what both the (1, beta)- and (alpha, 1)-chains reach."""
    ab, bt, at = indexes["ab"], indexes["bt"], indexes["at"]
    out = []
    for a in range(1, len(ab.chains) + 1):
        ta = at.chains[a - 1].depth if a <= len(at.chains) else 0
        for b in range(1, ab.chains[a - 1].depth + 1):
            tb = bt.chains[b - 1].depth if b <= len(bt.chains) else 0
            for t in range(1, min(ta, tb) + 1):
                out.append((a, b, t))
    return out


def training_cap(space_size: int) -> int:
    return max(1, math.ceil(TRAINING_FRACTION * space_size)) if space_size else 0


def _timed(fn: Strategy, q, reps: int) -> float:
    ts = []
    for _ in range(reps):
        t0 = time.perf_counter()
        fn(*q)
        ts.append(time.perf_counter() - t0)
    return statistics.median(ts)


def generate_training_set(
    g: BipartiteGraph,
    indexes: dict[str, TwoDIndex],
    n: int,
    seed: int,
    strategies: Sequence[Strategy] | None = None,
    reps: int = 3,
    enforce_cap: bool = True,
) -> list[LabeledQuery]:
    """Sample ``n`` distinct parameter triples and label each by the fastest
    strategy (median of ``reps`` serial runs)."""
    if n < 0:
        raise RouterUsageError("sample count must be >= 0")
    space = parameter_space(indexes)
    cap = training_cap(len(space))
    if enforce_cap and n > cap:
        raise RouterUsageError(f"{n} samples exceed the cap of {cap} ({TRAINING_FRACTION:.0%} of {len(space)} queries)")
    if n > len(space):
        raise RouterUsageError(f"only {len(space)} distinct queries exist")
    if n == 0:
        return []
    fns = list(strategies) if strategies is not None else strategy_callables(g, indexes)
    qs = random.Random(seed).sample(space, n)
    return [LabeledQuery.from_times(q, [_timed(f, q, reps) for f in fns]) for q in qs]


def time_sensitive_error(predicted: int, actual: int, times: Sequence[float]) -> float:
    """``e_p^T M e_a`` with ``M[i][j] = t_i - t_j``."""
    for c in (predicted, actual):
        if c not in (1, 2, 3):
            raise RouterUsageError(f"class {c} not in 1..3")
    M = [[ti - tj for tj in times] for ti in times]
    return M[predicted - 1][actual - 1]


def write_training_csv(data: Iterable[LabeledQuery], out: TextIO) -> None:
    w = csv.writer(out, lineterminator="\n")
    w.writerow(["alpha", "beta", "tau", "t1", "t2", "t3", "label"])
    for d in data:
        w.writerow([*d.features, *(repr(t) for t in d.times), d.label])


def read_training_csv(src: TextIO) -> list[LabeledQuery]:
    out = []
    for row in csv.DictReader(src):
        feats = (int(row["alpha"]), int(row["beta"]), int(row["tau"]))
        out.append(LabeledQuery.from_times(feats, (float(row["t1"]), float(row["t2"]), float(row["t3"]))))
    return out


# -- the classifier -------------------------------------------------------------


def _sigmoid(z):
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def _softmax(z):
    z = z - z.max(axis=1, keepdims=True)
    ez = np.exp(z)
    return ez / ez.sum(axis=1, keepdims=True)


@dataclass
class QueryRouter:
    scale: np.ndarray  # per-feature divisors
    W1: np.ndarray  # (H, 3)
    b1: np.ndarray  # (H,)
    W2: np.ndarray  # (3, H)
    b2: np.ndarray  # (3,)
    activation: str = "sigmoid"
    hp: HyperParams = field(default_factory=HyperParams)
    loss_history: list[float] = field(default_factory=list)

    @property
    def hidden(self) -> int:
        return self.W1.shape[0]

    def proba(self, X) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float)) / self.scale
        h = _sigmoid(X @ self.W1.T + self.b1)
        return _softmax(h @ self.W2.T + self.b2)

    def predict_many(self, X) -> np.ndarray:
        return self.proba(X).argmax(axis=1) + 1

    def to_json(self) -> str:
        return json.dumps(
            {
                "format": ROUTER_FORMAT,
                "activation": self.activation,
                "hidden": self.hidden,
                "scale": self.scale.tolist(),
                "W1": self.W1.tolist(),
                "b1": self.b1.tolist(),
                "W2": self.W2.tolist(),
                "b2": self.b2.tolist(),
                "hp": asdict(self.hp),
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "QueryRouter":
        d = json.loads(text)
        if d.get("format") != ROUTER_FORMAT:
            raise RouterUsageError(f"router format {d.get('format')} unsupported")
        if d.get("activation") != "sigmoid":
            raise RouterUsageError(f"unknown activation {d.get('activation')!r}")
        r = cls(
            np.array(d["scale"], dtype=float),
            np.array(d["W1"], dtype=float).reshape(d["hidden"], 3),
            np.array(d["b1"], dtype=float),
            np.array(d["W2"], dtype=float).reshape(3, d["hidden"]),
            np.array(d["b2"], dtype=float),
            hp=HyperParams(**d["hp"]),
        )
        return r


def predict(r: QueryRouter, alpha: int, beta: int, tau: int) -> int:
    return int(r.predict_many([(alpha, beta, tau)])[0])


def feature_scale(data: Sequence[LabeledQuery]) -> np.ndarray:
    X = np.array([d.features for d in data], dtype=float)
    return np.maximum(X.max(axis=0), 1.0)


class _Net:
    """Flat-parameter view for the optimizers."""

    def __init__(self, X, Y, H, l2):
        self.X, self.Y, self.H, self.l2 = X, Y, H, l2
        self.shapes = [(H, 3), (H,), (3, H), (3,)]
        self.sizes = [int(np.prod(s)) for s in self.shapes]

    def unpack(self, w):
        out, i = [], 0
        for s, k in zip(self.shapes, self.sizes):
            out.append(w[i : i + k].reshape(s))
            i += k
        return out

    def loss_grad(self, w):
        W1, b1, W2, b2 = self.unpack(w)
        X, Y = self.X, self.Y
        n = len(X)
        h = _sigmoid(X @ W1.T + b1)
        P = _softmax(h @ W2.T + b2)
        loss = -np.sum(Y * np.log(P + 1e-300)) / n + 0.5 * self.l2 * (np.sum(W1 * W1) + np.sum(W2 * W2))
        dz2 = (P - Y) / n
        gW2 = dz2.T @ h + self.l2 * W2
        gb2 = dz2.sum(axis=0)
        dz1 = (dz2 @ W2) * h * (1 - h)
        gW1 = dz1.T @ X + self.l2 * W1
        gb1 = dz1.sum(axis=0)
        return loss, np.concatenate([gW1.ravel(), gb1, gW2.ravel(), gb2])


def train_classifier(data: Sequence[LabeledQuery], hp: HyperParams = HyperParams(), seed: int = 0, scale=None) -> QueryRouter:
    if not data:
        raise RouterUsageError("cannot train on an empty training set")
    if hp.hidden < 1:
        raise RouterUsageError("hidden size must be >= 1")
    scale = feature_scale(data) if scale is None else np.asarray(scale, dtype=float)
    X = np.array([d.features for d in data], dtype=float) / scale
    Y = np.zeros((len(data), 3))
    Y[np.arange(len(data)), [d.label - 1 for d in data]] = 1.0
    net = _Net(X, Y, hp.hidden, hp.l2)
    rng = np.random.default_rng(seed)
    H = hp.hidden
    lim1, lim2 = math.sqrt(6 / (3 + H)), math.sqrt(6 / (H + 3))
    w = np.concatenate(
        [rng.uniform(-lim1, lim1, 3 * H), np.zeros(H), rng.uniform(-lim2, lim2, 3 * H), np.zeros(3)]
    )
    history = [net.loss_grad(w)[0]]
    if hp.optimizer == "lbfgs":
        res = minimize(net.loss_grad, w, jac=True, method="L-BFGS-B", options={"maxiter": hp.max_iter})
        w = res.x
    elif hp.optimizer in ("gd", "momentum"):
        mu = hp.momentum if hp.optimizer == "momentum" else 0.0
        vel = np.zeros_like(w)
        for _ in range(hp.max_iter):
            _, grad = net.loss_grad(w)
            vel = mu * vel - hp.lr * grad
            w = w + vel
    else:
        raise RouterUsageError(f"unknown optimizer {hp.optimizer!r}")
    history.append(net.loss_grad(w)[0])
    W1, b1, W2, b2 = (a.copy() for a in net.unpack(w))
    return QueryRouter(scale, W1, b1, W2, b2, hp=hp, loss_history=history)


def mean_tse(r: QueryRouter, data: Sequence[LabeledQuery]) -> float:
    if not data:
        return 0.0
    pred = r.predict_many([d.features for d in data])
    return float(np.mean([time_sensitive_error(int(p), d.label, d.times) for p, d in zip(pred, data)]))


def cross_validate(
    data: Sequence[LabeledQuery],
    grid: Sequence[HyperParams] = DEFAULT_GRID,
    seed: int = 0,
    folds: int = 5,
    scores: list | None = None,
) -> HyperParams:
    """Return the setting with the lowest mean held-out misrouting cost.
    ``scores`` (if given) receives ``(hp, cv_error)`` for every setting."""
    if not grid:
        raise RouterUsageError("hyperparameter grid is empty")
    if len(data) < folds:
        raise RouterUsageError(f"need at least {folds} labeled queries for {folds}-fold validation")
    order = list(range(len(data)))
    random.Random(seed).shuffle(order)
    parts = [order[i::folds] for i in range(folds)]
    scale = feature_scale(data)
    best, best_err = None, math.inf
    for hp in grid:
        errs = []
        for k in range(folds):
            held = set(parts[k])
            train = [data[i] for i in order if i not in held]
            test = [data[i] for i in parts[k]]
            r = train_classifier(train, hp, seed, scale=scale)
            errs.extend(
                time_sensitive_error(int(p), d.label, d.times)
                for p, d in zip(r.predict_many([d.features for d in test]), test)
            )
        err = float(np.mean(errs))
        if scores is not None:
            scores.append((hp, err))
        if err < best_err:
            best, best_err = hp, err
    return best


# -- dispatch -------------------------------------------------------------------


def hybrid_query(
    g: BipartiteGraph,
    indexes: dict[str, TwoDIndex],
    r: QueryRouter | None,
    alpha: int,
    beta: int,
    tau: int,
    default: int = DEFAULT_CLASS,
) -> Subgraph:
    """Answer with the strategy the router picks; ``tau = 0`` always uses AB."""
    ab = indexes["ab"]
    if tau == 0:
        return query_via_2d(ab, alpha, beta, 0, g)
    cls = predict(r, alpha, beta, tau) if r is not None else default
    return query_via_2d(indexes[STRATEGIES[cls - 1]], alpha, beta, tau, g, ab)
