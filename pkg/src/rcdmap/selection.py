"""Community-penalized seed selection and its resampled average.

After a node ``v`` is picked, every unpicked ``u`` sharing a community
``C`` with ``v`` loses ``alpha / (n_C(u) * |C| ** k)``, where ``n_C(u)`` is the
number of communities holding ``u``. ``k`` is 1 for partitions and 2 for
overlapping covers, so bridge nodes are penalized less.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import centrality
from .community import Cover, DetectorConfig, cover_from_sets, detect
from .graph import Graph, average_shortest_path
from .perturb import DEFAULT_EPSILON, PerturbConfig, perturb_erp

KSHELL_DIVISOR = 2.5


@dataclass(frozen=True)
class RankedSeeds:
    """Nodes in selection order with their per-node final scores.

    ``final_scores`` is indexed by node id. ``rounds`` holds the per-replica
    selection orders when produced by :func:`rcd_map`.
    """

    order: np.ndarray
    final_scores: np.ndarray
    rounds: list = field(default_factory=list, compare=False)
    penalty_log: list | None = field(default=None, compare=False)

    def top(self, k: int) -> list[int]:
        return self.order[:k].tolist()

    def ordered_scores(self) -> np.ndarray:
        return self.final_scores[self.order]


class AlphaError(ValueError):
    pass


def alpha_for(method: str, g: Graph, base_scores: centrality.ScoreVector) -> float:
    """Penalty coefficient for a base ranker.

    degree: inverse mean degree; closeness: inverse mean shortest-path length;
    betweenness: inverse mean betweenness; kshell: ``max(ks) / 2.5``;
    pagerank: ``max(PR)``.
    """
    s = np.asarray(base_scores.scores, dtype=np.float64)
    if method == "degree":
        if g.m == 0:
            raise AlphaError("graph has no edges; set alpha manually")
        return g.n / (2.0 * g.m)
    if method == "closeness":
        apl = average_shortest_path(g, allow_disconnected=True)
        if apl == 0:
            raise AlphaError("no connected pairs; set alpha manually")
        return 1.0 / apl
    if method == "betweenness":
        mean = float(s.mean())
        if mean == 0:
            raise AlphaError("average betweenness is zero (e.g. a complete graph); set alpha manually")
        return 1.0 / mean
    if method == "kshell":
        return float(s.max()) / KSHELL_DIVISOR
    if method == "pagerank":
        return float(s.max())
    raise ValueError(f"unknown ranking method {method!r}")


def penalized_select(
    g: Graph,
    base_scores,
    cover: Cover,
    alpha: float,
    k_exponent: int = 1,
    bind: str = "penalized",
    record: bool = False,
) -> RankedSeeds:
    """Greedy selection of all nodes with community penalties.

    ``bind`` chooses whose community count divides the penalty: the
    ``"penalized"`` node ``u`` (default) or the ``"selected"`` node ``v``.
    Returned scores are each node's value at the moment it was picked.
    """
    scores = np.array(getattr(base_scores, "scores", base_scores), dtype=np.float64)
    n = g.n
    if len(scores) != n:
        raise ValueError("score vector length differs from graph size")
    if cover.n != n:
        raise ValueError(f"cover houses {cover.n} nodes, graph has {n}")
    n_c = cover.counts()
    if np.any(n_c == 0):
        missing = np.flatnonzero(n_c == 0)
        raise ValueError(f"nodes missing from cover: {missing[:10].tolist()}")
    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    if k_exponent not in (1, 2):
        raise ValueError("k_exponent must be 1 or 2")
    if bind not in ("penalized", "selected"):
        raise ValueError("bind must be 'penalized' or 'selected'")

    members = [np.asarray(c, dtype=np.int64) for c in cover.communities]
    size_pow = cover.sizes().astype(np.float64) ** k_exponent
    free = np.ones(n, dtype=bool)
    order = np.empty(n, dtype=np.int64)
    picked = np.empty(n)
    log = [] if record else None
    work = scores.copy()
    for t in range(n):
        v = int(np.argmax(np.where(free, work, -np.inf)))
        order[t] = v
        picked[v] = work[v]
        free[v] = False
        if alpha == 0:
            continue
        for ci in cover.membership[v]:
            mem = members[ci]
            mem = mem[free[mem]]
            if not len(mem):
                continue
            denom = (n_c[mem] if bind == "penalized" else n_c[v]) * size_pow[ci]
            pen = alpha / denom
            work[mem] -= pen
            if record:
                log.extend((v, int(u), ci, float(p)) for u, p in zip(mem, np.broadcast_to(pen, mem.shape)))
    return RankedSeeds(order, picked, penalty_log=log)


@dataclass(frozen=True)
class PenaltyConfig:
    base_method: str = "degree"
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    alpha: float | None = None
    k_exponent: int | None = None
    M: int = 10
    epsilon: float = DEFAULT_EPSILON
    seed: int = 0
    aggregate: str = "score"
    bind: str = "penalized"

    def __post_init__(self):
        if self.base_method not in centrality.METHODS:
            raise ValueError(f"unknown ranking method {self.base_method!r}")
        if self.alpha is not None and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.k_exponent not in (None, 1, 2):
            raise ValueError("k_exponent must be 1 or 2")
        if self.M < 1:
            raise ValueError("M must be >= 1")
        if self.aggregate not in ("score", "rank"):
            raise ValueError("aggregate must be 'score' or 'rank'")

    def exponent(self, cover: Cover | None = None) -> int:
        if self.k_exponent is not None:
            return self.k_exponent
        overlapping = cover.overlapping if cover is not None else self.detector.overlapping
        return 2 if overlapping else 1


def _housed(cover: Cover, n: int) -> Cover:
    if cover.n == n and np.all(cover.counts() > 0):
        return cover
    return cover_from_sets(n, list(cover.communities), overlapping=cover.overlapping)


def _one_round(g: Graph, cfg: PenaltyConfig, i: int, planted: Cover | None) -> RankedSeeds:
    replica = perturb_erp(g, PerturbConfig(cfg.epsilon, cfg.seed + i))
    if planted is None:
        cover = detect(replica, cfg.detector.with_seed(cfg.seed + i))
    else:
        cover = planted
    cover = _housed(cover, g.n)
    base = centrality.score(cfg.base_method, replica, tolerant=True)
    alpha = cfg.alpha if cfg.alpha is not None else alpha_for(cfg.base_method, replica, base)
    return penalized_select(replica, base, cover, alpha, cfg.exponent(cover), bind=cfg.bind)


def rcd_map(g: Graph, cfg: PenaltyConfig, cover: Cover | None = None, workers: int = 1) -> RankedSeeds:
    """Resample, detect, score and penalize ``M`` times, then average.

    Round ``i`` (1-based) perturbs with seed ``cfg.seed + i`` and seeds the
    detector the same way. A supplied ``cover`` replaces detection on every
    replica (planted communities). Scores are averaged per node; with
    ``aggregate='rank'`` the mean selection position is used instead and
    ``final_scores`` holds its negation.
    """
    idx = range(1, cfg.M + 1)
    if workers > 1 and cfg.M > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda i: _one_round(g, cfg, i, cover), idx))
    else:
        results = [_one_round(g, cfg, i, cover) for i in idx]
    if cfg.aggregate == "score":
        final = np.mean([r.final_scores for r in results], axis=0)
    else:
        pos = np.empty((len(results), g.n))
        for j, r in enumerate(results):
            pos[j, r.order] = np.arange(g.n)
        final = -pos.mean(axis=0)
    order = centrality.rank_order(final)
    return RankedSeeds(order, final, rounds=[r.order.tolist() for r in results])
