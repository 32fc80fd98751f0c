"""Baseline node rankers: degree, closeness, betweenness, k-shell, PageRank."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import _kernels
from .graph import DisconnectedGraphError, Graph

METHODS = ("degree", "closeness", "betweenness", "kshell", "pagerank")

# column names used in result tables
DISPLAY_NAMES = {
    "degree": "Centrality",
    "closeness": "Closeness",
    "betweenness": "Betweenness",
    "kshell": "K-shell",
    "pagerank": "PageRank",
}


class ConvergenceError(RuntimeError):
    def __init__(self, msg, last):
        super().__init__(msg)
        self.last = last


@dataclass(frozen=True)
class ScoreVector:
    scores: np.ndarray
    method_tag: str

    def __len__(self):
        return len(self.scores)

    def ranking(self) -> np.ndarray:
        return rank_order(self.scores)

    def top(self, k: int) -> list[int]:
        return self.ranking()[:k].tolist()


def rank_order(scores) -> np.ndarray:
    """Node ids by descending score, smaller id first on ties."""
    scores = np.asarray(scores, dtype=np.float64)
    return np.lexsort((np.arange(len(scores)), -scores))


def degree_centrality(g: Graph) -> ScoreVector:
    return ScoreVector(g.degrees().astype(np.float64), "degree")


def closeness_centrality(g: Graph, allow_disconnected: bool = False, normalized: bool = False,
                         backend=None) -> ScoreVector:
    """``1 / sum_j d_ij``, or ``(n - 1) / sum_j d_ij`` when ``normalized``.

    With ``allow_disconnected`` the sum runs over reachable nodes and
    isolated nodes score 0; otherwise a disconnected graph raises.
    """
    sums, reach = _kernels.distance_sums(g.indptr, g.indices, g.n, backend=backend)
    if not allow_disconnected and np.any(reach < g.n - 1):
        raise DisconnectedGraphError("closeness needs a connected graph")
    with np.errstate(divide="ignore"):
        scores = np.where(sums > 0, 1.0 / np.where(sums > 0, sums, 1.0), 0.0)
    if normalized:
        scores *= g.n - 1
    return ScoreVector(scores, "closeness")


def betweenness_centrality(g: Graph, backend=None) -> ScoreVector:
    node, _ = _kernels.brandes(g.indptr, g.indices, g.edge_ids, g.n, g.m, backend=backend)
    return ScoreVector(node, "betweenness")


def edge_betweenness(g: Graph, backend=None) -> np.ndarray:
    """Betweenness of every edge in ``g.edges`` order."""
    _, edge = _kernels.brandes(g.indptr, g.indices, g.edge_ids, g.n, g.m, backend=backend)
    return edge


def core_numbers(g: Graph) -> np.ndarray:
    """Bucket-queue k-core decomposition (Batagelj-Zaversnik); 0 for isolated nodes."""
    n = g.n
    deg = g.degrees().astype(np.int64).copy()
    if n == 0:
        return deg
    maxd = int(deg.max())
    bins = np.bincount(deg, minlength=maxd + 1)
    start = np.concatenate([[0], np.cumsum(bins)[:-1]])
    order = np.argsort(deg, kind="stable")
    pos = np.empty(n, np.int64)
    pos[order] = np.arange(n)
    vert = order.copy()
    start = start.copy()
    indptr, indices = g.indptr, g.indices
    for i in range(n):
        v = vert[i]
        for w in indices[indptr[v]:indptr[v + 1]]:
            if deg[w] > deg[v]:
                dw = deg[w]
                pw = pos[w]
                ps = start[dw]
                u = vert[ps]
                if u != w:
                    vert[pw], vert[ps] = u, w
                    pos[u], pos[w] = pw, ps
                start[dw] += 1
                deg[w] -= 1
    return deg


def k_shell(g: Graph, allow_isolated: bool = False) -> ScoreVector:
    """Shell index per node: repeatedly peel nodes of remaining degree <= k, k = 1, 2, ..."""
    deg = g.degrees()
    if not allow_isolated and np.any(deg == 0):
        raise ValueError("k-shell assumes no isolated nodes")
    return ScoreVector(core_numbers(g).astype(np.float64), "kshell")


def pagerank(g: Graph, c: float = 0.15, tol: float = 1e-10, max_iter: int = 1000) -> ScoreVector:
    """Power iteration of ``PR_i = (1-c) sum_j a_ji PR_j / k_j + c/n``.

    Mass sitting on isolated nodes is spread uniformly so the iterate stays a
    probability vector.
    """
    if not 0.0 < c < 1.0:
        raise ValueError("skip probability c must lie in (0, 1)")
    n = g.n
    deg = g.degrees().astype(np.float64)
    a = g.adjacency()
    dangling = deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, deg))
    pr = np.full(n, 1.0 / n)
    for _ in range(max_iter):
        new = (1.0 - c) * (a @ (pr * inv) + pr[dangling].sum() / n) + c / n
        new /= new.sum()
        err = np.abs(new - pr).sum()
        pr = new
        if err < tol:
            return ScoreVector(pr, "pagerank")
    raise ConvergenceError(f"PageRank did not converge in {max_iter} iterations", pr)


def score(method: str, g: Graph, tolerant: bool = False) -> ScoreVector:
    """Dispatch by method tag. ``tolerant`` relaxes connectivity preconditions,
    which is what perturbed replicas need."""
    if method == "degree":
        return degree_centrality(g)
    if method == "closeness":
        return closeness_centrality(g, allow_disconnected=tolerant)
    if method == "betweenness":
        return betweenness_centrality(g)
    if method == "kshell":
        return k_shell(g, allow_isolated=tolerant)
    if method == "pagerank":
        return pagerank(g)
    raise ValueError(f"unknown ranking method {method!r}; choose from {', '.join(METHODS)}")


RANKERS: dict[str, Callable[[Graph], ScoreVector]] = {
    "degree": degree_centrality,
    "closeness": closeness_centrality,
    "betweenness": betweenness_centrality,
    "kshell": k_shell,
    "pagerank": pagerank,
}
