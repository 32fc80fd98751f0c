"""Two-level map equation minimization for undirected, unweighted graphs.

Visit rates are ``p_a = k_a / 2m`` and a module's exit rate is its cut weight
over ``2m``. Optimization is the usual greedy scheme: local node moves in
random order, then aggregation of modules into super-nodes, repeated until a
pass leaves every super-node where it is.
"""

from __future__ import annotations

import math

import numpy as np

from ..graph import Graph
from .cover import Cover, cover_from_labels

_EPS = 1e-12


def _plogp(x: float) -> float:
    return x * math.log2(x) if x > 0 else 0.0


def map_equation(g: Graph, labels) -> float:
    """Description length ``L(M)`` in bits of partition ``labels`` on ``g``."""
    labels = np.asarray(labels)
    if g.m == 0:
        return 0.0
    two_m = 2.0 * g.m
    deg = g.degrees().astype(np.float64)
    p = deg / two_m
    k = int(labels.max()) + 1
    vol = np.bincount(labels, weights=p, minlength=k)
    u, v = g.edges[:, 0], g.edges[:, 1]
    cut = labels[u] != labels[v]
    exit_w = np.bincount(labels[u][cut], minlength=k) + np.bincount(labels[v][cut], minlength=k)
    q = exit_w / two_m
    total = sum(_plogp(x) for x in [q.sum()])
    total -= 2.0 * sum(_plogp(x) for x in q)
    total -= sum(_plogp(x) for x in p)
    total += sum(_plogp(a + b) for a, b in zip(q, vol))
    return float(total)


class _Level:
    """One aggregation level: weighted super-nodes with fixed flow."""

    def __init__(self, flow, nbrs, out_w, two_m, node_entropy):
        self.flow = flow          # visit rate of each super-node
        self.nbrs = nbrs          # list of {neighbor: weight}, self excluded
        self.out_w = out_w        # external weight of each super-node
        self.two_m = two_m
        self.node_entropy = node_entropy  # sum plogp over original nodes

    def optimize(self, rng, max_sweeps=200):
        n = len(self.flow)
        module = np.arange(n)
        m_exit = np.array(self.out_w, dtype=np.float64) / self.two_m
        m_flow = np.array(self.flow, dtype=np.float64)
        sum_q = m_exit.sum()
        sum_plogp_q = sum(_plogp(x) for x in m_exit)
        sum_plogp_qp = sum(_plogp(a + b) for a, b in zip(m_exit, m_flow))
        moved_any = False
        for _ in range(max_sweeps):
            moves = 0
            for a in rng.permutation(n):
                old = module[a]
                w_to: dict[int, float] = {}
                for b, w in self.nbrs[a].items():
                    mb = module[b]
                    w_to[mb] = w_to.get(mb, 0.0) + w
                w_old = w_to.get(old, 0.0)
                out = self.out_w[a]
                fa = self.flow[a]
                qa_new = m_exit[old] + (2.0 * w_old - out) / self.two_m
                pa_new = m_flow[old] - fa
                base_q = sum_q - m_exit[old] + qa_new
                base_pq = sum_plogp_q - _plogp(m_exit[old]) + _plogp(qa_new)
                base_pqp = sum_plogp_qp - _plogp(m_exit[old] + m_flow[old]) + _plogp(qa_new + pa_new)
                cur_len = _plogp(sum_q) - 2.0 * sum_plogp_q + sum_plogp_qp
                best_delta, best_mod, best_vals = -_EPS, -1, None
                for mod in sorted(w_to):
                    if mod == old:
                        continue
                    wb = w_to[mod]
                    qb_new = m_exit[mod] + (out - 2.0 * wb) / self.two_m
                    pb_new = m_flow[mod] + fa
                    tq = base_q - m_exit[mod] + qb_new
                    tpq = base_pq - _plogp(m_exit[mod]) + _plogp(qb_new)
                    tpqp = base_pqp - _plogp(m_exit[mod] + m_flow[mod]) + _plogp(qb_new + pb_new)
                    delta = _plogp(tq) - 2.0 * tpq + tpqp - cur_len
                    if delta < best_delta:
                        best_delta, best_mod = delta, mod
                        best_vals = (qa_new, pa_new, qb_new, pb_new, tq, tpq, tpqp)
                if best_mod >= 0:
                    qa_new, pa_new, qb_new, pb_new, sum_q, sum_plogp_q, sum_plogp_qp = best_vals
                    m_exit[old], m_flow[old] = max(qa_new, 0.0), max(pa_new, 0.0)
                    m_exit[best_mod], m_flow[best_mod] = qb_new, pb_new
                    module[a] = best_mod
                    moves += 1
            if moves == 0:
                break
            moved_any = True
        return module, moved_any

    def aggregate(self, module):
        _, dense = np.unique(module, return_inverse=True)
        k = int(dense.max()) + 1
        flow = np.bincount(dense, weights=self.flow, minlength=k)
        nbrs: list[dict[int, float]] = [dict() for _ in range(k)]
        for a, adj in enumerate(self.nbrs):
            ma = dense[a]
            for b, w in adj.items():
                mb = dense[b]
                if ma != mb:
                    nbrs[ma][mb] = nbrs[ma].get(mb, 0.0) + w
        out_w = [sum(d.values()) for d in nbrs]
        return dense, _Level(flow, nbrs, out_w, self.two_m, self.node_entropy)


def _single_trial(g: Graph, rng, max_levels: int) -> np.ndarray:
    two_m = 2.0 * g.m
    deg = g.degrees().astype(np.float64)
    flow = deg / two_m
    nbrs = [{int(w): 1.0 for w in g.neighbors(v)} for v in range(g.n)]
    level = _Level(flow, nbrs, deg.tolist(), two_m, sum(_plogp(x) for x in flow))
    assignment = np.arange(g.n)
    for _ in range(max_levels):
        module, moved = level.optimize(rng)
        if not moved:
            break
        dense, level = level.aggregate(module)
        assignment = dense[assignment]
    return assignment


def detect_infomap(g: Graph, seed=None, trials: int = 10, max_levels: int = 50) -> Cover:
    """Greedy two-level Infomap, best of ``trials`` randomized runs.

    Isolated nodes stay singletons.
    """
    rng = np.random.default_rng(seed)
    if g.m == 0:
        return cover_from_labels(np.arange(g.n))
    best, best_len = None, np.inf
    for _ in range(max(1, trials)):
        assignment = _single_trial(g, rng, max_levels)
        length = map_equation(g, assignment)
        if length < best_len - 1e-12:
            best, best_len = assignment, length
    cover = cover_from_labels(best)
    cover.info["codelength"] = best_len
    return cover
