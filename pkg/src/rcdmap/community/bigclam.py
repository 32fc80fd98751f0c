"""BigCLAM: nonnegative community affiliation model fit by projected gradient ascent.

Edge probability is ``1 - exp(-F_u . F_v)``; the log-likelihood is

    sum_{(u,v) in E} log(1 - exp(-F_u . F_v)) - sum_{(u,v) not in E} F_u . F_v

over unordered pairs. Non-edge sums use the ``sum(F)`` identity so a step
costs O(m C + n C).
"""

from __future__ import annotations

import numpy as np

from ..graph import Graph
from .cover import Cover, cover_from_sets

EDGE_PROB_FLOOR = 1e-10


def log_likelihood(g: Graph, F: np.ndarray, edges=None) -> float:
    e = g.edges if edges is None else edges
    u, v = e[:, 0], e[:, 1]
    x = np.einsum("ij,ij->i", F[u], F[v])
    edge_term = np.log(np.maximum(-np.expm1(-x), EDGE_PROB_FLOOR)).sum()
    s = F.sum(axis=0)
    all_pairs = 0.5 * (s @ s - np.einsum("ij,ij->", F, F))
    return float(edge_term - (all_pairs - x.sum()))


def gradient(g: Graph, F: np.ndarray, edges=None) -> np.ndarray:
    e = g.edges if edges is None else edges
    u, v = e[:, 0], e[:, 1]
    x = np.einsum("ij,ij->i", F[u], F[v])
    p = np.maximum(-np.expm1(-x), EDGE_PROB_FLOOR)
    # d/dx log(1 - e^-x) = e^-x / (1 - e^-x); the non-edge part is added back per edge
    coef = (np.exp(-x) / p + 1.0)[:, None]
    grad = -(F.sum(axis=0)[None, :] - F)
    np.add.at(grad, u, coef * F[v])
    np.add.at(grad, v, coef * F[u])
    return grad


def _initial(g: Graph, c: int, rng) -> np.ndarray:
    """Seed each community with the ego network of a node of low conductance."""
    n = g.n
    deg = g.degrees().astype(np.float64)
    two_m = max(2.0 * g.m, 1.0)
    a = g.adjacency()
    triangles = np.asarray((a @ a).multiply(a).sum(axis=1)).ravel() / 2.0
    inside = deg + triangles
    vol = deg + a @ deg
    cut = vol - 2.0 * inside
    denom = np.minimum(vol, two_m - vol)
    cond = np.where(denom > 0, cut / np.where(denom > 0, denom, 1.0), 1.0)
    order = np.lexsort((rng.random(n), cond))
    F = rng.random((n, c)) * 0.1
    used = np.zeros(n, dtype=bool)
    j = 0
    for v in order:
        if j == c:
            break
        if used[v]:
            continue
        ego = np.append(g.neighbors(v), v)
        F[ego, j] = 1.0
        used[ego] = True
        j += 1
    return F


def fit(g: Graph, c: int, seed=None, max_iter: int = 500, tol: float = 1e-6, edges=None, trace=None):
    """Maximize the likelihood from the conductance-based start. Returns F."""
    rng = np.random.default_rng(seed)
    F = _initial(g, c, rng)
    ll = log_likelihood(g, F, edges)
    step = 1.0
    for _ in range(max_iter):
        grad = gradient(g, F, edges)
        accepted = False
        while step > 1e-12:
            cand = np.maximum(F + step * grad, 0.0)
            new = log_likelihood(g, cand, edges)
            if new >= ll:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        gain = new - ll
        F, ll = cand, new
        if trace is not None:
            trace.append(ll)
        step *= 2.0
        if gain <= tol * max(1.0, abs(ll)):
            break
    return F


def _held_out_score(g: Graph, c: int, seed, frac=0.1) -> float:
    rng = np.random.default_rng(seed)
    m = g.m
    k = max(1, int(round(frac * m)))
    perm = rng.permutation(m)
    test_e, train_e = g.edges[perm[:k]], g.edges[perm[k:]]
    edge_set = g.edge_set()
    non = []
    while len(non) < k:
        a, b = sorted(rng.integers(g.n, size=2))
        if a != b and (a, b) not in edge_set:
            non.append((a, b))
    non = np.array(non)
    F = fit(g, c, seed=seed, edges=train_e)
    xe = np.einsum("ij,ij->i", F[test_e[:, 0]], F[test_e[:, 1]])
    xn = np.einsum("ij,ij->i", F[non[:, 0]], F[non[:, 1]])
    return float(np.log(np.maximum(-np.expm1(-xe), EDGE_PROB_FLOOR)).sum() - xn.sum())


def choose_num_communities(g: Graph, candidates=range(2, 11), seed=None) -> int:
    """Pick C by held-out likelihood of 10% of edges plus as many non-edges."""
    cands = [c for c in candidates if c <= g.n]
    if not cands or g.m < 10:
        return max(1, min(2, g.n))
    scores = [_held_out_score(g, c, seed) for c in cands]
    return cands[int(np.argmax(scores))]


def detect_bigclam(g: Graph, num_communities: int | None = None, seed=None, max_iter: int = 500) -> Cover:
    """Node ``u`` joins community ``c`` iff ``F[u, c] >= sqrt(-log(1 - 1/n))``;
    nodes below every threshold go to their strongest affiliation."""
    if num_communities is None:
        num_communities = choose_num_communities(g, seed=seed)
    if num_communities < 1:
        raise ValueError("num_communities must be >= 1")
    if num_communities > g.n:
        raise ValueError(f"num_communities={num_communities} exceeds n={g.n}")
    F = fit(g, num_communities, seed=seed, max_iter=max_iter)
    n = g.n
    delta = np.sqrt(-np.log(1.0 - 1.0 / n)) if n > 1 else 0.0
    member = F >= delta
    lonely = ~member.any(axis=1)
    member[lonely, np.argmax(F[lonely], axis=1)] = True
    sets = [np.flatnonzero(member[:, j]).tolist() for j in range(num_communities)]
    cover = cover_from_sets(n, sets, overlapping=True)
    cover.info.update(num_communities=num_communities, F=F, threshold=delta)
    return cover
