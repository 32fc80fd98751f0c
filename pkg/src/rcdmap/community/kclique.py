from __future__ import annotations

import scipy.sparse as sp
import numpy as np

from ..graph import Graph
from .cover import Cover, cover_from_sets


def maximal_cliques(g: Graph):
    """Bron-Kerbosch with Tomita pivoting, iterative. Yields sorted tuples."""
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    # degeneracy-free outer loop: each clique found once via ordering on the first vertex
    for v in range(g.n):
        later = {w for w in adj[v] if w > v}
        earlier = {w for w in adj[v] if w < v}
        stack = [([v], later, earlier)]
        while stack:
            r, p, x = stack.pop()
            if not p and not x:
                yield tuple(sorted(r))
                continue
            pivot = max(p | x, key=lambda u: len(adj[u] & p))
            for u in sorted(p - adj[pivot]):
                stack.append((r + [u], p & adj[u], x & adj[u]))
                p = p - {u}
                x = x | {u}


def detect_kclique(g: Graph, k: int = 3) -> Cover:
    """Clique percolation.

    Two k-cliques are adjacent when they share ``k - 1`` nodes. Working on
    maximal cliques of size at least ``k`` gives the same communities: every
    k-clique lies in a maximal clique and two maximal cliques sharing ``k - 1``
    nodes contain adjacent k-cliques. Nodes in no k-clique become singletons.
    """
    if k < 3:
        raise ValueError("k must be at least 3")
    cliques = [set(c) for c in maximal_cliques(g) if len(c) >= k]
    nc = len(cliques)
    if nc == 0:
        return cover_from_sets(g.n, [], overlapping=True)
    member: dict[int, list[int]] = {}
    for i, c in enumerate(cliques):
        for v in c:
            member.setdefault(v, []).append(i)
    rows, cols = [], []
    for i, c in enumerate(cliques):
        cand = {j for v in c for j in member[v] if j > i}
        for j in cand:
            if len(c & cliques[j]) >= k - 1:
                rows.append(i)
                cols.append(j)
    a = sp.coo_matrix((np.ones(len(rows)), (rows, cols)), shape=(nc, nc))
    _, comp = sp.csgraph.connected_components(a, directed=False)
    groups: dict[int, set] = {}
    for i, c in enumerate(comp):
        groups.setdefault(int(c), set()).update(cliques[i])
    return cover_from_sets(g.n, groups.values(), overlapping=True)
