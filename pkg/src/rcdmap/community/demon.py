from __future__ import annotations

import numpy as np

from ..graph import Graph
from .cover import Cover, cover_from_sets
from .lpa import propagate_labels


def _merge_into(pool: list[set], cand: set, epsilon: float) -> None:
    """Insert ``cand``; merge with any community that contains the smaller of
    the two up to a fraction ``epsilon`` of its nodes, repeating on the union."""
    while True:
        for i, c in enumerate(pool):
            small, big = (cand, c) if len(cand) <= len(c) else (c, cand)
            if len(small - big) <= epsilon * len(small):
                cand = cand | c
                pool.pop(i)
                break
        else:
            pool.append(cand)
            return


def detect_demon(g: Graph, epsilon_merge: float = 0.25, seed=None, max_sweeps: int = 100) -> Cover:
    """Ego-network label propagation with containment merging.

    For every node ``v``, LPA runs on the neighbors of ``v`` and the edges among
    them (``v`` itself removed); each local community plus ``v`` is merged
    into the global pool.
    """
    if not 0.0 <= epsilon_merge <= 1.0:
        raise ValueError("epsilon_merge must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    pool: list[set] = []
    adj = [set(g.neighbors(v).tolist()) for v in range(g.n)]
    for v in rng.permutation(g.n):
        ego = sorted(adj[v])
        if not ego:
            continue
        local = {w: i for i, w in enumerate(ego)}
        sub = [[local[x] for x in adj[w] if x in local] for w in ego]
        labels, _ = propagate_labels(sub, rng, max_sweeps)
        groups: dict[int, set] = {}
        for i, lab in enumerate(labels):
            groups.setdefault(int(lab), set()).add(ego[i])
        for grp in groups.values():
            _merge_into(pool, grp | {int(v)}, epsilon_merge)
    return cover_from_sets(g.n, pool, overlapping=True)
