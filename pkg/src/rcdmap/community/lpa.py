from __future__ import annotations

import numpy as np

from ..graph import Graph
from .cover import Cover, cover_from_labels


def propagate_labels(adj: list[list[int]], rng: np.random.Generator, max_sweeps: int = 100):
    """Asynchronous label propagation on adjacency lists.

    Returns ``(labels, converged)``. A node keeps its label while it is among
    the most frequent neighbor labels; otherwise it picks uniformly among them.
    """
    n = len(adj)
    labels = np.arange(n)
    for _ in range(max_sweeps):
        changed = False
        for v in rng.permutation(n):
            nb = adj[v]
            if not nb:
                continue
            counts: dict[int, int] = {}
            for w in nb:
                lw = labels[w]
                counts[lw] = counts.get(lw, 0) + 1
            top = max(counts.values())
            best = [lab for lab, c in counts.items() if c == top]
            if labels[v] not in best:
                best.sort()
                labels[v] = best[rng.integers(len(best))]
                changed = True
        if not changed:
            return labels, True
    return labels, _is_stable(adj, labels)


def _is_stable(adj, labels) -> bool:
    for v, nb in enumerate(adj):
        if not nb:
            continue
        counts: dict[int, int] = {}
        for w in nb:
            counts[labels[w]] = counts.get(labels[w], 0) + 1
        if counts.get(labels[v], 0) < max(counts.values()):
            return False
    return True


def detect_lpa(g: Graph, seed=None, max_sweeps: int = 100) -> Cover:
    rng = np.random.default_rng(seed)
    labels, converged = propagate_labels(g.adjacency_lists(), rng, max_sweeps)
    cover = cover_from_labels(labels)
    cover.info["converged"] = converged
    return cover
