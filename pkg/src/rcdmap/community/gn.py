from __future__ import annotations

import numpy as np

from ..centrality import edge_betweenness
from ..graph import Graph, connected_components
from .cover import Cover, cover_from_labels, modularity

DEFAULT_MAX_NODES = 2000


def detect_gn(g: Graph, max_nodes: int = DEFAULT_MAX_NODES) -> Cover:
    """Girvan-Newman divisive clustering.

    Removes the edge of highest betweenness (recomputed after every removal,
    lowest edge index on ties) and returns the component partition with the
    largest modularity on ``g``.
    """
    if g.n > max_nodes:
        raise ValueError(
            f"GN costs O(n m^2); n={g.n} exceeds the cap of {max_nodes}. Use lpa or infomap instead."
        )
    labels = connected_components(g)
    best_cover = cover_from_labels(labels)
    best_q = modularity(g, best_cover)
    n_comp = labels.max() + 1 if g.n else 0
    current = g
    history = [(int(n_comp), best_q)]
    while current.m:
        eb = edge_betweenness(current)
        drop = int(np.argmax(eb))
        keep = np.ones(current.m, dtype=bool)
        keep[drop] = False
        current = Graph.from_edges(g.n, current.edges[keep])
        labels = connected_components(current)
        if labels.max() + 1 > n_comp:
            n_comp = labels.max() + 1
            cover = cover_from_labels(labels)
            q = modularity(g, cover)
            history.append((int(n_comp), q))
            if q > best_q + 1e-12:
                best_q, best_cover = q, cover
    best_cover.info.update(modularity=best_q, history=history)
    return best_cover
