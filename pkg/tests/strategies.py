"""Hypothesis strategies for small simple graphs."""

import itertools

from hypothesis import strategies as st

from rcdmap.graph import Graph


@st.composite
def edge_lists(draw, min_n=1, max_n=9, connected=False, min_degree=0):
    n = draw(st.integers(min_n, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    edges = {p for p, keep in zip(pairs, mask) if keep}
    if connected and n > 1:
        # thread a random spanning tree through the nodes
        order = draw(st.permutations(range(n)))
        for i in range(1, n):
            j = draw(st.integers(0, i - 1))
            a, b = order[i], order[j]
            edges.add((min(a, b), max(a, b)))
    if min_degree:
        deg = [0] * n
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        for v in range(n):
            if deg[v] < min_degree and n > 1:
                w = (v + 1) % n
                edges.add((min(v, w), max(v, w)))
                deg[v] += 1
                deg[w] += 1
    return n, sorted(edges)


def graphs(**kw):
    return edge_lists(**kw).map(lambda ne: Graph.from_edges(ne[0], ne[1]))
