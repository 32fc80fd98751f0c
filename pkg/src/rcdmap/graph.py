"""Immutable undirected graph, edge-list I/O and topological statistics."""

from __future__ import annotations

import io
import logging
from dataclasses import dataclass, field
from typing import Iterable, TextIO

import numpy as np
import scipy.sparse as sp

from . import _kernels

log = logging.getLogger(__name__)


class EdgeListError(ValueError):
    """Raised for malformed or empty edge-list input."""


class DisconnectedGraphError(ValueError):
    """Raised when an operation needs a connected graph."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph on nodes ``0..n-1`` stored in CSR form.

    ``edges`` holds each undirected edge once as ``(u, v)`` with ``u < v``,
    sorted lexicographically. ``labels[i]`` is the original id of dense
    node ``i``.
    """

    n: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    labels: np.ndarray
    self_loops_dropped: int = 0
    _edge_ids: np.ndarray = field(default=None, repr=False)

    # construction -------------------------------------------------------

    @classmethod
    def from_edges(cls, n: int, edges: Iterable, labels=None, self_loops_dropped: int = 0) -> "Graph":
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint outside 0..n-1")
        loops = e[:, 0] == e[:, 1]
        self_loops_dropped += int(loops.sum())
        e = np.sort(e[~loops], axis=1)
        if e.size:
            e = np.unique(e, axis=0)
        m = len(e)
        src = np.concatenate([e[:, 0], e[:, 1]])
        dst = np.concatenate([e[:, 1], e[:, 0]])
        eid = np.concatenate([np.arange(m), np.arange(m)])
        order = np.lexsort((dst, src))
        src, dst, eid = src[order], dst[order], eid[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=n), out=indptr[1:])
        if labels is None:
            labels = np.arange(n, dtype=np.int64)
        labels = np.asarray(labels, dtype=np.int64)
        if len(labels) != n:
            raise ValueError("labels must have length n")
        arrays = [e, indptr, dst.astype(np.int64), labels, eid.astype(np.int64)]
        for a in arrays:
            a.setflags(write=False)
        return cls(n, arrays[0], arrays[1], arrays[2], arrays[3], self_loops_dropped, arrays[4])

    # accessors ----------------------------------------------------------

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def edge_ids(self) -> np.ndarray:
        """Undirected edge index of every CSR slot (aligned with ``indices``)."""
        return self._edge_ids

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v]:self.indptr[v + 1]]

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def degree(self, v: int) -> int:
        return int(self.indptr[v + 1] - self.indptr[v])

    def has_edge(self, u: int, v: int) -> bool:
        nb = self.neighbors(u)
        i = np.searchsorted(nb, v)
        return bool(i < len(nb) and nb[i] == v)

    def edge_set(self) -> set[tuple[int, int]]:
        return {(int(u), int(v)) for u, v in self.edges}

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices), dtype=np.float64)
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def adjacency_lists(self) -> list[list[int]]:
        return [self.neighbors(v).tolist() for v in range(self.n)]

    def subgraph(self, nodes) -> "Graph":
        """Induced subgraph on ``nodes`` (sorted), relabeled densely; labels carried over."""
        nodes = np.unique(np.asarray(nodes, dtype=np.int64))
        remap = np.full(self.n, -1, dtype=np.int64)
        remap[nodes] = np.arange(len(nodes))
        keep = (remap[self.edges[:, 0]] >= 0) & (remap[self.edges[:, 1]] >= 0) if self.m else np.zeros(0, bool)
        e = remap[self.edges[keep]] if self.m else np.zeros((0, 2), dtype=np.int64)
        return Graph.from_edges(len(nodes), e, labels=self.labels[nodes])

    def relabeled(self, perm) -> "Graph":
        """Graph with node ``v`` renamed ``perm[v]``."""
        perm = np.asarray(perm, dtype=np.int64)
        e = perm[self.edges] if self.m else self.edges
        labels = np.empty(self.n, dtype=np.int64)
        labels[perm] = self.labels
        return Graph.from_edges(self.n, e, labels=labels)

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"


# edge-list I/O ------------------------------------------------------------

def parse_edge_list(text: str | TextIO, relabel: bool = True) -> Graph:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` or ``%`` and blank lines are ignored. Duplicate
    and reversed edges collapse, self-loops are dropped (and counted). With
    ``relabel`` the original ids are mapped to ``0..n-1`` in ascending order;
    otherwise ids are used directly and ``n = max id + 1``.
    """
    stream = io.StringIO(text) if isinstance(text, str) else text
    pairs = []
    for lineno, line in enumerate(stream, 1):
        s = line.strip()
        if not s or s[0] in "#%":
            continue
        tok = s.split()
        if len(tok) != 2:
            raise EdgeListError(f"line {lineno}: expected 2 tokens, got {len(tok)}")
        try:
            pairs.append((int(tok[0]), int(tok[1])))
        except ValueError:
            raise EdgeListError(f"line {lineno}: non-integer node id in {s!r}") from None
    if not pairs:
        raise EdgeListError("empty edge list")
    arr = np.array(pairs, dtype=np.int64)
    if relabel:
        labels, dense = np.unique(arr, return_inverse=True)
        dense = dense.reshape(-1, 2)
        n = len(labels)
    else:
        if arr.min() < 0:
            raise EdgeListError("negative node id with relabel=False")
        dense, n, labels = arr, int(arr.max()) + 1, None
    g = Graph.from_edges(n, dense, labels=labels)
    if g.self_loops_dropped:
        log.warning("dropped %d self-loop(s)", g.self_loops_dropped)
    return g


def read_edge_list(path, relabel: bool = True) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, relabel=relabel)


def format_edge_list(g: Graph, original_labels: bool = True) -> str:
    lab = g.labels if original_labels else np.arange(g.n)
    return "".join(f"{lab[u]} {lab[v]}\n" for u, v in g.edges)


def write_edge_list(g: Graph, path, original_labels: bool = True) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g, original_labels))


# components ---------------------------------------------------------------

def connected_components(g: Graph) -> np.ndarray:
    """Component index per node; components numbered by their smallest node."""
    _, comp = sp.csgraph.connected_components(g.adjacency(), directed=False)
    # renumber by first appearance so component 0 contains node 0
    _, first = np.unique(comp, return_index=True)
    order = np.argsort(first)
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    return rank[comp]


def is_connected(g: Graph) -> bool:
    return g.n > 0 and int(connected_components(g).max()) == 0


def largest_connected_component(g: Graph) -> Graph:
    """Induced subgraph on the largest component.

    Ties go to the component containing the smallest original node id.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    comp = connected_components(g)
    sizes = np.bincount(comp)
    best = np.flatnonzero(sizes == sizes.max())
    if len(best) > 1:
        min_label = [g.labels[comp == c].min() for c in best]
        best = best[int(np.argmin(min_label))]
    else:
        best = best[0]
    return g.subgraph(np.flatnonzero(comp == best))


# statistics ---------------------------------------------------------------

@dataclass(frozen=True)
class GraphStats:
    n: int
    m: int
    avg_degree: float
    max_degree: int
    spectral_radius: float
    avg_shortest_path: float
    avg_betweenness: float

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "m": self.m,
            "avg_degree": self.avg_degree,
            "max_degree": self.max_degree,
            "spectral_radius": self.spectral_radius,
            "avg_shortest_path": self.avg_shortest_path,
            "avg_betweenness": self.avg_betweenness,
        }


def spectral_radius(g: Graph, rtol: float = 1e-9, max_iter: int = 10000) -> float:
    """Largest adjacency eigenvalue by power iteration from the all-ones vector.

    Iterates on ``A + I``: on bipartite graphs ``-tau`` is also an eigenvalue
    of ``A`` and plain iteration oscillates; the shift makes the Perron root
    strictly dominant without moving the eigenvector.
    """
    if g.m == 0:
        return 0.0
    a = g.adjacency()
    x = np.ones(g.n) / np.sqrt(g.n)
    lam = 0.0
    for _ in range(max_iter):
        y = a @ x + x
        new = float(x @ y)  # Rayleigh quotient of A + I
        norm = np.linalg.norm(y)
        x = y / norm
        if abs(new - lam) <= rtol * abs(new):
            lam = new
            break
        lam = new
    return lam - 1.0


def average_shortest_path(g: Graph, allow_disconnected: bool = False) -> float:
    sums, reach = _kernels.distance_sums(g.indptr, g.indices, g.n)
    if not allow_disconnected and np.any(reach < g.n - 1):
        raise DisconnectedGraphError("average shortest path undefined on a disconnected graph")
    total = reach.sum()
    return float(sums.sum() / total) if total else 0.0


def graph_stats(g: Graph) -> GraphStats:
    """Table-style summary of a connected graph."""
    from .centrality import betweenness_centrality

    if not is_connected(g):
        raise DisconnectedGraphError("graph_stats requires a connected graph")
    deg = g.degrees()
    return GraphStats(
        n=g.n,
        m=g.m,
        avg_degree=2.0 * g.m / g.n,
        max_degree=int(deg.max()),
        spectral_radius=spectral_radius(g),
        avg_shortest_path=average_shortest_path(g),
        avg_betweenness=float(betweenness_centrality(g).scores.mean()),
    )
