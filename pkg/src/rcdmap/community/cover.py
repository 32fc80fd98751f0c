from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..graph import Graph


@dataclass(frozen=True)
class Cover:
    """Assignment of nodes to (possibly overlapping) communities.

    ``communities`` are sorted tuples of node ids; ``membership[v]`` lists the
    indices of the communities holding ``v``. ``uncovered`` names nodes a
    detector could not place and that were given singleton communities.
    """

    communities: tuple[tuple[int, ...], ...]
    membership: tuple[tuple[int, ...], ...]
    overlapping: bool
    uncovered: tuple[int, ...] = ()
    info: dict = field(default_factory=dict, compare=False)

    @property
    def n(self) -> int:
        return len(self.membership)

    def __len__(self) -> int:
        return len(self.communities)

    def sizes(self) -> np.ndarray:
        return np.array([len(c) for c in self.communities], dtype=np.int64)

    def counts(self) -> np.ndarray:
        """Number of communities containing each node."""
        return np.array([len(m) for m in self.membership], dtype=np.int64)

    def labels(self) -> np.ndarray:
        """Community index per node; only for partitions."""
        if self.overlapping:
            raise ValueError("labels() is defined only for partitions")
        return np.array([m[0] for m in self.membership], dtype=np.int64)

    def node_sets(self) -> set[frozenset]:
        return {frozenset(c) for c in self.communities}

    def to_dict(self, labels=None) -> dict:
        lab = (lambda v: int(v)) if labels is None else (lambda v: int(labels[v]))
        return {
            "overlapping": self.overlapping,
            "communities": [[lab(v) for v in c] for c in self.communities],
            "membership": {str(lab(v)): list(m) for v, m in enumerate(self.membership)},
            "uncovered": [lab(v) for v in self.uncovered],
        }

    @classmethod
    def from_dict(cls, d: dict, n: int | None = None) -> "Cover":
        comms = [list(map(int, c)) for c in d["communities"]]
        if n is None:
            n = 1 + max(v for c in comms for v in c)
        return cover_from_sets(n, comms, overlapping=d.get("overlapping"))

    def validate(self) -> None:
        n = self.n
        seen = np.zeros(n, dtype=np.int64)
        for i, c in enumerate(self.communities):
            if not c:
                raise AssertionError(f"community {i} is empty")
            for v in c:
                if i not in self.membership[v]:
                    raise AssertionError(f"membership of {v} misses community {i}")
                seen[v] += 1
        if np.any(seen == 0):
            raise AssertionError("node without community")
        if not np.array_equal(seen, self.counts()):
            raise AssertionError("membership lists disagree with communities")
        if not self.overlapping and np.any(seen != 1):
            raise AssertionError("partition has a node in several communities")


def cover_from_labels(labels) -> Cover:
    """Partition cover from one label per node; communities ordered by smallest member."""
    labels = np.asarray(labels)
    _, first, inv = np.unique(labels, return_index=True, return_inverse=True)
    rank = np.empty(len(first), dtype=np.int64)
    rank[np.argsort(first)] = np.arange(len(first))
    dense = rank[inv.ravel()]
    groups = [[] for _ in range(len(first))]
    for v, c in enumerate(dense):
        groups[c].append(v)
    comms = tuple(tuple(g) for g in groups)
    membership = tuple((int(c),) for c in dense)
    return Cover(comms, membership, overlapping=False)


def cover_from_sets(n: int, sets, overlapping: bool | None = None, fill_singletons: bool = True) -> Cover:
    """Cover from node sets. Duplicate and empty sets are removed; nodes left
    out become singleton communities (recorded in ``uncovered``)."""
    uniq = []
    seen = set()
    for s in sets:
        t = tuple(sorted({int(v) for v in s}))
        if t and t not in seen:
            seen.add(t)
            uniq.append(t)
    covered = np.zeros(n, dtype=bool)
    for t in uniq:
        covered[list(t)] = True
    uncovered = tuple(int(v) for v in np.flatnonzero(~covered))
    if fill_singletons:
        uniq.extend((v,) for v in uncovered)
    uniq.sort(key=lambda t: (t[0], len(t), t))
    membership = [[] for _ in range(n)]
    for i, t in enumerate(uniq):
        for v in t:
            membership[v].append(i)
    is_overlap = any(len(m) > 1 for m in membership)
    if overlapping is None:
        overlapping = is_overlap
    elif not overlapping and is_overlap:
        raise ValueError("sets overlap but a partition was requested")
    return Cover(tuple(uniq), tuple(tuple(m) for m in membership), bool(overlapping), uncovered)


def modularity(g: Graph, cover: Cover) -> float:
    """Newman-Girvan ``Q = sum_c [e_c/m - (d_c/2m)^2]``."""
    if cover.overlapping:
        raise ValueError("modularity is defined for partitions only")
    if g.m == 0:
        return 0.0
    lab = cover.labels()
    k = len(cover)
    deg = g.degrees().astype(np.float64)
    d_c = np.bincount(lab, weights=deg, minlength=k)
    u, v = g.edges[:, 0], g.edges[:, 1]
    inside = lab[u] == lab[v]
    e_c = np.bincount(lab[u][inside], minlength=k).astype(np.float64)
    m = float(g.m)
    return float(np.sum(e_c / m - (d_c / (2 * m)) ** 2))
