"""Uniform (Erdos-Renyi) edge perturbation of a graph."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph

DEFAULT_EPSILON = 0.05


@dataclass(frozen=True)
class PerturbConfig:
    epsilon: float = DEFAULT_EPSILON
    seed: int | None = None

    def __post_init__(self):
        if self.epsilon < 0:
            raise ValueError("epsilon must be non-negative")


def flip_probability(g: Graph, epsilon: float) -> float:
    """Per-pair toggle probability ``min(1, epsilon * m / C(n, 2))``."""
    pairs = g.n * (g.n - 1) // 2
    if pairs == 0:
        return 0.0
    return min(1.0, epsilon * g.m / pairs)


def _codes(edges: np.ndarray, n: int) -> np.ndarray:
    return edges[:, 0] * n + edges[:, 1]


def perturb_erp(g: Graph, cfg: PerturbConfig) -> Graph:
    """Toggle every unordered pair independently with probability
    :func:`flip_probability`. One uniform draw per pair, row by row."""
    if g.n < 2:
        raise ValueError("perturbation needs at least two nodes")
    p = flip_probability(g, cfg.epsilon)
    if p == 0.0:
        return Graph.from_edges(g.n, g.edges, labels=g.labels)
    n = g.n
    rng = np.random.default_rng(cfg.seed)
    toggles = []
    for i in range(n - 1):
        js = np.flatnonzero(rng.random(n - 1 - i) < p)
        if len(js):
            toggles.append(i * n + i + 1 + js)
    flips = np.concatenate(toggles) if toggles else np.zeros(0, dtype=np.int64)
    codes = np.setxor1d(_codes(g.edges, n), flips.astype(np.int64))
    edges = np.stack([codes // n, codes % n], axis=1)
    return Graph.from_edges(n, edges, labels=g.labels)


def toggled_pairs(g: Graph, h: Graph) -> int:
    """Size of the symmetric difference of the edge sets of ``g`` and ``h``."""
    return len(np.setxor1d(_codes(g.edges, g.n), _codes(h.edges, h.n)))
