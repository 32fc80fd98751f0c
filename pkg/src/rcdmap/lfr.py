"""LFR benchmark graphs with planted, non-overlapping communities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .community import Cover, cover_from_labels
from .graph import Graph


class InfeasibleConfig(ValueError):
    pass


@dataclass(frozen=True)
class LfrConfig:
    n: int = 250
    tau1: float = 3.0
    tau2: float = 1.5
    mu: float = 0.1
    avg_degree: float = 5.0
    max_degree: int = 50
    min_community: int = 10
    max_community: int = 100
    seed: int | None = None
    max_restarts: int = 100

    def __post_init__(self):
        if self.tau1 <= 1 or self.tau2 <= 1:
            raise ValueError("tau1 and tau2 must exceed 1")
        if not 0.0 <= self.mu <= 1.0:
            raise ValueError("mu must lie in [0, 1]")
        if not 1 <= self.min_community <= self.max_community <= self.n:
            raise ValueError("need 1 <= min_community <= max_community <= n")
        if self.max_degree >= self.n:
            raise ValueError("max_degree must be below n")


def _powerlaw_pmf(lo: int, hi: int, exponent: float):
    support = np.arange(lo, hi + 1)
    w = support.astype(np.float64) ** -exponent
    return support, w / w.sum()


def _sample(rng, support, pmf, size):
    cdf = np.cumsum(pmf)
    cdf[-1] = 1.0
    return support[np.searchsorted(cdf, rng.random(size), side="right")]


def min_degree_for_mean(tau: float, mean: float, kmax: int) -> int:
    """Integer lower cutoff whose truncated power law has mean closest to ``mean``."""
    best, best_err = 1, np.inf
    for kmin in range(1, kmax + 1):
        s, p = _powerlaw_pmf(kmin, kmax, tau)
        err = abs(float(s @ p) - mean)
        if err < best_err:
            best, best_err = kmin, err
    return best


def _community_sizes(rng, cfg: LfrConfig) -> list[int]:
    support, pmf = _powerlaw_pmf(cfg.min_community, cfg.max_community, cfg.tau2)
    sizes: list[int] = []
    total = 0
    for _ in range(100 * cfg.n):
        if total == cfg.n:
            return sizes
        s = int(_sample(rng, support, pmf, 1)[0])
        if total + s <= cfg.n:
            sizes.append(s)
            total += s
            continue
        rest = cfg.n - total
        if rest >= cfg.min_community:
            sizes.append(rest)
            return sizes
        if sizes:
            total -= sizes.pop(int(rng.integers(len(sizes))))
    raise InfeasibleConfig("could not draw community sizes summing to n")


def _wire(rng, stubs: np.ndarray, forbid, existing: set, rounds: int = 50):
    """Random stub matching; pairs failing ``forbid`` or repeating an edge are retried."""
    edges = []
    left = stubs.copy()
    for _ in range(rounds):
        if len(left) < 2:
            break
        rng.shuffle(left)
        if len(left) % 2:
            left = left[:-1]
        a, b = left[0::2], left[1::2]
        retry = []
        for u, v in zip(a.tolist(), b.tolist()):
            key = (u, v) if u < v else (v, u)
            if u == v or forbid(u, v) or key in existing:
                retry.extend((u, v))
            else:
                existing.add(key)
                edges.append(key)
        left = np.array(retry, dtype=np.int64)
    return edges


def _attempt(rng, cfg: LfrConfig):
    kmin = min_degree_for_mean(cfg.tau1, cfg.avg_degree, cfg.max_degree)
    support, pmf = _powerlaw_pmf(kmin, cfg.max_degree, cfg.tau1)
    deg = _sample(rng, support, pmf, cfg.n)
    # unbiased rounding keeps the expected inter-community share at mu
    raw = (1.0 - cfg.mu) * deg
    k_in = np.floor(raw).astype(np.int64)
    k_in += rng.random(cfg.n) < (raw - k_in)
    sizes = np.array(_community_sizes(rng, cfg), dtype=np.int64)
    if k_in.max() > sizes.max() - 1:
        raise InfeasibleConfig(
            f"internal degree {k_in.max()} does not fit the largest community ({sizes.max()} nodes)"
        )
    free = sizes.copy()
    comm = np.full(cfg.n, -1, dtype=np.int64)
    for v in np.lexsort((rng.random(cfg.n), -k_in)):
        ok = np.flatnonzero((free > 0) & (sizes > k_in[v]))
        if not len(ok):
            raise InfeasibleConfig("no community has room for a node of this internal degree")
        c = ok[rng.integers(len(ok))]
        comm[v] = c
        free[c] -= 1
    k_out = deg - k_in
    for c in range(len(sizes)):
        mem = np.flatnonzero(comm == c)
        if k_in[mem].sum() % 2:
            # add one internal stub where there is room, else hand one to the outside
            room = mem[(k_in[mem] < sizes[c] - 1) & (deg[mem] < cfg.max_degree)]
            if len(room):
                k_in[room[rng.integers(len(room))]] += 1
            else:
                movable = mem[k_in[mem] > 0]
                v = movable[rng.integers(len(movable))]
                k_in[v] -= 1
                k_out[v] += 1
    if k_out.sum() % 2:
        v = np.flatnonzero(k_out > 0)
        k_out[v[rng.integers(len(v))]] -= 1
    existing: set = set()
    edges = []
    for c in range(len(sizes)):
        mem = np.flatnonzero(comm == c)
        edges += _wire(rng, np.repeat(mem, k_in[mem]), lambda u, v: False, existing)
    edges += _wire(rng, np.repeat(np.arange(cfg.n), k_out), lambda u, v: comm[u] == comm[v], existing)
    return Graph.from_edges(cfg.n, np.array(edges, dtype=np.int64).reshape(-1, 2)), comm


def realized_mixing(g: Graph, cover: Cover) -> float:
    """Degree-weighted mean share of inter-community edges, i.e. inter edges / m."""
    lab = cover.labels()
    if g.m == 0:
        return 0.0
    return float(np.mean(lab[g.edges[:, 0]] != lab[g.edges[:, 1]]))


def generate_lfr(cfg: LfrConfig) -> tuple[Graph, Cover]:
    """Power-law degrees and community sizes, then intra/inter stub matching.

    Retries up to ``cfg.max_restarts`` times when a draw is infeasible.
    """
    rng = np.random.default_rng(cfg.seed)
    err = None
    for _ in range(cfg.max_restarts):
        try:
            g, comm = _attempt(rng, cfg)
        except InfeasibleConfig as exc:
            err = exc
            continue
        cover = cover_from_labels(comm)
        cover.info["mixing"] = realized_mixing(g, cover)
        return g, cover
    raise InfeasibleConfig(f"LFR generation failed after {cfg.max_restarts} restarts: {err}")
