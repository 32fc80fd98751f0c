"""Hot inner loops: BFS distance sums, Brandes accumulation, SIR Monte Carlo.

Every kernel exists twice: a numba ``@njit`` loop version and a vectorized
numpy version. ``RCDMAP_DISABLE_NUMBA=1`` (or numba missing) selects numpy.
Both backends are always importable so they can be compared directly.

All kernels take the CSR arrays of a :class:`rcdmap.graph.Graph`.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.sparse as sp

try:
    import numba
except ImportError:  # pragma: no cover
    numba = None

_DISABLED = os.environ.get("RCDMAP_DISABLE_NUMBA", "").strip().lower() in {"1", "true", "yes", "on"}
NUMBA_AVAILABLE = numba is not None
NUMBA_ENABLED = NUMBA_AVAILABLE and not _DISABLED

_CHUNK = 128


def default_backend() -> str:
    return "numba" if NUMBA_ENABLED else "numpy"


def _resolve(backend):
    backend = backend or default_backend()
    if backend == "numba" and not NUMBA_AVAILABLE:
        raise RuntimeError("numba backend requested but numba is not installed")
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    return backend


if NUMBA_AVAILABLE:
    njit = numba.njit(cache=True, nogil=True)
else:  # pragma: no cover
    def njit(f):
        return f


def _csr(indptr, indices, n):
    data = np.ones(len(indices))
    return sp.csr_matrix((data, indices, indptr), shape=(n, n))


# --------------------------------------------------------------------------
# distance sums (closeness, average path length)

@njit
def _distance_sums_nb(indptr, indices, n):
    sums = np.zeros(n)
    reach = np.zeros(n, np.int64)
    dist = np.empty(n, np.int64)
    queue = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        dist[s] = 0
        queue[0] = s
        head, tail = 0, 1
        acc = 0.0
        while head < tail:
            v = queue[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    acc += dist[w]
                    queue[tail] = w
                    tail += 1
        sums[s] = acc
        reach[s] = tail - 1
    return sums, reach


def _distance_sums_np(indptr, indices, n):
    a = _csr(indptr, indices, n)
    sums = np.zeros(n)
    reach = np.zeros(n, np.int64)
    for lo in range(0, n, _CHUNK):
        src = np.arange(lo, min(n, lo + _CHUNK))
        b = len(src)
        visited = np.zeros((n, b), dtype=bool)
        visited[src, np.arange(b)] = True
        frontier = visited.astype(np.float64)
        level = 0
        while frontier.any():
            level += 1
            nxt = (a @ frontier > 0) & ~visited
            visited |= nxt
            cnt = nxt.sum(axis=0)
            sums[src] += level * cnt
            reach[src] += cnt
            frontier = nxt.astype(np.float64)
    return sums, reach


def distance_sums(indptr, indices, n, backend=None):
    """Per-source sum of BFS distances to reachable nodes and reachable count."""
    if n == 0:
        return np.zeros(0), np.zeros(0, np.int64)
    if _resolve(backend) == "numba":
        return _distance_sums_nb(indptr, indices, n)
    return _distance_sums_np(indptr, indices, n)


# --------------------------------------------------------------------------
# Brandes betweenness (node and edge)

@njit
def _brandes_nb(indptr, indices, edge_ids, n, m):
    node_bc = np.zeros(n)
    edge_bc = np.zeros(m)
    dist = np.empty(n, np.int64)
    sigma = np.empty(n)
    delta = np.empty(n)
    stack = np.empty(n, np.int64)
    for s in range(n):
        dist[:] = -1
        sigma[:] = 0.0
        delta[:] = 0.0
        dist[s] = 0
        sigma[s] = 1.0
        stack[0] = s
        head, tail = 0, 1
        while head < tail:
            v = stack[head]
            head += 1
            for k in range(indptr[v], indptr[v + 1]):
                w = indices[k]
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    stack[tail] = w
                    tail += 1
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
        for i in range(tail - 1, -1, -1):
            w = stack[i]
            coef = (1.0 + delta[w]) / sigma[w]
            for k in range(indptr[w], indptr[w + 1]):
                v = indices[k]
                if dist[v] == dist[w] - 1:
                    c = sigma[v] * coef
                    delta[v] += c
                    edge_bc[edge_ids[k]] += c
            if w != s:
                node_bc[w] += delta[w]
    return node_bc / 2.0, edge_bc / 2.0


def _brandes_np(indptr, indices, edge_ids, n, m):
    a = _csr(indptr, indices, n)
    rows = np.repeat(np.arange(n), np.diff(indptr))
    node_bc = np.zeros(n)
    edge_bc = np.zeros(m)
    for lo in range(0, n, _CHUNK):
        src = np.arange(lo, min(n, lo + _CHUNK))
        b = len(src)
        cols = np.arange(b)
        # node-major layout (n, b) so that sparse @ dense works per level
        dist = np.full((n, b), -1, dtype=np.int64)
        sigma = np.zeros((n, b))
        dist[src, cols] = 0
        sigma[src, cols] = 1.0
        frontier = sigma.copy()
        level = 0
        while frontier.any():
            level += 1
            contrib = a @ frontier
            new = (contrib > 0) & (dist < 0)
            dist[new] = level
            sigma[new] = contrib[new]
            frontier = np.where(new, sigma, 0.0)
        delta = np.zeros((n, b))
        for d in range(level, 0, -1):
            coef = np.where(dist == d, (1.0 + delta) / np.where(sigma > 0, sigma, 1.0), 0.0)
            acc = a @ coef
            delta += np.where(dist == d - 1, sigma * acc, 0.0)
        delta[src, cols] = 0.0
        node_bc += delta.sum(axis=1)
        coef = np.where(sigma > 0, (1.0 + delta) / np.where(sigma > 0, sigma, 1.0), 0.0)
        # slot k is the directed pair rows[k] -> indices[k]; credit flows to the nearer end
        du, dw = dist[rows], dist[indices]
        step = (du >= 0) & (dw == du + 1)
        slot = np.where(step, sigma[rows] * coef[indices], 0.0).sum(axis=1)
        np.add.at(edge_bc, edge_ids, slot)
    return node_bc / 2.0, edge_bc / 2.0


def brandes(indptr, indices, edge_ids, n, m, backend=None):
    """Node and edge betweenness over unordered pairs."""
    if n == 0:
        return np.zeros(0), np.zeros(m)
    if _resolve(backend) == "numba":
        return _brandes_nb(indptr, indices, edge_ids, n, m)
    return _brandes_np(indptr, indices, edge_ids, n, m)


# --------------------------------------------------------------------------
# discrete-time SIR

@njit
def _sir_nb(indptr, indices, n, seeds, beta, gamma, runs, max_steps, seed):
    np.random.seed(seed)
    final = np.zeros(runs, np.int64)
    lengths = np.zeros(runs, np.int64)
    sums = np.zeros((3, max_steps + 2))
    term = np.zeros((3, max_steps + 2))
    state = np.empty(n, np.int8)
    infected = np.empty(n, np.int64)
    fresh = np.empty(n, np.int64)
    for r in range(runs):
        state[:] = 0
        ni = 0
        for x in seeds:
            if state[x] == 0:
                state[x] = 1
                infected[ni] = x
                ni += 1
        s_cnt = n - ni
        r_cnt = 0
        t = 0
        sums[0, 0] += s_cnt
        sums[1, 0] += ni
        while ni > 0 and t < max_steps:
            nf = 0
            for a in range(ni):
                u = infected[a]
                for k in range(indptr[u], indptr[u + 1]):
                    w = indices[k]
                    if state[w] == 0 and np.random.random() < beta:
                        state[w] = 3
                        fresh[nf] = w
                        nf += 1
            keep = 0
            for a in range(ni):
                u = infected[a]
                if np.random.random() < gamma:
                    state[u] = 2
                    r_cnt += 1
                else:
                    infected[keep] = u
                    keep += 1
            for a in range(nf):
                w = fresh[a]
                state[w] = 1
                infected[keep] = w
                keep += 1
            ni = keep
            s_cnt -= nf
            t += 1
            sums[0, t] += s_cnt
            sums[1, t] += ni
            sums[2, t] += r_cnt
        lengths[r] = t
        final[r] = n - s_cnt
        term[0, t + 1] += s_cnt
        term[1, t + 1] += ni
        term[2, t + 1] += r_cnt
    return final, lengths, sums, term


def _sir_np(indptr, indices, n, seeds, beta, gamma, runs, max_steps, seed, batch=256):
    rng = np.random.default_rng(seed)
    deg = np.diff(indptr)
    starts = indptr[:-1][deg > 0]
    has_nb = np.flatnonzero(deg > 0)
    final = np.zeros(runs, np.int64)
    lengths = np.zeros(runs, np.int64)
    sums = np.zeros((3, max_steps + 2))
    term = np.zeros((3, max_steps + 2))
    for lo in range(0, runs, batch):
        idx = np.arange(lo, min(runs, lo + batch))
        state = np.zeros((len(idx), n), dtype=np.int8)
        state[:, seeds] = 1
        t = 0
        active = np.ones(len(idx), dtype=bool)
        counts = np.stack([(state == c).sum(axis=1) for c in range(3)])
        sums[:, 0] += counts.sum(axis=1)
        while active.any() and t < max_steps:
            st = state[active]
            inf = st == 1
            # slot k is the pair (target = row of k, infector = indices[k])
            attempt = inf[:, indices] & (rng.random((len(st), len(indices))) < beta)
            hit = np.zeros_like(inf)
            if len(starts):
                hit[:, has_nb] = np.logical_or.reduceat(attempt, starts, axis=1)
            hit &= st == 0
            recover = inf & (rng.random(inf.shape) < gamma)
            st[recover] = 2
            st[hit] = 1
            state[active] = st
            t += 1
            counts = np.stack([(state == c).sum(axis=1) for c in range(3)])
            if not np.all(counts.sum(axis=0) == n):
                raise AssertionError("SIR conservation violated")
            sums[:, t] += counts[:, active].sum(axis=1)
            done = active & (counts[1] == 0)
            lengths[idx[done]] = t
            active &= ~done
        lengths[idx[active]] = t
        counts = np.stack([(state == c).sum(axis=1) for c in range(3)])
        final[idx] = n - counts[0]
        for j, L in enumerate(lengths[idx]):
            term[:, L + 1] += counts[:, j]
    return final, lengths, sums, term


def sir(indptr, indices, n, seeds, beta, gamma, runs, max_steps, seed, backend=None):
    """Run ``runs`` independent SIR epidemics.

    Returns per-run final ever-infected counts, per-run lengths, per-step
    state sums over still-running runs, and terminal states keyed at
    ``length + 1`` (for carry-forward padding).
    """
    seeds = np.asarray(seeds, dtype=np.int64)
    seed = int(seed) % (2**32)
    if _resolve(backend) == "numba":
        return _sir_nb(indptr, indices, n, seeds, float(beta), float(gamma), int(runs), int(max_steps), seed)
    return _sir_np(indptr, indices, n, seeds, float(beta), float(gamma), int(runs), int(max_steps), seed)
