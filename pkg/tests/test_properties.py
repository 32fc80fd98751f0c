"""Randomized invariants for every module.

Runs 100 examples per property by default; ``HYPOTHESIS_PROFILE=acceptance``
raises that to 1000.
"""

import numpy as np
from hypothesis import assume, given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from rcdmap import centrality
from rcdmap.community import (
    NON_OVERLAPPING,
    DetectorConfig,
    bigclam,
    cover_from_labels,
    cover_from_sets,
    detect,
    detect_gn,
    detect_kclique,
    modularity,
)
from rcdmap.graph import Graph, format_edge_list, graph_stats, parse_edge_list, spectral_radius
from rcdmap.lfr import LfrConfig, generate_lfr
from rcdmap.perturb import PerturbConfig, perturb_erp
from rcdmap.selection import penalized_select
from rcdmap.sir import SirConfig, simulate_sir
from rcdmap.stats import fisher_lsd, rcbd_anova
from strategies import edge_lists, graphs

seeds = st.integers(0, 2**31 - 1)


def adj(g):
    return oracles.adjacency_matrix(g.n, g.edges.tolist())


# graph-core ---------------------------------------------------------------

@given(edge_lists(min_n=2, max_n=12))
def test_parse_serialize_round_trip(ne):
    n, edges = ne
    assume(edges)
    g = parse_edge_list("".join(f"{u} {v}\n" for u, v in edges))
    again = parse_edge_list(format_edge_list(g))
    assert again.edge_set() == g.edge_set()
    assert 2 * g.m == g.degrees().sum()


@given(graphs(max_n=10))
def test_spectral_radius_oracle(g):
    assert abs(spectral_radius(g) - oracles.spectral_radius(adj(g))) <= 1e-6


@given(graphs(min_n=2, max_n=10, connected=True))
def test_stats_bounds(g):
    s = graph_stats(g)
    assert s.avg_degree == 2 * s.m / s.n
    assert s.avg_degree - 1e-9 <= s.spectral_radius <= s.max_degree + 1e-9


# centrality ---------------------------------------------------------------

@given(graphs(max_n=9))
def test_betweenness_oracle(g):
    np.testing.assert_allclose(centrality.betweenness_centrality(g).scores, oracles.betweenness(adj(g)),
                               rtol=1e-9, atol=1e-12)


@given(graphs(min_n=2, max_n=9, connected=True))
def test_closeness_oracle(g):
    np.testing.assert_allclose(centrality.closeness_centrality(g).scores, oracles.closeness(adj(g)), rtol=1e-9)


@given(graphs(min_n=2, max_n=9, min_degree=1))
def test_kshell_oracle(g):
    assume(g.degrees().min() > 0)
    np.testing.assert_array_equal(centrality.k_shell(g).scores, oracles.shells(adj(g)))


@given(edge_lists(min_n=3, max_n=9, min_degree=1), st.data())
def test_kshell_monotone_under_edge_addition(ne, data):
    n, edges = ne
    missing = [(i, j) for i in range(n) for j in range(i + 1, n) if (i, j) not in set(edges)]
    assume(missing)
    extra = data.draw(st.sampled_from(missing))
    before = centrality.core_numbers(Graph.from_edges(n, edges))
    after = centrality.core_numbers(Graph.from_edges(n, edges + [extra]))
    assert np.all(after >= before)


@given(graphs(min_n=1, max_n=12))
def test_pagerank_distribution(g):
    pr = centrality.pagerank(g).scores
    assert abs(pr.sum() - 1) <= 1e-9 and np.all(pr > 0)


@given(graphs(min_n=2, max_n=10, connected=True), st.randoms(use_true_random=False))
def test_relabel_invariance(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    h = g.relabeled(perm)
    p = np.asarray(perm)
    for fn in (centrality.degree_centrality, centrality.closeness_centrality):
        np.testing.assert_allclose(fn(h).scores[p], fn(g).scores, rtol=1e-12)


# community ----------------------------------------------------------------

@given(graphs(min_n=1, max_n=10), seeds, st.sampled_from(["lpa", "infomap", "gn", "demon", "kclique", "bigclam"]))
def test_detector_covers_valid(g, seed, algorithm):
    cfg = DetectorConfig(algorithm, seed=seed, num_communities=min(2, g.n) if algorithm == "bigclam" else None,
                         max_iter=50)
    c = detect(g, cfg)
    c.validate()
    assert c.n == g.n
    if algorithm in NON_OVERLAPPING:
        assert not c.overlapping and np.all(c.counts() == 1)


@given(graphs(min_n=2, max_n=10, connected=True))
def test_gn_not_worse_than_one_block(g):
    assume(g.m > 0)
    assert modularity(g, detect_gn(g)) >= -1e-12


@given(graphs(max_n=9), seeds)
def test_modularity_oracle(g, seed):
    labels = np.random.default_rng(seed).integers(0, 3, size=g.n)
    q = modularity(g, cover_from_labels(labels))
    assert abs(q - oracles.modularity(adj(g), labels)) <= 1e-9 * max(1.0, abs(q))


@given(graphs(min_n=3, max_n=10), st.randoms(use_true_random=False))
def test_kclique_permutation_invariant(g, rnd):
    perm = list(range(g.n))
    rnd.shuffle(perm)
    a = {frozenset(perm[v] for v in c) for c in detect_kclique(g, 3).communities}
    b = {frozenset(c) for c in detect_kclique(g.relabeled(perm), 3).communities}
    assert a == b


@given(graphs(min_n=3, max_n=10), seeds, st.integers(1, 3))
def test_bigclam_monotone(g, seed, c):
    assume(g.m > 0 and c <= g.n)
    trace = []
    bigclam.fit(g, c, seed=seed, max_iter=60, trace=trace)
    assert all(b >= a for a, b in zip(trace, trace[1:]))


# perturb ------------------------------------------------------------------

@given(graphs(min_n=2, max_n=15), st.floats(0, 2), seeds)
def test_perturb_properties(g, eps, seed):
    h = perturb_erp(g, PerturbConfig(eps, seed))
    assert h.n == g.n
    assert np.array_equal(h.edges, perturb_erp(g, PerturbConfig(eps, seed)).edges)
    if eps == 0:
        assert h.edge_set() == g.edge_set()


@given(graphs(min_n=2, max_n=12), seeds)
def test_saturated_perturbation_is_complement(g, seed):
    assume(g.m > 0)
    pairs = g.n * (g.n - 1) // 2
    h = perturb_erp(g, PerturbConfig(pairs / g.m, seed))
    everything = {(i, j) for i in range(g.n) for j in range(i + 1, g.n)}
    assert h.edge_set() == everything - g.edge_set()


# selection ----------------------------------------------------------------

@st.composite
def scored_covers(draw):
    g = draw(graphs(min_n=2, max_n=10))
    k = draw(st.integers(1, 3))
    sets = [draw(st.lists(st.integers(0, g.n - 1), min_size=1, max_size=g.n)) for _ in range(k)]
    cover = cover_from_sets(g.n, sets)
    scores = draw(arrays(np.float64, g.n, elements=st.floats(0, 10)))
    return g, cover, scores


@given(scored_covers(), st.floats(0.01, 5))
def test_selection_is_permutation(gcs, alpha):
    g, cover, scores = gcs
    r = penalized_select(g, scores, cover, alpha, record=True)
    assert sorted(r.order.tolist()) == list(range(g.n))
    pos = np.empty(g.n, dtype=int)
    pos[r.order] = np.arange(g.n)
    assert all(pos[u] > pos[v] for v, u, _, _ in r.penalty_log)


@given(scored_covers())
def test_alpha_zero_preserves_base(gcs):
    g, cover, scores = gcs
    r = penalized_select(g, scores, cover, 0.0)
    assert r.order.tolist() == centrality.rank_order(scores).tolist()


@given(scored_covers(), st.floats(0.01, 5))
def test_square_exponent_shrinks_penalties(gcs, alpha):
    g, cover, scores = gcs
    one = {(v, u, c): p for v, u, c, p in penalized_select(g, scores, cover, alpha, 1, record=True).penalty_log}
    two = {(v, u, c): p for v, u, c, p in penalized_select(g, scores, cover, alpha, 2, record=True).penalty_log}
    sizes = cover.sizes()
    for key in set(one) & set(two):
        if sizes[key[2]] > 1:
            assert two[key] < one[key]


@given(st.integers(3, 8), st.integers(2, 5), st.floats(0.0, 0.5), seeds)
def test_dispersal_on_constructed_instances(size_a, size_b, spread, seed):
    # base top-T lie inside community A (size > T, T = 2 communities); alpha beats A's spread
    rng = np.random.default_rng(seed)
    n = size_a + size_b
    g = Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    labels = np.array([0] * size_a + [1] * size_b)
    scores = np.concatenate([10 - rng.uniform(0, spread, size_a), rng.uniform(1, 9, size_b)])
    scores[:size_a] = np.sort(scores[:size_a])[::-1]
    t = 2
    assert set(centrality.rank_order(scores)[:t]) <= set(range(size_a))
    gap = scores[0] - scores[size_a:].max()
    alpha = (gap + spread + 0.1) * size_a
    r = penalized_select(g, scores, cover_from_labels(labels), alpha)
    assert {labels[v] for v in r.top(t)} == {0, 1}


# sir ----------------------------------------------------------------------

@given(graphs(min_n=2, max_n=12), st.floats(0, 1), st.floats(0.05, 1), seeds, st.sampled_from(["numba", "numpy"]))
def test_sir_invariants(g, beta, gamma, seed, backend):
    out = simulate_sir(g, SirConfig([0], beta, gamma, runs=5, rng_seed=seed), backend=backend)
    ts = out.timeseries
    np.testing.assert_allclose(ts.sum(axis=1), g.n)
    assert np.all(np.diff(ts[:, 2]) >= -1e-9)
    assert np.all((out.final_infected >= 1) & (out.final_infected <= g.n))
    again = simulate_sir(g, SirConfig([0], beta, gamma, runs=5, rng_seed=seed), backend=backend)
    assert np.array_equal(out.final_infected, again.final_infected)


# lfr ----------------------------------------------------------------------

@given(seeds, st.floats(0, 0.5))
def test_lfr_invariants(seed, mu):
    g, cover = generate_lfr(LfrConfig(n=60, max_degree=15, min_community=8, max_community=30, mu=mu, seed=seed))
    cover.validate()
    assert not cover.overlapping and cover.sizes().sum() == 60
    e = g.edges
    assert np.all(e[:, 0] < e[:, 1])
    assert len(set(map(tuple, e.tolist()))) == len(e)
    if mu == 0:
        lab = cover.labels()
        assert np.all(lab[e[:, 0]] == lab[e[:, 1]])


# stats --------------------------------------------------------------------

@given(arrays(np.float64, st.tuples(st.integers(2, 10), st.integers(2, 10)),
              elements=st.floats(-100, 100, allow_subnormal=False)))
def test_anova_oracle(y):
    t = rcbd_anova(y)
    ref = oracles.rcbd_ss(y)
    scale = max(1.0, ref[3])
    for got, want in zip((t.ss_treat, t.ss_block, t.ss_error, t.ss_total), ref):
        assert abs(got - want) <= 1e-9 * scale
    assert abs(t.ss_total - (t.ss_treat + t.ss_block + t.ss_error)) <= 1e-9 * scale
    assert t.df_total == t.df_treat + t.df_block + t.df_error


@given(st.lists(st.floats(0, 30), min_size=2, max_size=9), st.floats(1e-3, 5), st.integers(1, 40),
       st.integers(2, 10))
def test_lsd_letters_consistent(means, ms_error, df, reps):
    r = fisher_lsd(means, ms_error, df, reps)
    means = dict(zip(r.names, r.means))
    names = list(means)
    for a in names:
        assert r.letters[a]
        for b in names:
            assert r.different(a, b) == (abs(means[a] - means[b]) > r.lsd)
    assert all(any(name in grp for grp in r.groups) for name in names)
