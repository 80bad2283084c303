import random
from fractions import Fraction

import pytest

from congestsim.engine import Network
from congestsim.graphs import (
    INFINITE,
    WeightedGraph,
    exact_bounded_hop,
    exact_sssp,
    random_connected_graph,
    star_graph,
)
from congestsim.toolkit import (
    approx_distance,
    approx_eccentricity,
    bounded_distance_sssp,
    bounded_hop_mssp,
    bounded_hop_sssp,
    build_skeleton_state,
    default_eps,
    embed_overlay,
    hop_budget,
    rounded_weight,
    scale_levels,
    sssp_on_overlay,
    SkeletonState,
    MissingTableError,
)

from oracles import complete_overlay_distances


def path_graph(p):
    return WeightedGraph(p + 1, [(i, i + 1, 1) for i in range(p)])


# --- parameters ----------------------------------------------------------


def test_default_eps():
    assert default_eps(4) == Fraction(1, 2)
    assert default_eps(16) == Fraction(1, 4)
    assert default_eps(2 ** 20) == Fraction(1, 16)  # floored


def test_hop_budget_and_levels():
    assert hop_budget(4, Fraction(1, 2)) == 20
    assert hop_budget(1, Fraction(1, 1)) == 3
    # smallest i with 2^i >= 2*n*W/eps
    assert scale_levels(16, 10, Fraction(1, 4)) == 11  # 2^11 >= 1280
    assert scale_levels(2, 1, Fraction(1, 1)) == 2


def test_rounded_weight():
    # ceil(2*4*5 / ((1/2) * 2^3)) = ceil(40/4) = 10
    assert rounded_weight(5, 4, Fraction(1, 2), 3) == 10
    # clamps to >= 1 at coarse levels
    assert rounded_weight(1, 1, Fraction(1, 1), 10) == 1
    # integer fast path agrees with the Fraction path
    for w in (1, 7, 10):
        for level in range(6):
            expect = rounded_weight(Fraction(w), Fraction(3),
                                    Fraction(1, 3), level)
            assert rounded_weight(w, 3, Fraction(1, 3), level) == expect


# --- bounded-distance pass -----------------------------------------------


def test_bounded_distance_path():
    net = Network(path_graph(3))
    dist = bounded_distance_sssp(net, 0, 2)
    assert dist == [0, 1, 2, INFINITE]


def test_bounded_distance_zero_budget():
    g = random_connected_graph(8, rng=random.Random(0))
    net = Network(g)
    dist = bounded_distance_sssp(net, 3, 0)
    assert dist == [INFINITE] * 3 + [0] + [INFINITE] * 4


def test_bounded_distance_full_budget_is_exact():
    for seed in range(5):
        g = random_connected_graph(16, rng=random.Random(seed))
        net = Network(g)
        budget = g.max_weight * g.n
        assert bounded_distance_sssp(net, 0, budget) == exact_sssp(g, 0)


def test_bounded_distance_exact_round_count():
    for seed in range(5):
        g = random_connected_graph(12, rng=random.Random(seed))
        for budget in (0, 3, 17):
            net = Network(g)
            before = net.round_clock
            bounded_distance_sssp(net, seed % g.n, budget)
            assert net.round_clock - before == budget + 1
            assert net.ledger.rounds == budget + 1


# --- bounded-hop pass ----------------------------------------------------


def assert_hop_sandwich(g, s, table, hops, eps):
    exact = exact_sssp(g, s)
    bounded = exact_bounded_hop(g, s, hops)
    for v in range(g.n):
        if table[v] is not INFINITE:
            assert exact[v] <= table[v]
        if bounded[v] is not INFINITE:
            assert table[v] <= (1 + eps) * bounded[v]


def test_bounded_hop_triangle():
    g = WeightedGraph(3, [(0, 1, 1), (1, 2, 1), (0, 2, 3)])
    eps = Fraction(1, 2)
    table = bounded_hop_sssp(Network(g), 0, 1, eps)
    assert 2 <= table[2] <= (1 + eps) * 3


def test_bounded_hop_matches_level_enumeration():
    g = random_connected_graph(8, max_weight=6, rng=random.Random(1))
    hops, eps = 3, Fraction(1, 2)
    table = bounded_hop_sssp(Network(g), 0, hops, eps)
    budget = hop_budget(hops, eps)
    # independent recomputation: Dijkstra per level on the rounded weights
    best = [INFINITE] * g.n
    for level in range(scale_levels(g.n, g.max_weight, eps) + 1):
        rg = WeightedGraph(g.n, [(u, v, rounded_weight(w, hops, eps, level))
                                 for u, v, w in g.edges])
        d = exact_sssp(rg, 0)
        scale = eps * 2 ** level / (2 * Fraction(hops))
        for v in range(g.n):
            if d[v] <= budget and d[v] * scale < best[v]:
                best[v] = d[v] * scale
    assert table == best


def test_bounded_hop_sandwich_full_hops():
    for seed in range(8):
        g = random_connected_graph(4 + seed, rng=random.Random(seed))
        eps = default_eps(g.n)
        table = bounded_hop_sssp(Network(g), 0, max(1, g.n - 1), eps)
        exact = exact_sssp(g, 0)
        for v in range(g.n):
            assert exact[v] <= table[v] <= (1 + eps) * exact[v]


def test_bounded_hop_round_count():
    g = random_connected_graph(10, rng=random.Random(3))
    hops, eps = 2, Fraction(1, 2)
    net = Network(g)
    bounded_hop_sssp(net, 0, hops, eps)
    levels = scale_levels(g.n, g.max_weight, eps) + 1
    assert net.ledger.rounds == levels * (hop_budget(hops, eps) + 1)


def test_bounded_hop_rejects_bad_args():
    net = Network(path_graph(2))
    with pytest.raises(ValueError):
        bounded_hop_sssp(net, 0, 0, Fraction(1, 2))
    with pytest.raises(ValueError):
        bounded_hop_sssp(net, 0, 2, Fraction(3, 2))


# --- multi-source pass ---------------------------------------------------


def test_mssp_single_source_equals_sssp():
    for seed in range(4):
        g = random_connected_graph(10, rng=random.Random(seed))
        eps = default_eps(g.n)
        single = bounded_hop_sssp(Network(g, seed=seed), 2, 3, eps)
        multi = bounded_hop_mssp(Network(g, seed=seed), [2], 3, eps)
        assert multi == {2: single}


def test_mssp_sandwich():
    for seed in range(4):
        g = random_connected_graph(12, rng=random.Random(40 + seed))
        eps = default_eps(g.n)
        sources = [0, 3, 7, 11]
        tables = bounded_hop_mssp(Network(g, seed=seed), sources, 4, eps)
        assert sorted(tables) == sources
        for s in sources:
            assert_hop_sandwich(g, s, tables[s], 4, eps)


def test_mssp_deterministic():
    g = random_connected_graph(12, rng=random.Random(8))
    eps = default_eps(g.n)
    runs = [bounded_hop_mssp(Network(g, seed=5), [0, 5, 9], 4, eps)
            for _ in range(2)]
    assert runs[0] == runs[1]


# --- overlay stages ------------------------------------------------------


def pipeline_state(g, members, hops, k, seed=0):
    net = Network(g, seed=seed)
    eps = default_eps(g.n)
    state = build_skeleton_state(net, 0, members, hops, eps)
    embed_overlay(net, state, k)
    return net, state


def test_embed_full_shortcutting():
    g = random_connected_graph(12, rng=random.Random(2))
    members = [0, 2, 4, 6, 8]
    net, state = pipeline_state(g, members, g.n, len(members) - 1)
    oracle = complete_overlay_distances(members, state.base_weight)
    for u in members:
        for v in members:
            if u != v:
                assert state.overlay_weight(u, v) == oracle[(u, v)]


def test_embed_no_shortcuts():
    g = random_connected_graph(10, rng=random.Random(3))
    net, state = pipeline_state(g, [1, 4, 7], 4, 0)
    assert state.shortcut == {}
    assert state.overlay_weight(1, 4) == state.base_weight(1, 4)


def test_embed_matches_sequential_oracle():
    for seed in range(5):
        g = random_connected_graph(14, rng=random.Random(60 + seed))
        members = sorted(random.Random(seed).sample(range(g.n), 6))
        net, state = pipeline_state(g, members, g.n, 2, seed=seed)
        oracle = complete_overlay_distances(members, state.base_weight)
        for (u, v), w in state.shortcut.items():
            assert w >= oracle[(u, v)]
        # equality on each node's k nearest (distance, id)-ordered targets
        for s in members:
            ranked = sorted((oracle[(s, v)], v) for v in members if v != s)
            for d, v in ranked[:2]:
                key = (min(s, v), max(s, v))
                assert state.shortcut.get(key, d) == d


def test_overlay_sssp_singleton():
    g = path_graph(4)
    net, state = pipeline_state(g, [2], 4, 1)
    assert sssp_on_overlay(net, state, 2) == {2: 0}


def test_overlay_sssp_large_k_close_to_exact():
    g = random_connected_graph(12, rng=random.Random(4))
    members = [0, 3, 5, 8, 11]
    net, state = pipeline_state(g, members, g.n, len(members))
    exact = complete_overlay_distances(members, state.overlay_weight)
    eps = state.eps
    for s in members:
        table = sssp_on_overlay(net, state, s)
        for v in members:
            assert exact[(s, v)] <= table[v] <= (1 + eps) * exact[(s, v)]


def test_overlay_sssp_rejects_foreign_source():
    g = path_graph(4)
    net, state = pipeline_state(g, [0, 2], 4, 1)
    with pytest.raises(ValueError):
        sssp_on_overlay(net, state, 3)


def test_overlay_probe_cost_constant():
    # every probe of one skeleton charges exactly the same round count
    g = random_connected_graph(14, rng=random.Random(6))
    members = [1, 4, 7, 10, 13]
    net, state = pipeline_state(g, members, 6, 2)
    costs = []
    for s in members:
        before = net.ledger.rounds
        sssp_on_overlay(net, state, s)
        costs.append(net.ledger.rounds - before)
    assert len(set(costs)) == 1


# --- combination ---------------------------------------------------------


def full_pipeline(g, seed=0):
    members = list(range(g.n))
    net, state = pipeline_state(g, members, max(1, g.n - 1),
                                max(1, g.n // 2), seed=seed)
    for s in members:
        sssp_on_overlay(net, state, s)
    return net, state


def test_approx_distance_self_is_zero():
    g = random_connected_graph(8, rng=random.Random(5))
    net, state = full_pipeline(g)
    for s in range(g.n):
        assert approx_distance(state, s, s) == 0


def test_approx_distance_full_skeleton_sandwich():
    for n, seed in ((8, 0), (10, 1), (12, 2)):
        g = random_connected_graph(n, rng=random.Random(seed))
        net, state = full_pipeline(g, seed=seed)
        slack = (1 + state.eps) ** 2
        for s in range(g.n):
            exact = exact_sssp(g, s)
            for v in range(g.n):
                assert exact[v] <= approx_distance(state, s, v) \
                    <= slack * exact[v]


def test_approx_distance_monotone_in_skeleton():
    g = random_connected_graph(10, rng=random.Random(9))
    net, state = full_pipeline(g)
    sub = [0, 2, 5, 8]
    restricted = SkeletonState(
        index=1, members=sub, hops=state.hops, eps=state.eps, k=state.k,
        hop_tables={u: state.hop_tables[u] for u in sub},
        overlay_tables={s: {u: state.overlay_tables[s][u] for u in sub}
                        for s in sub})
    for s in sub:
        for v in range(g.n):
            assert approx_distance(state, s, v) \
                <= approx_distance(restricted, s, v)


def test_approx_distance_missing_table():
    g = path_graph(3)
    net, state = pipeline_state(g, [0, 2], 3, 1)
    with pytest.raises(MissingTableError):
        approx_distance(state, 0, 1)


def test_approx_eccentricity():
    g = star_graph(6, weight=1)
    net, state = full_pipeline(g)
    slack = (1 + state.eps) ** 2
    assert 1 <= approx_eccentricity(state, 0, g.n) <= slack
    for s in range(g.n):
        e = max(exact_sssp(g, s))
        assert e <= approx_eccentricity(state, s, g.n) <= slack * e


def test_approx_eccentricity_single_node():
    g = WeightedGraph(1, [])
    net = Network(g)
    state = build_skeleton_state(net, 0, [0], 1, Fraction(1, 2))
    assert approx_eccentricity(state, 0, 1) == 0
