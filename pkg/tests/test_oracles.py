import random

import pytest

from edgebudget.graphstate import PurchasedGraph, degeneracy, is_r_expander
from edgebudget.oracles import (
    TargetGraph,
    contains_subgraph,
    count_paths,
    coupled_ok_kout,
    edges_connected,
    enumerate_traps,
    exact_boosters,
    hamiltonian_exact,
    longest_path,
    tree_edges,
)


def cycle(n):
    return [(i, (i + 1) % n) for i in range(n)]


def star(n):
    return [(0, i) for i in range(1, n)]


def complete(n):
    return [(u, v) for u in range(n) for v in range(u + 1, n)]


def random_graph(rng, n, p):
    return (n, [e for e in complete(n) if rng.random() < p])


# -- exact Hamiltonicity -----------------------------------------------


def test_hamiltonian_c4():
    ok, witness = hamiltonian_exact((4, cycle(4)))
    assert ok
    assert sorted(witness) == [0, 1, 2, 3]


def test_hamiltonian_rejects_stars():
    assert not hamiltonian_exact((4, star(4)))[0]
    assert not hamiltonian_exact((13, star(13)))[0]


def test_hamiltonian_rejects_unbalanced_bipartite():
    k23 = [(u, v) for u in (0, 1) for v in (2, 3, 4)]
    assert not hamiltonian_exact((5, k23))[0]


def test_hamiltonian_size_limit():
    with pytest.raises(ValueError):
        hamiltonian_exact((21, []))


def test_hamiltonian_tiny_graphs():
    assert not hamiltonian_exact((2, [(0, 1)]))[0]


def test_longest_path_on_p4():
    length, path = longest_path((4, [(0, 1), (1, 2), (2, 3)]))
    assert length == 3
    assert path in ([0, 1, 2, 3], [3, 2, 1, 0])


# -- boosters -----------------------------------------------------------


def test_boosters_of_p4_include_closing_edge():
    found = exact_boosters((4, [(0, 1), (1, 2), (2, 3)]))
    assert (0, 3) in found


def test_boosters_of_hamiltonian_graph_empty():
    k4_minus = [e for e in complete(4) if e != (0, 1)]
    assert exact_boosters((4, k4_minus)) == set()


def test_boosters_size_limit():
    with pytest.raises(ValueError):
        exact_boosters((15, []))


def test_boosters_verified_by_replay():
    # adding a booster must lengthen the longest path or close a cycle
    rng = random.Random(2)
    checked = 0
    for _ in range(25):
        n, edges = random_graph(rng, 7, 0.35)
        if hamiltonian_exact((n, edges))[0]:
            continue
        base, _ = longest_path((n, edges))
        for u, v in exact_boosters((n, edges)):
            longer, _ = longest_path((n, edges + [(u, v)]))
            ham, _ = hamiltonian_exact((n, edges + [(u, v)]))
            assert longer > base or ham
            checked += 1
    assert checked > 0


def test_k23_expander_booster_lower_bound():
    k23 = [(u, v) for u in (0, 1) for v in (2, 3, 4)]
    g = PurchasedGraph(5)
    for u, v in k23:
        g.add_edge(u, v)
    assert is_r_expander(g, 1)[0]
    assert not hamiltonian_exact(g)[0]
    assert len(exact_boosters(g)) >= 2  # (R+1)^2/2 with R=1


# -- targets and containment -------------------------------------------


def test_tree_edges_shapes():
    assert tree_edges("path", 4) == [(0, 1), (1, 2), (2, 3)]
    assert tree_edges("star", 4) == [(0, 1), (0, 2), (0, 3)]
    with pytest.raises(ValueError):
        tree_edges("caterpillar", 4)


def test_target_num_vertices():
    assert TargetGraph.cycle(5).num_vertices == 5
    assert TargetGraph.tree(tree_edges("path", 4)).num_vertices == 4


def test_contains_p3_in_c4():
    ok, emb = contains_subgraph((4, cycle(4)), TargetGraph.tree(tree_edges("path", 3)))
    assert ok
    assert len(set(emb.values())) == 3


def test_tree_host_contains_no_cycle():
    host = (6, [(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)])
    for ell in (3, 4, 5):
        assert not contains_subgraph(host, TargetGraph.cycle(ell))[0]


def test_contains_cycle_witness():
    ok, cyc = contains_subgraph((6, cycle(6) + [(0, 3)]), TargetGraph.cycle(4))
    assert ok
    assert len(cyc) == 4


def test_contains_size_limit():
    with pytest.raises(ValueError):
        contains_subgraph((20, []), TargetGraph.cycle(11))


def test_contains_agrees_with_exhaustive_check():
    from itertools import combinations, permutations

    rng = random.Random(8)
    target = TargetGraph.tree(tree_edges("path", 4))
    for _ in range(20):
        n, edges = random_graph(rng, 6, 0.3)
        got = contains_subgraph((n, edges), target)[0]
        eset = {frozenset(e) for e in edges}
        truth = any(
            all(frozenset((m[a], m[b])) in eset for a, b in target.edges)
            for sub in combinations(range(n), 4)
            for m in permutations(sub)
        )
        assert got == truth


# -- traps --------------------------------------------------------------


def test_c3_traps_of_p3():
    traps = enumerate_traps((3, [(0, 1), (1, 2)]), TargetGraph.cycle(3)).traps
    assert traps == {(0, 2)}


def test_traps_reject_host_containing_target():
    with pytest.raises(ValueError):
        enumerate_traps((3, cycle(3)), TargetGraph.cycle(3))


def test_tree_traps_may_use_isolated_vertices():
    target = TargetGraph.tree(tree_edges("path", 3))
    traps = enumerate_traps((3, [(0, 1)]), target).traps
    assert traps == {(0, 2), (1, 2)}


def test_p4_traps_of_two_disjoint_edges():
    target = TargetGraph.tree(tree_edges("path", 4))
    traps = enumerate_traps((4, [(0, 1), (2, 3)]), target).traps
    assert traps == {(0, 2), (0, 3), (1, 2), (1, 3)}


def test_traps_verified_by_containment():
    rng = random.Random(5)
    target = TargetGraph.cycle(4)
    for _ in range(20):
        n, edges = random_graph(rng, 7, 0.2)
        if contains_subgraph((n, edges), target)[0]:
            continue
        traps = enumerate_traps((n, edges), target).traps
        deg = [0] * n
        for u, v in edges:
            deg[u] += 1
            deg[v] += 1
        for u, v in complete(n):
            if (u, v) in edges:
                continue
            hit = contains_subgraph((n, edges + [(u, v)]), target)[0]
            if deg[u] > 0 and deg[v] > 0:
                assert ((u, v) in traps) == hit
            else:
                assert not hit  # a cycle trap needs two positive-degree ends


def test_trap_monotonicity_under_edge_addition():
    rng = random.Random(13)
    target = TargetGraph.cycle(4)
    for _ in range(15):
        n, edges = random_graph(rng, 6, 0.2)
        if contains_subgraph((n, edges), target)[0]:
            continue
        before = enumerate_traps((n, edges), target).traps
        extra = next(
            (e for e in complete(n) if e not in edges and e not in before), None
        )
        if extra is None:
            continue
        grown = edges + [extra]
        if contains_subgraph((n, grown), target)[0]:
            continue
        assert before <= enumerate_traps((n, grown), target).traps


# -- path counting ------------------------------------------------------


def test_count_paths_examples():
    assert count_paths((5, cycle(5)), 4) == 5
    assert count_paths((5, star(5)), 2) == 6
    assert count_paths((4, cycle(4)), 0) == 4
    assert count_paths((4, cycle(4)), 1) == 4


def test_count_paths_limits():
    with pytest.raises(ValueError):
        count_paths((4, cycle(4)), 9)


def test_count_paths_respects_degenerate_bound():
    import math

    rng = random.Random(21)
    for _ in range(15):
        n, edges = random_graph(rng, 8, 0.35)
        g = PurchasedGraph(n)
        for u, v in edges:
            g.add_edge(u, v)
        z = degeneracy(g)
        delta = max(g.degree, default=0)
        q = sum(1 for d in g.degree if d > 0)
        for ell in (2, 3, 4):
            bound = q * 2**ell * z ** math.ceil(ell / 2) * delta ** (ell // 2)
            assert count_paths((n, edges), ell) <= bound


# -- the coupled sampler ------------------------------------------------


def test_coupled_sampler_deterministic():
    assert coupled_ok_kout(50, 2, 7) == coupled_ok_kout(50, 2, 7)
    assert coupled_ok_kout(50, 2, 7) != coupled_ok_kout(50, 2, 8)


def test_coupled_sampler_marginal_shapes():
    for seed in range(5):
        ok, kout = coupled_ok_kout(40, 3, seed)
        deg = [0] * 40
        for u, v in ok:
            deg[u] += 1
            deg[v] += 1
        assert min(deg) >= 3  # every vertex keeps its 3 nearest
        assert len(kout) <= 3 * 40
        assert all(0 <= u < v < 40 for u, v in ok | kout)


def test_coupled_sampler_rejects_small_n():
    with pytest.raises(ValueError):
        coupled_ok_kout(3, 3, 0)


def test_edges_connected():
    assert edges_connected(3, [(0, 1), (1, 2)])
    assert not edges_connected(3, [(0, 1)])
