import random

from edgebudget.rotation import (
    CYCLE_MERGED,
    HAMILTON_CLOSED,
    NO_CHANGE,
    PATH_EXTENDED,
    PathSystem,
    endpoint_pair_search,
    exact_rotation_closure,
    hamilton_cycle_forced,
    rotation_closure,
    validate_cycle,
    validate_path,
)


def adj_from(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return adj


def random_adj(rng, n, p):
    return adj_from(
        n,
        [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < p
        ],
    )


# -- closures -----------------------------------------------------------


def test_closure_path_graph_single_endpoint():
    adj = adj_from(3, [(0, 1), (1, 2)])
    best = rotation_closure(adj, (0, 1, 2))
    assert set(best) == {2}


def test_closure_hand_traced_rotation():
    # path (3,2,1,0); rotating around the chord {0,2} exposes endpoint 1
    adj = adj_from(4, [(0, 1), (1, 2), (2, 3), (0, 2)])
    best = rotation_closure(adj, (3, 2, 1, 0))
    assert set(best) == {0, 1}
    assert best[1] == (3, 2, 0, 1)


def test_closure_k4_reaches_all_other_vertices():
    adj = adj_from(4, [(u, v) for u in range(4) for v in range(u + 1, 4)])
    best = rotation_closure(adj, (0, 1, 2, 3))
    assert set(best) == {1, 2, 3}


def test_closure_witnesses_are_valid_paths():
    rng = random.Random(4)
    for _ in range(25):
        adj = random_adj(rng, 8, 0.4)
        start = (0, *(v for v in adj[0] if v))
        path = [0]
        used = {0}
        while True:
            nxt = next((w for w in adj[path[-1]] if w not in used), None)
            if nxt is None:
                break
            path.append(nxt)
            used.add(nxt)
        if len(path) < 2:
            continue
        for end, witness in rotation_closure(adj, path).items():
            assert witness[0] == path[0]
            assert witness[-1] == end
            assert len(witness) == len(path)
            assert validate_path(adj, witness)


def test_exact_closure_contains_witnessed_endpoints():
    rng = random.Random(9)
    for _ in range(25):
        adj = random_adj(rng, 7, 0.45)
        path = [0]
        used = {0}
        while True:
            nxt = next((w for w in adj[path[-1]] if w not in used), None)
            if nxt is None:
                break
            path.append(nxt)
            used.add(nxt)
        if len(path) < 3:
            continue
        assert set(rotation_closure(adj, path)) <= exact_rotation_closure(adj, path)


# -- path system --------------------------------------------------------


def test_extend_simple():
    adj = adj_from(3, [(0, 1)])
    ps = PathSystem(adj, range(3))
    ps.set_path([0, 1])
    adj[1].add(2)
    adj[2].add(1)
    assert ps.absorb_edge(1, 2) == PATH_EXTENDED
    assert ps.path == (0, 1, 2)


def test_close_hamilton_cycle_on_p4():
    adj = adj_from(4, [(0, 1), (1, 2), (2, 3)])
    ps = PathSystem(adj, range(4))
    ps.set_path([0, 1, 2, 3])
    adj[0].add(3)
    adj[3].add(0)
    assert ps.absorb_edge(0, 3) == HAMILTON_CLOSED
    assert ps.done
    assert validate_cycle(adj, ps.cycle, universe=range(4))


def test_recorded_cycle_reopens_into_longer_path():
    adj = adj_from(4, [(0, 1), (1, 2)])
    ps = PathSystem(adj, range(4))
    ps.set_path([0, 1, 2])
    adj[0].add(2)
    adj[2].add(0)
    assert ps.absorb_edge(0, 2) == NO_CHANGE
    assert ps.recorded_cycle is not None
    adj[2].add(3)
    adj[3].add(2)
    assert ps.absorb_edge(2, 3) == CYCLE_MERGED
    assert len(ps.path) == 4
    assert validate_path(adj, ps.path)


def test_operational_booster_closing_edge():
    adj = adj_from(3, [(0, 1), (1, 2)])
    ps = PathSystem(adj, range(3))
    ps.set_path([0, 1, 2])
    assert ps.is_operational_booster(0, 2)


def test_operational_booster_joining_edge():
    adj = adj_from(4, [(0, 1), (2, 3)])
    ps = PathSystem(adj, range(4))
    ps.set_path([0, 1])
    assert ps.is_operational_booster(1, 2)


def test_operational_booster_rejects_useless_edge():
    adj = adj_from(5, [(0, 1), (1, 2)])
    ps = PathSystem(adj, range(5))
    ps.set_path([0, 1, 2])
    assert not ps.is_operational_booster(3, 4)


def test_booster_flag_predicts_progress():
    # one-sidedness: every True must be followed by actual progress
    rng = random.Random(17)
    for _ in range(60):
        n = rng.randrange(4, 9)
        adj = random_adj(rng, n, 0.35)
        ps = PathSystem(adj, range(n))
        ps.seed_greedy()
        if ps.done:
            continue
        before = len(ps.path)
        non_edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if v not in adj[u]
        ]
        for u, v in non_edges:
            if not ps.is_operational_booster(u, v):
                continue
            adj[u].add(v)
            adj[v].add(u)
            out = ps.absorb_edge(u, v)
            assert out in (PATH_EXTENDED, CYCLE_MERGED, HAMILTON_CLOSED)
            assert ps.done or len(ps.path) > before
            break


def test_path_length_never_decreases():
    rng = random.Random(23)
    for _ in range(30):
        n = rng.randrange(5, 10)
        edges = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if rng.random() < 0.4
        ]
        rng.shuffle(edges)
        adj = [set() for _ in range(n)]
        ps = PathSystem(adj, range(n))
        best = 0
        for u, v in edges:
            adj[u].add(v)
            adj[v].add(u)
            ps.absorb_edge(u, v)
            if ps.done:
                break
            assert len(ps.path) >= best
            best = len(ps.path)


def test_fixed_end_is_preserved():
    adj = adj_from(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 2)])
    ps = PathSystem(adj, range(5), fixed_end=0)
    ps.seed_greedy()
    assert ps.path[0] == 0
    for witness in ps.closure_a.values():
        assert witness[0] == 0


# -- endpoint pair search ----------------------------------------------


def test_endpoint_pair_search_closes_spanning_cycle():
    n = 8
    edges = [(i, (i + 1) % n) for i in range(n)] + [(0, 4), (1, 5)]
    adj = adj_from(n, edges)
    found = endpoint_pair_search(adj, tuple(range(n)))
    assert found is not None
    assert found[0] in adj[found[-1]]
    assert validate_path(adj, found)


def test_endpoint_pair_search_gives_up_without_cycle():
    adj = adj_from(4, [(0, 1), (1, 2), (2, 3)])
    assert endpoint_pair_search(adj, (0, 1, 2, 3)) is None


# -- validators ---------------------------------------------------------


def test_validate_cycle():
    adj = adj_from(4, [(0, 1), (1, 2), (2, 3), (0, 3)])
    assert validate_cycle(adj, [0, 1, 2, 3], universe=range(4))
    assert not validate_cycle(adj, [0, 1, 2], universe=range(4))
    assert not validate_cycle(adj, [0, 1, 3], universe=None)
    assert not validate_cycle(adj, [0, 1, 1, 2], universe=None)


def test_validate_path():
    adj = adj_from(4, [(0, 1), (1, 2)])
    assert validate_path(adj, (0, 1, 2))
    assert not validate_path(adj, (0, 2))
    assert not validate_path(adj, (0, 1, 0))


# -- constrained Hamilton cycles ---------------------------------------


def cyclic_pairs(cycle):
    return {
        frozenset((cycle[i], cycle[(i + 1) % len(cycle)]))
        for i in range(len(cycle))
    }


def test_forced_cycle_plain_graph():
    n = 6
    adj = adj_from(n, [(i, (i + 1) % n) for i in range(n)])
    cycle = hamilton_cycle_forced(adj, n, {})
    assert cycle is not None
    assert validate_cycle(adj, cycle, universe=range(n))


def test_forced_pair_is_respected():
    n = 6
    edges = [(i, (i + 1) % n) for i in range(n)] + [(0, 3), (1, 4)]
    adj = adj_from(n, edges)
    forced = {0: [1], 1: [0]}
    cycle = hamilton_cycle_forced(adj, n, forced)
    assert cycle is not None
    assert frozenset((0, 1)) in cyclic_pairs(cycle)


def test_forced_pair_need_not_be_a_host_edge():
    # the pair (0, 2) stands for a contracted path, not an adjacency
    adj = adj_from(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4), (1, 3)])
    forced = {0: [2], 2: [0]}
    cycle = hamilton_cycle_forced(adj, 5, forced)
    assert cycle is not None
    pairs = cyclic_pairs(cycle)
    assert frozenset((0, 2)) in pairs
    for pair in pairs - {frozenset((0, 2))}:
        u, v = tuple(pair)
        assert v in adj[u]


def test_forced_subcycle_is_infeasible():
    adj = adj_from(5, [(u, v) for u in range(5) for v in range(u + 1, 5)])
    forced = {0: [1, 2], 1: [0, 2], 2: [0, 1]}
    assert hamilton_cycle_forced(adj, 5, forced) is None


def test_fully_forced_cycle_is_returned():
    adj = [set() for _ in range(4)]
    forced = {0: [1, 3], 1: [0, 2], 2: [1, 3], 3: [2, 0]}
    cycle = hamilton_cycle_forced(adj, 4, forced)
    assert cycle is not None
    assert cyclic_pairs(cycle) == {
        frozenset((0, 1)),
        frozenset((1, 2)),
        frozenset((2, 3)),
        frozenset((3, 0)),
    }


def test_degree_one_vertex_is_infeasible():
    adj = adj_from(4, [(0, 1), (1, 2), (2, 3)])
    assert hamilton_cycle_forced(adj, 4, {}) is None


def test_forced_result_on_random_graphs_matches_oracle():
    from edgebudget.oracles import hamiltonian_exact

    rng = random.Random(31)
    for _ in range(40):
        n = rng.randrange(5, 10)
        adj = random_adj(rng, n, 0.5)
        cycle = hamilton_cycle_forced(adj, n, {})
        ham, _ = hamiltonian_exact((n, [(u, v) for u in range(n) for v in adj[u] if u < v]))
        if cycle is None:
            assert not ham
        else:
            assert ham
            assert validate_cycle(adj, cycle, universe=range(n))
