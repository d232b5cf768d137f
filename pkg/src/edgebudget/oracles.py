"""Brute-force ground truth on small instances.

Exact Hamiltonicity and boosters (subset DP), trap enumeration for tree
and cycle targets, path counting, subgraph containment, and the coupling
sampler for the k-nearest-neighbour / k-out random graph pair.
All size limits live in ORACLE_LIMITS.
"""

from dataclasses import dataclass

import numpy as np

from edgebudget.unionfind import UnionFind

ORACLE_LIMITS = {
    "hamiltonian": 20,
    "boosters": 14,
    "path_length": 8,
    "path_edges": 10_000,
    "subgraph_vertices": 10,
    "trap_host_vertices": 500,
}


def _adjacency(g):
    """Accept a PurchasedGraph or a (n, edges) pair."""
    if hasattr(g, "adj"):
        return g.n, g.adj
    n, edges = g
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    return n, adj


# -- exact Hamiltonicity / longest paths ------------------------------


def _states_from(adj, n, start):
    """All (mask, v) path states reachable from `start`, with predecessors."""
    init = (1 << start, start)
    pred = {init: None}
    stack = [init]
    while stack:
        mask, v = stack.pop()
        for w in adj[v]:
            bit = 1 << w
            if mask & bit:
                continue
            state = (mask | bit, w)
            if state not in pred:
                pred[state] = (mask, v)
                stack.append(state)
    return pred


def _all_states(adj, n):
    """Path states over all starts (start forgotten), with predecessors."""
    pred = {}
    stack = []
    for v in range(n):
        s = (1 << v, v)
        pred[s] = None
        stack.append(s)
    while stack:
        mask, v = stack.pop()
        for w in adj[v]:
            bit = 1 << w
            if mask & bit:
                continue
            state = (mask | bit, w)
            if state not in pred:
                pred[state] = (mask, v)
                stack.append(state)
    return pred


def _reconstruct(pred, state):
    path = []
    while state is not None:
        path.append(state[1])
        state = pred[state]
    path.reverse()
    return path


def hamiltonian_exact(g):
    """(is_hamiltonian, cycle witness or None), exact for n <= 20."""
    n, adj = _adjacency(g)
    if n > ORACLE_LIMITS["hamiltonian"]:
        raise ValueError("hamiltonian oracle limited to n <= 20")
    if n < 3:
        return False, None
    if any(len(adj[v]) < 2 for v in range(n)):
        return False, None
    full = (1 << n) - 1
    pred = _states_from(adj, n, 0)
    for v in adj[0]:
        state = (full, v)
        if state in pred:
            return True, _reconstruct(pred, state)
    return False, None


def longest_path(g):
    """(length in edges, witness vertex list), exact for n <= 14."""
    n, adj = _adjacency(g)
    pred = _all_states(adj, n)
    best = max(pred, key=lambda s: s[0].bit_count())
    path = _reconstruct(pred, best)
    return len(path) - 1, path


def has_ham_path_between(adj, n, x, y):
    full = (1 << n) - 1
    return (full, y) in _states_from(adj, n, x)


def exact_boosters(g):
    """All non-edges whose addition makes g Hamiltonian or lengthens its
    longest path.  Empty for graphs that are already Hamiltonian.
    Exact for n <= 14."""
    n, adj = _adjacency(g)
    if n > ORACLE_LIMITS["boosters"]:
        raise ValueError("booster oracle limited to n <= 14")
    if n >= 3 and hamiltonian_exact((n, _edge_list(adj, n)))[0]:
        return set()
    pred = _all_states(adj, n)
    longest = max(s[0].bit_count() for s in pred)
    size = 1 << n
    # reach_max[y][mask] = max vertices of a path ending at y inside mask
    reach_max = np.full((n, size), -1, dtype=np.int8)
    for mask, v in pred:
        c = mask.bit_count()
        if c > reach_max[v][mask]:
            reach_max[v][mask] = c
    idx = np.arange(size)
    for y in range(n):
        row = reach_max[y]
        for b in range(n):
            with_bit = idx[(idx >> b) & 1 == 1]
            np.maximum(row[with_bit], row[with_bit ^ (1 << b)], out=row[with_bit])
    by_end = {v: [] for v in range(n)}
    for mask, v in pred:
        by_end[v].append(mask)
    full = (1 << n) - 1
    boosters = set()
    for x in range(n):
        for y in range(x + 1, n):
            if y in adj[x]:
                continue
            found = False
            row = reach_max[y]
            for mask in by_end[x]:
                other = int(row[full ^ mask])
                if other > 0 and mask.bit_count() + other > longest:
                    found = True
                    break
            if not found and n >= 3:
                found = has_ham_path_between(adj, n, x, y)
            if found:
                boosters.add((x, y))
    return boosters


# -- subgraph containment, traps, path counting -----------------------


def tree_edges(kind, size):
    """Edge list for a named small tree: ("path", k) or ("star", k)."""
    if kind == "path":
        return [(i, i + 1) for i in range(size - 1)]
    if kind == "star":
        return [(0, i) for i in range(1, size)]
    raise ValueError(f"unknown tree kind {kind!r}")


@dataclass
class TargetGraph:
    """A tree (edge list) or cycle (length) target."""

    kind: str  # "tree" | "cycle"
    edges: list | None = None  # for trees, on vertices 0..k-1
    length: int | None = None  # for cycles

    @property
    def num_vertices(self):
        if self.kind == "cycle":
            return self.length
        return 1 + max(max(e) for e in self.edges)

    @classmethod
    def cycle(cls, length):
        return cls(kind="cycle", length=length)

    @classmethod
    def tree(cls, edges):
        return cls(kind="tree", edges=[tuple(e) for e in edges])


def _find_path_between(adj, x, y, length, blocked=None):
    """A path from x to y with exactly `length` edges, or None."""
    if blocked is None:
        blocked = set()
    path = [x]
    used = {x} | blocked

    def rec():
        v = path[-1]
        remaining = length - (len(path) - 1)
        if remaining == 0:
            return v == y
        for w in adj[v]:
            if w in used or (w == y and remaining != 1):
                continue
            path.append(w)
            used.add(w)
            if rec():
                return True
            used.discard(w)
            path.pop()
        return False

    return list(path) if rec() else None


def _embed_tree(adj, n, tedges, forced=None):
    """Backtracking embedding of a tree into the host; returns the map or None.

    forced maps tree vertices to required host vertices.
    """
    k = 1 + max(max(e) for e in tedges)
    tadj = [[] for _ in range(k)]
    for a, b in tedges:
        tadj[a].append(b)
        tadj[b].append(a)
    root = next(iter(forced)) if forced else 0
    # BFS order from the root so each new vertex has an embedded neighbour
    order = [root]
    parent = {root: None}
    for v in order:
        for w in tadj[v]:
            if w not in parent:
                parent[w] = v
                order.append(w)
    mapping = {}
    used = set()

    def rec(i):
        if i == len(order):
            return True
        tv = order[i]
        if forced and tv in forced:
            candidates = [forced[tv]]
        elif parent[tv] is None:
            candidates = range(n)
        else:
            candidates = adj[mapping[parent[tv]]]
        for hv in candidates:
            if hv in used:
                continue
            if parent[tv] is not None and hv not in adj[mapping[parent[tv]]]:
                continue
            mapping[tv] = hv
            used.add(hv)
            if rec(i + 1):
                return True
            used.discard(hv)
            del mapping[tv]
        return False

    return dict(mapping) if rec(0) else None


def contains_subgraph(g, target):
    """(contained, embedding) for a tree or cycle target, exact."""
    n, adj = _adjacency(g)
    if target.num_vertices > ORACLE_LIMITS["subgraph_vertices"]:
        raise ValueError("subgraph targets limited to 10 vertices")
    if target.kind == "cycle":
        ell = target.length
        for v in range(n):
            if len(adj[v]) < 2:
                continue
            cycle = _cycle_through(adj, v, ell)
            if cycle is not None:
                return True, cycle
        return False, None
    mapping = _embed_tree(adj, n, target.edges)
    if mapping is None:
        return False, None
    return True, mapping


def _cycle_through(adj, v, ell):
    """A cycle of length ell whose minimum vertex is v, or None."""
    path = [v]
    used = {v}

    def rec():
        u = path[-1]
        remaining = ell - len(path)
        if remaining == 0:
            return v in adj[u]
        for w in adj[u]:
            if w <= v or w in used:
                continue
            if remaining == 1 and v not in adj[w]:
                continue
            path.append(w)
            used.add(w)
            if rec():
                return True
            used.discard(w)
            path.pop()
        return False

    return list(path) if rec() else None


@dataclass
class TrapSet:
    target: TargetGraph
    traps: set


def enumerate_traps(g, target):
    """Exact set of non-edges whose purchase completes a copy of the target.

    The host must be target-free.
    """
    n, adj = _adjacency(g)
    positive = [v for v in range(n) if adj[v]]
    if target.kind == "cycle" and len(positive) > ORACLE_LIMITS["trap_host_vertices"]:
        raise ValueError("trap host too large for cycle targets")
    if contains_subgraph((n, _edge_list(adj, n)), target)[0]:
        raise ValueError("host already contains the target")
    traps = set()
    if target.kind == "cycle":
        ell = target.length
        for i, x in enumerate(positive):
            for y in positive[i + 1 :]:
                if y in adj[x]:
                    continue
                if _find_path_between(adj, x, y, ell - 1) is not None:
                    traps.add((x, y))
    else:
        isolated = [v for v in range(n) if not adj[v]]
        candidates = []
        for i, x in enumerate(positive):
            for y in positive[i + 1 :]:
                if y not in adj[x]:
                    candidates.append((x, y))
            for y in isolated:
                candidates.append((min(x, y), max(x, y)))
        for x, y in candidates:
            adj[x].add(y)
            adj[y].add(x)
            hit = _tree_copy_using(adj, n, target.edges, x, y)
            adj[x].discard(y)
            adj[y].discard(x)
            if hit:
                traps.add((x, y))
    return TrapSet(target=target, traps=traps)


def _tree_copy_using(adj, n, tedges, x, y):
    """Does the host contain the tree with edge {x, y} as some tree edge?"""
    for a, b in tedges:
        for fa, fb in ((x, y), (y, x)):
            if _embed_tree(adj, n, tedges, forced={a: fa, b: fb}) is not None:
                return True
    return False


def _edge_list(adj, n):
    return [(u, v) for u in range(n) for v in adj[u] if u < v]


def count_paths(g, ell):
    """Exact number of (undirected) paths with ell edges."""
    n, adj = _adjacency(g)
    if ell > ORACLE_LIMITS["path_length"]:
        raise ValueError("path counting limited to length 8")
    m = sum(len(a) for a in adj) // 2
    if m > ORACLE_LIMITS["path_edges"]:
        raise ValueError("path counting host too large")
    if ell == 0:
        return n
    total = 0
    path_used = set()

    def rec(v, remaining):
        nonlocal total
        if remaining == 0:
            total += 1
            return
        for w in adj[v]:
            if w in path_used:
                continue
            path_used.add(w)
            rec(w, remaining - 1)
            path_used.discard(w)

    for v in range(n):
        path_used.add(v)
        rec(v, ell)
        path_used.discard(v)
    return total // 2


# -- the O_k / G_k coupling -------------------------------------------


def coupled_ok_kout(n, k, seed):
    """Sample (O_k, G_k) under the shared ordered-pair weights.

    Returns (ok_edges, kout_edges) as sets of canonical pairs drawn from
    one weight matrix, so that O_k is a subgraph of G_k pointwise.
    """
    if n <= k:
        raise ValueError("need n > k")
    rng = np.random.Generator(np.random.Philox(key=seed))
    w = rng.random((n, n), dtype=np.float32)
    np.fill_diagonal(w, np.inf)
    kout = _knearest_edges(w, k)
    x = np.minimum(w, w.T)
    ok = _knearest_edges(x, k)
    return ok, kout


def _knearest_edges(weights, k):
    n = weights.shape[0]
    idx = np.argpartition(weights, k, axis=1)[:, :k]
    rows = np.repeat(np.arange(n), k)
    cols = idx.ravel()
    u = np.minimum(rows, cols)
    v = np.maximum(rows, cols)
    return set(zip(u.tolist(), v.tolist()))


def edges_connected(n, edges):
    uf = UnionFind(n)
    for u, v in edges:
        uf.union(u, v)
    return uf.count == 1
