"""Builder's purchased graph plus structural diagnostics.

Degeneracy, expansion checking and edge-span maxima are exact only on
small instances; the exponential-enumeration cutoff is EXACT_LIMIT.
"""

from itertools import combinations

import numpy as np

EXACT_LIMIT = 24


class BudgetLedger:
    """Counters for the (t, b) caps: observed <= t, purchased <= b."""

    def __init__(self, t, b):
        if b > t:
            raise ValueError("budget cannot exceed observation time")
        self.t = t
        self.b = b
        self.observed = 0
        self.purchased = 0

    def observe(self):
        if self.observed >= self.t:
            raise RuntimeError("observation cap exceeded")
        self.observed += 1

    def can_purchase(self):
        return self.purchased < self.b

    def purchase(self):
        if self.purchased >= self.b:
            raise RuntimeError("budget cap exceeded")
        self.purchased += 1

    def check(self):
        assert self.purchased <= self.b
        assert self.observed <= self.t
        assert self.purchased <= self.observed


class PurchasedGraph:
    """Simple graph on 0..n-1 with degrees and dynamic components."""

    def __init__(self, n):
        from edgebudget.unionfind import UnionFind

        self.n = n
        self.adj = [set() for _ in range(n)]
        self.degree = [0] * n
        self.edge_count = 0
        self.components = UnionFind(n)

    def has_edge(self, u, v):
        return v in self.adj[u]

    def add_edge(self, u, v):
        if u == v:
            raise ValueError("loops are not allowed")
        if v in self.adj[u]:
            # strategies never re-observe an edge; a duplicate is a bug
            raise ValueError(f"duplicate edge ({u}, {v})")
        self.adj[u].add(v)
        self.adj[v].add(u)
        self.degree[u] += 1
        self.degree[v] += 1
        self.edge_count += 1
        self.components.union(u, v)

    def edges(self):
        for u in range(self.n):
            for v in self.adj[u]:
                if u < v:
                    yield (u, v)

    def min_degree(self):
        return min(self.degree) if self.n else 0

    def is_connected(self):
        return self.components.count == 1

    def dump(self, path):
        """Edge-list text dump: header "n m", then one "u v" per line."""
        with open(path, "w") as fh:
            fh.write(f"{self.n} {self.edge_count}\n")
            for u, v in sorted(self.edges()):
                fh.write(f"{u} {v}\n")

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            header = fh.readline().split()
            if len(header) != 2:
                raise ValueError("malformed edge list: bad header")
            n, m = int(header[0]), int(header[1])
            g = cls(n)
            for line in fh:
                parts = line.split()
                if not parts:
                    continue
                if len(parts) != 2:
                    raise ValueError(f"malformed edge list line: {line!r}")
                g.add_edge(int(parts[0]), int(parts[1]))
            if g.edge_count != m:
                raise ValueError("malformed edge list: edge count mismatch")
        return g


def degeneracy(g):
    """Exact degeneracy by iterative minimum-degree peeling."""
    n = g.n
    deg = list(g.degree)
    removed = [False] * n
    # bucket queue over degrees
    buckets = [set() for _ in range(max(deg, default=0) + 1)]
    for v in range(n):
        buckets[deg[v]].add(v)
    best = 0
    cur = 0
    for _ in range(n):
        while cur < len(buckets) and not buckets[cur]:
            cur += 1
        if cur >= len(buckets):
            break
        v = buckets[cur].pop()
        removed[v] = True
        best = max(best, deg[v])
        for w in g.adj[v]:
            if not removed[w]:
                buckets[deg[w]].discard(w)
                deg[w] -= 1
                buckets[deg[w]].add(w)
        cur = max(0, cur - 1)
    return best


def neighbourhood(g, vertices):
    """External neighbourhood N(U) of a vertex set U."""
    out = set()
    for v in vertices:
        out |= g.adj[v]
    return out - set(vertices)


def is_r_expander(g, r, mode="exact", samples=200, rng=None):
    """Check |N(U)| >= 2|U| for every U with |U| <= r.

    Exact mode enumerates all sets (n <= EXACT_LIMIT).  Sampled mode is
    one-sided: a False is certified by a witness; True only means no
    violation was found among the sampled sets.
    Returns (ok, witness) where witness is a violating set or None.
    """
    n = g.n
    if mode == "exact":
        if n > EXACT_LIMIT:
            raise ValueError(f"exact expansion check limited to n <= {EXACT_LIMIT}")
        for size in range(1, min(r, n) + 1):
            for u in combinations(range(n), size):
                if len(neighbourhood(g, u)) < 2 * size:
                    return False, set(u)
        return True, None
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    if rng is None:
        rng = np.random.Generator(np.random.Philox(key=0))
    for size in range(1, min(r, n) + 1):
        for _ in range(samples):
            u = rng.choice(n, size=size, replace=False)
            if len(neighbourhood(g, u.tolist())) < 2 * size:
                return False, set(int(x) for x in u)
    return True, None


def max_edges_spanned(g, q):
    """Max number of edges inside any vertex set of size q (n <= EXACT_LIMIT)."""
    if g.n > EXACT_LIMIT:
        raise ValueError(f"exact span check limited to n <= {EXACT_LIMIT}")
    best = 0
    for u in combinations(range(g.n), q):
        inside = set(u)
        count = sum(1 for v in u for w in g.adj[v] if w > v and w in inside)
        best = max(best, count)
    return best
