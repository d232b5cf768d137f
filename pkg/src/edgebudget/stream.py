"""The random graph process: a seeded uniform ordering of the edges of K_n.

Edges are sampled lazily (rejection against the set already revealed)
while less than half of K_n has been revealed, then the remaining edges
are shuffled explicitly.  The Philox counter-based generator guarantees
identical sequences for identical (n, seed) across runs and platforms.
"""

import math

import numpy as np

from edgebudget.unionfind import UnionFind

_BUF = 4096


def canonical_edge(u, v):
    """Return the edge {u, v} in canonical (min, max) form."""
    if u == v:
        raise ValueError("loops are not edges")
    return (u, v) if u < v else (v, u)


class EdgeStream:
    """Uniformly random permutation of the edges of K_n, drawn lazily.

    next_edge() returns canonical (u, v) tuples without replacement and
    None once all C(n, 2) edges have been revealed.
    """

    def __init__(self, n, seed):
        if n < 2:
            raise ValueError("need at least 2 vertices")
        self.n = n
        self.seed = seed
        self.total = n * (n - 1) // 2
        self.drawn = 0
        self._rng = np.random.Generator(np.random.Philox(key=seed))
        self._seen = set()
        self._tail = None  # shuffled remainder, used past the halfway point
        self._buf_u = self._buf_v = None
        self._buf_pos = 0
        self._buf_len = 0

    def _refill(self):
        n = self.n
        u = self._rng.integers(0, n, size=_BUF)
        v = self._rng.integers(0, n - 1, size=_BUF)
        v += v >= u
        self._buf_u = np.minimum(u, v)
        self._buf_v = np.maximum(u, v)
        self._buf_pos = 0
        self._buf_len = _BUF

    def _switch_to_tail(self):
        n = self.n
        remaining = [
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if u * n + v not in self._seen
        ]
        order = self._rng.permutation(len(remaining))
        self._tail = [remaining[i] for i in order]
        self._tail.reverse()  # pop from the end

    def next_edge(self):
        """Draw the next edge, or None if the stream is exhausted."""
        if self.drawn >= self.total:
            return None
        if self._tail is None and 2 * self.drawn >= self.total:
            self._switch_to_tail()
        if self._tail is not None:
            u, v = self._tail.pop()
            self.drawn += 1
            return (u, v)
        n = self.n
        seen = self._seen
        while True:
            if self._buf_pos >= self._buf_len:
                self._refill()
            i = self._buf_pos
            self._buf_pos = i + 1
            u = int(self._buf_u[i])
            v = int(self._buf_v[i])
            code = u * n + v
            if code not in seen:
                seen.add(code)
                self.drawn += 1
                return (u, v)

    def __iter__(self):
        return self

    def __next__(self):
        e = self.next_edge()
        if e is None:
            raise StopIteration
        return e


class ProcessClock:
    """Tracks the underlying process G_s: time, degrees and components."""

    def __init__(self, n):
        self.n = n
        self.time = 0
        self.degrees = [0] * n
        self.components = UnionFind(n)

    def reveal(self, u, v):
        self.time += 1
        self.degrees[u] += 1
        self.degrees[v] += 1
        self.components.union(u, v)


def hitting_time(n, seed, property):
    """First time s at which G_s has the given property.

    property is either ("mindeg", k) with k >= 1, or "connected".
    Replays the stream for (n, seed); the answer is deterministic in
    those two arguments.
    """
    if property == "connected":
        stream = EdgeStream(n, seed)
        uf = UnionFind(n)
        for s, (u, v) in enumerate(stream, start=1):
            uf.union(u, v)
            if uf.count == 1:
                return s
        raise AssertionError("K_n is connected")
    kind, k = property
    if kind != "mindeg" or k < 1:
        raise ValueError(f"unknown property {property!r}")
    return _hitting_time_mindeg(n, seed, k)


def _hitting_time_mindeg(n, seed, k):
    stream = EdgeStream(n, seed)
    deg = [0] * n
    below = n  # vertices of degree < k
    for s, (u, v) in enumerate(stream, start=1):
        deg[u] += 1
        if deg[u] == k:
            below -= 1
        deg[v] += 1
        if deg[v] == k:
            below -= 1
        if below == 0:
            return s
    raise AssertionError("K_n has minimum degree n-1 >= k")


def expected_tau_k(n, k):
    """Asymptotic hitting time n/2 (log n + (k-1) log log n)."""
    return 0.5 * n * (math.log(n) + (k - 1) * math.log(math.log(n)))
