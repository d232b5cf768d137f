"""Builder strategies: state machines consuming (edge, clock) and
emitting purchase decisions.

Each strategy owns its purchased graph and budget ledger.  Decisions
depend only on Builder's own graph and prior observations; hitting-time
caps are supplied by the harness as the trial's observation limit.
"""

import math
from collections import deque

from edgebudget.graphstate import BudgetLedger, PurchasedGraph
from edgebudget.rotation import (
    PathSystem,
    endpoint_pair_search,
    hamilton_cycle_forced,
    validate_cycle,
)
from edgebudget.unionfind import UnionFind


class BuilderStrategy:
    name = "base"
    stage_names = ("main",)
    _pending = None

    def __init__(self, n, t, b):
        self.n = n
        self.t = t
        self.b = b
        self.graph = PurchasedGraph(n)
        self.ledger = BudgetLedger(t, b)
        self.stage = 0
        self.success = False
        self.failure = None
        self.witness = None
        self.counters = {}

    @property
    def done(self):
        return self.success or self.failure is not None

    def observe(self, u, v):
        """Feed one observed edge; returns True iff it was purchased."""
        self.ledger.observe()
        if self.done:
            return False
        if not self.decide(u, v):
            return False
        if not self.ledger.can_purchase():
            self.fail("budget-exhausted")
            return False
        self.ledger.purchase()
        self.graph.add_edge(u, v)
        self.after_purchase(u, v)
        return True

    def decide(self, u, v):
        raise NotImplementedError

    def after_purchase(self, u, v):
        pass

    def finish(self):
        """Called when the observation cap is reached without a verdict."""
        if not self.done:
            self.fail("time-exhausted")

    def fail(self, reason):
        if not self.done:
            self.failure = f"{reason}@{self.stage_names[self.stage]}"

    def succeed(self, witness):
        self.success = True
        self.witness = witness

    def params(self):
        return {}

    def descriptor(self):
        return {
            "name": self.name,
            "params": self.params(),
            "stages": list(self.stage_names),
        }


# -- warm-up: connectivity --------------------------------------------


class ConnectivityStrategy(BuilderStrategy):
    """Purchase an edge iff it decreases the number of components."""

    name = "connectivity"
    stage_names = ("forest",)

    def decide(self, u, v):
        return not self.graph.components.connected(u, v)

    def after_purchase(self, u, v):
        if self.graph.is_connected():
            self.succeed({"kind": "spanning_tree"})


# -- Theorem A: O_k emulation -----------------------------------------


class NNEmulationStrategy(BuilderStrategy):
    """Purchase any edge touching a vertex of degree below k.

    Run to the hitting time tau_k, the purchased graph is exactly the
    k-nearest-neighbour graph of the arrival order.
    """

    name = "nn_emulation"
    stage_names = ("emulate",)

    def __init__(self, n, t, b, k):
        super().__init__(n, t, b)
        self.k = k
        self.below = n  # vertices of degree < k

    def params(self):
        return {"k": self.k}

    def decide(self, u, v):
        deg = self.graph.degree
        return deg[u] < self.k or deg[v] < self.k

    def after_purchase(self, u, v):
        deg = self.graph.degree
        if deg[u] == self.k:
            self.below -= 1
        if deg[v] == self.k:
            self.below -= 1
        if self.below == 0:
            self.succeed({"kind": "mindeg", "k": self.k})

    def finish(self):
        if self.below == 0:
            self.succeed({"kind": "mindeg", "k": self.k})
        else:
            self.fail("mindeg-not-reached")


# -- Theorem B: two-stage minimum degree ------------------------------


class TwoStageMinDegStrategy(BuilderStrategy):
    """Greedy k-matching, then top up the leftover low-degree set V0.

    The top-up stage purchases at most k edges per V0 vertex either way;
    scope "open" accepts any edge touching a still-deficient V0 vertex,
    scope "v0" additionally demands both endpoints in V0.  The narrow
    scope needs far more time to see enough usable edges, so "open" is
    the default.
    """

    name = "two_stage_mindeg"
    stage_names = ("k-matching", "low-degree")

    def __init__(self, n, t, b, k, eps, scope="open"):
        super().__init__(n, t, b)
        if scope not in ("open", "v0"):
            raise ValueError(f"unknown scope {scope!r}")
        self.k = k
        self.eps = eps
        self.scope = scope
        self.eps1 = eps / 2
        # the matching stage must leave room for the top-up stage even
        # when Cn exceeds the trial's whole observation window; the
        # top-up stage carries the coupon-collector tail, so give it
        # the larger share
        self.stage0_cap = min(math.ceil(k * n / self.eps1**2), t // 3)
        self.v0_target = math.floor(self.eps1 * n)
        self.below = n
        self.v0 = None
        self.induced_deg = None

    def params(self):
        return {"k": self.k, "eps": self.eps, "scope": self.scope}

    def _enter_stage1(self):
        self.stage = 1
        deg = self.graph.degree
        self.v0 = {v for v in range(self.n) if deg[v] < self.k}
        self.counters["v0_size"] = len(self.v0)
        self.induced_deg = {
            v: sum(1 for w in self.graph.adj[v] if w in self.v0) for v in self.v0
        }

    def decide(self, u, v):
        if self.stage == 0 and (
            self.ledger.observed > self.stage0_cap or self.below <= self.v0_target
        ):
            self._enter_stage1()
        deg = self.graph.degree
        if self.stage == 0:
            return deg[u] < self.k and deg[v] < self.k
        if self.scope == "open":
            return (u in self.v0 and deg[u] < self.k) or (
                v in self.v0 and deg[v] < self.k
            )
        if u not in self.v0 or v not in self.v0:
            return False
        return self.induced_deg[u] < self.k or self.induced_deg[v] < self.k

    def after_purchase(self, u, v):
        deg = self.graph.degree
        if deg[u] == self.k:
            self.below -= 1
        if deg[v] == self.k:
            self.below -= 1
        if self.stage == 1 and u in self.v0 and v in self.v0:
            self.induced_deg[u] += 1
            self.induced_deg[v] += 1
        if self.below == 0:
            self.succeed({"kind": "mindeg", "k": self.k})

    def finish(self):
        if self.below == 0:
            self.succeed({"kind": "mindeg", "k": self.k})
        else:
            self.fail("mindeg-not-reached")


# -- Theorem C(1): Hamiltonicity in optimal time ----------------------


class HamOptimalTimeStrategy(BuilderStrategy):
    """O_8 emulation, then purchase every operational booster."""

    name = "ham_optimal_time"
    stage_names = ("expander", "boosters")

    def __init__(self, n, t, b, eps):
        super().__init__(n, t, b)
        self.eps = eps
        nlogn = n * math.log(n)
        reserve = math.ceil(eps * nlogn / 4)
        self.stage0_cap = min(
            math.ceil((1 + eps / 2) * nlogn / 2), max(0, t - reserve)
        )
        self.below8 = n
        self.ps = None
        self._was_booster = False
        self._dirty = 0

    def params(self):
        return {"eps": self.eps}

    def _enter_boosters(self):
        self.stage = 1
        self.counters["expander_edges"] = self.graph.edge_count
        self.ps = PathSystem(self.graph.adj, range(self.n))
        self.ps.seed_greedy()
        self.counters["seed_path_len"] = len(self.ps.path)
        if self.ps.done:
            self._close()

    def _close(self):
        self.counters["final_path_len"] = len(self.ps.path)
        self.succeed({"kind": "hamilton_cycle", "cycle": list(self.ps.cycle)})

    def decide(self, u, v):
        if self.stage == 0:
            if self.ledger.observed > self.stage0_cap or self.below8 == 0:
                self._enter_boosters()
                if self.done:
                    return False
            else:
                deg = self.graph.degree
                return deg[u] < 8 or deg[v] < 8
        if self.ps.is_operational_booster(u, v):
            self._was_booster = True
            return True
        # keep filling in the expander alongside the booster hunt; the
        # degree rule stays within its 8n share of the budget
        deg = self.graph.degree
        if deg[u] < 8 or deg[v] < 8:
            self._was_booster = False
            return True
        return False

    def after_purchase(self, u, v):
        if self.stage == 0:
            deg = self.graph.degree
            if deg[u] == 8:
                self.below8 -= 1
            if deg[v] == 8:
                self.below8 -= 1
            return
        # recomputing the rotation closures is the expensive step, so
        # plain degree-rule edges are batched; boosters act immediately
        if self._was_booster or self._dirty >= 15:
            self.ps.absorb_edge(u, v)
            self._dirty = 0
        else:
            self._dirty += 1
        if self.ps.done:
            self._close()

    def finish(self):
        if self.done:
            return
        if self.ps is None:
            self._enter_boosters()
        if self.done:
            return
        self.ps.recompute()
        self.ps.improve()
        if self.ps.done:
            self._close()
            return
        self.counters["final_path_len"] = len(self.ps.path)
        if self.ps.spanning():
            # last resort: search endpoint pairs of the spanning path
            found = endpoint_pair_search(self.graph.adj, self.ps.path)
            if found is not None:
                self.succeed({"kind": "hamilton_cycle", "cycle": list(found)})
                return
        self.fail("no-hamilton-cycle")


# -- Theorem C(2): Hamiltonicity under optimal budget -----------------


class HamOptimalBudgetStrategy(BuilderStrategy):
    """Near-optimal budget via a dense kernel and sealed path fragments.

    The budget slack (b - n) cannot buy density everywhere, so it buys a
    kernel: a fixed vertex set that collects its internally observed
    edges up to degree kernel_deg over the whole stream.  Outside the
    kernel, cheap merges chain the remaining vertices into path
    fragments, and each fragment is sealed by buying a spoke from either
    end to a kernel anchor.  Sealed interiors have degree exactly two,
    so any Hamilton cycle of the bought graph is forced straight through
    every fragment and out of its spokes.  That reduces the endgame to a
    small quotient problem, solved once the stream ends: a Hamilton
    cycle on the kernel through one forced edge per fragment, found by
    rotations that never cut a forced pair.

    sigma sets the fragment count at which sealing starts and eta how
    long to wait before spending spokes.
    """

    name = "ham_optimal_budget"
    stage_names = ("grow", "seal", "assemble")

    def __init__(self, n, t, b, eps=0.1, sigma=0.4, eta=0.6, kernel_deg=4):
        super().__init__(n, t, b)
        self.eps = eps
        self.sigma = sigma
        self.eta = eta
        self.kernel_deg = kernel_deg
        logn = math.log(n)
        slack = max(0, min(b, t) - n)
        # kernel purchases beyond one cycle edge per kernel vertex are
        # overhead; the degree cap bounds the overhead at roughly
        # (kernel_deg / 2 - 1) per vertex, which sizes m off the slack
        self.m = max(8, min(n // 4, (2 * slack) // 3))
        self.kdeg = [0] * self.m
        self.kernel_edges = 0
        self.spoke_frags = max(10, math.ceil(n / logn**sigma) // 20)
        self.spoke_at = math.ceil(n * logn**eta)
        self.spokes = {}  # fragment end -> list of kernel anchors
        self.spoke_count = 0
        self.served = [0] * self.m  # forced degree per kernel anchor
        self.forced_uf = UnionFind(self.m)  # forced-chain components
        self.first_target = {}  # fragment root -> anchor of first seal
        self.frag = UnionFind(n)
        self.core_deg = [0] * n
        self.off_frags = n - self.m

    def params(self):
        return {
            "eps": self.eps,
            "sigma": self.sigma,
            "eta": self.eta,
            "kernel_deg": self.kernel_deg,
        }

    # -- purchase rules -----------------------------------------------

    def _reserve(self):
        """Budget needed to finish merging and sealing from here."""
        left = self.off_frags + min(self.off_frags, self.spoke_frags)
        return max(0, left - self.spoke_count)

    def _kernel_edge(self, u, v):
        if u >= self.m or v >= self.m:
            return False
        if self.b - self.ledger.purchased <= self._reserve():
            return False
        if self.kdeg[u] < 3 or self.kdeg[v] < 3:
            return True  # the quotient needs a minimum degree everywhere
        return self.kdeg[u] < self.kernel_deg and self.kdeg[v] < self.kernel_deg

    def _fragment_merge(self, u, v):
        if u < self.m or v < self.m:
            return False
        if self.core_deg[u] > 1 or self.core_deg[v] > 1:
            return False
        # merging at one sealed end buries its spoke as a harmless extra
        # edge and saves a future spoke elsewhere; burying two at once
        # is pure waste
        sealed = 0
        for x in (u, v):
            have = self.spokes.get(x, ())
            want = 2 if self.core_deg[x] == 0 else 1
            if len(have) >= want:
                sealed += 1
        if sealed == 2:
            return False
        ru, rv = self.frag.find(u), self.frag.find(v)
        if ru == rv:
            return False
        # merging two half-sealed fragments joins their anchors into one
        # forced edge, so it must not close a cycle of forced edges
        fu, fv = self.first_target.get(ru), self.first_target.get(rv)
        if fu is not None and fv is not None and (
            self.forced_uf.find(fu) == self.forced_uf.find(fv)
        ):
            return False
        return True

    def _anchor_safe(self, k, margin=3):
        """Serving k a second time fills both its cycle slots, making its
        kernel edges useless to neighbours; refuse if that would leave a
        neighbour without spare usable degree."""
        if self.served[k] == 0:
            return True
        for w in self.graph.adj[k]:
            if w >= self.m:
                continue
            usable = sum(
                1 for z in self.graph.adj[w]
                if z < self.m and z != k and self.served[z] < 2
            )
            if self.served[w] + usable < margin:
                return False
        return True

    def _spoke_ok(self, u, v):
        led = self.ledger
        if led.observed < self.spoke_at:
            return False
        if self.b - led.purchased < self._reserve():
            return False
        window = self.off_frags <= self.spoke_frags
        early = self.off_frags <= 2 * self.spoke_frags
        for x, k in ((u, v), (v, u)):
            if not (k < self.m <= x):
                continue
            if self.core_deg[x] > 1:
                continue
            have = self.spokes.get(x, ())
            want = 2 if self.core_deg[x] == 0 else 1
            if k in have:
                continue
            # an anchor too poorly connected to carry plain kernel edges
            # can still sit on the cycle if spokes saturate it, so such
            # anchors may claim one extra spoke per end
            needy = (
                led.observed > 0.6 * self.t
                and self.kdeg[k] + self.served[k] < 2
            )
            if len(have) >= want + (1 if needy else 0):
                continue
            # a first spoke survives any later merge, riding along or
            # being buried for a saving, so it may be bought a little
            # before the window opens
            if not (window or needy
                    or (early and not have and self.core_deg[x] == 0)):
                continue
            if self.served[k] >= 2:
                continue
            # an end with no seal at all gets the lenient check: leaving
            # it bare loses outright, a tight anchor only might
            if not self._anchor_safe(k, margin=3 if have else 2):
                continue
            first = self.first_target.get(self.frag.find(x))
            if first is not None and (
                self.forced_uf.find(k) == self.forced_uf.find(first)
            ):
                continue  # would close a cycle of forced edges
            self._pending = ("S", x, k)
            return True
        return False

    def decide(self, u, v):
        if self._kernel_edge(u, v):
            self._pending = ("K",)
            return True
        if self._fragment_merge(u, v):
            self._pending = ("A",)
            return True
        return self._spoke_ok(u, v)

    def after_purchase(self, u, v):
        tag = self._pending
        self._pending = None
        kind = tag[0]
        if kind == "K":
            self.kdeg[u] += 1
            self.kdeg[v] += 1
            self.kernel_edges += 1
        elif kind == "A":
            ru, rv = self.frag.find(u), self.frag.find(v)
            fu = self.first_target.pop(ru, None)
            fv = self.first_target.pop(rv, None)
            self.core_deg[u] += 1
            self.core_deg[v] += 1
            self.frag.union(u, v)
            self.off_frags -= 1
            if fu is not None and fv is not None:
                self.forced_uf.union(fu, fv)
                self.first_target[self.frag.find(u)] = fu
            elif fu is not None or fv is not None:
                self.first_target[self.frag.find(u)] = fu if fu is not None else fv
        else:
            _, x, k = tag
            self.spokes.setdefault(x, []).append(k)
            self.spoke_count += 1
            self.served[k] += 1
            root = self.frag.find(x)
            first = self.first_target.get(root)
            if first is None:
                self.first_target[root] = k
                self.stage = max(self.stage, 1)
            else:
                self.forced_uf.union(k, first)

    # -- endgame assembly ---------------------------------------------

    def _walk(self, start, verts):
        """Order a fragment's vertices by walking its merge edges."""
        path, prev, cur = [start], None, start
        while True:
            nxt = next(
                (y for y in self.graph.adj[cur]
                 if y >= self.m and y != prev and y in verts),
                None,
            )
            if nxt is None:
                return path
            prev, cur = cur, nxt
            path.append(cur)

    def _collect_fragments(self):
        comps = {}
        for x in range(self.m, self.n):
            comps.setdefault(self.frag.find(x), []).append(x)
        forced, frag_path, unsealed = {}, {}, 0
        # prefer poorly connected anchors so spokes shore up the kernel
        # where plain degree is short, but never close a forced cycle
        uf = UnionFind(self.m)
        rank = lambda k: len([y for y in self.graph.adj[k] if y < self.m])
        for verts in comps.values():
            if len(verts) == 1:
                x = verts[0]
                sp = self.spokes.get(x, ())
                if len(sp) < 2:
                    unsealed += 1
                    continue
                path = [x]
                cands = sorted(sp, key=rank)
                pair = next(
                    ((a, b) for i, a in enumerate(cands)
                     for b in cands[i + 1:]
                     if uf.find(a) != uf.find(b)),
                    None,
                )
            else:
                ends = [x for x in verts if self.core_deg[x] <= 1]
                if len(ends) != 2 or any(
                    not self.spokes.get(x) for x in ends
                ):
                    unsealed += 1
                    continue
                path = self._walk(ends[0], set(verts))
                one = sorted(self.spokes[path[0]], key=rank)
                two = sorted(self.spokes[path[-1]], key=rank)
                pair = next(
                    ((a, b) for a in one for b in two
                     if a != b and uf.find(a) != uf.find(b)),
                    None,
                )
            if pair is None:
                unsealed += 1
                continue
            k1, k2 = pair
            uf.union(k1, k2)
            forced.setdefault(k1, []).append(k2)
            forced.setdefault(k2, []).append(k1)
            frag_path[(k1, k2)] = path
            frag_path[(k2, k1)] = path[::-1]
        return forced, frag_path, unsealed

    def _expand(self, quotient, frag_path):
        cycle = []
        size = len(quotient)
        for i, k in enumerate(quotient):
            cycle.append(k)
            step = frag_path.get((k, quotient[(i + 1) % size]))
            if step is not None:
                cycle.extend(step)
        return cycle

    def finish(self):
        if self.done:
            return
        self.stage = 2
        self.counters["fragments"] = self.off_frags
        self.counters["kernel_edges"] = self.kernel_edges
        self.counters["spokes"] = self.spoke_count
        forced, frag_path, unsealed = self._collect_fragments()
        if unsealed:
            self.counters["unsealed"] = unsealed
            self.fail("unsealed-fragment")
            return
        kadj = [
            {y for y in self.graph.adj[x] if y < self.m}
            for x in range(self.m)
        ]
        quotient = hamilton_cycle_forced(kadj, self.m, forced)
        if quotient is None:
            self.fail("kernel-not-hamiltonian")
            return
        cycle = self._expand(quotient, frag_path)
        if validate_cycle(self.graph.adj, cycle, universe=range(self.n)):
            self.succeed({"kind": "hamilton_cycle", "cycle": cycle})
        else:
            self.fail("cycle-invalid")


# -- Theorem D(2): perfect matchings ----------------------------------


def _auto_v0_target(n, b, expand_deg=8):
    """Largest even uncovered-set size whose matching cost plus inner
    degree expansion still fits the budget with a little slack.

    Expansion costs roughly expand_deg / 2 purchases per vertex plus a
    booster reserve."""
    per_vertex = expand_deg / 2 + 0.55
    best = 2
    for v0 in range(2, n // 2, 2):
        if (n - v0) / 2 + per_vertex * v0 + 10 > 0.98 * b:
            break
        best = v0
    return best


class PerfectMatchingStrategy(BuilderStrategy):
    """Greedy matching, then nearest-neighbour emulation plus boosters
    on the uncovered set until it carries a Hamilton cycle; the output
    matching is the greedy matching plus alternate cycle edges.

    The uncovered-set size is budget-driven by default: the bigger the
    set, the quadratically more in-set edges arrive, so the best choice
    is the largest one the budget can expand.
    """

    name = "perfect_matching"
    stage_names = ("matching", "expand", "boosters")

    def __init__(self, n, t, b, eps, v0_target=None, expand_deg=5):
        if n % 2:
            raise ValueError("perfect matchings need even n")
        super().__init__(n, t, b)
        self.eps = eps
        self.eps1 = eps / 20
        self.expand_deg = expand_deg
        if v0_target is None:
            v0_target = _auto_v0_target(n, min(b, t), expand_deg)
        self.v0_target = v0_target + (v0_target % 2)
        self.cap0 = min(math.ceil(n / self.eps1**2), t)
        self.uncovered = n
        self.v0 = None
        self.induced_deg = None
        self.ps = None
        self.matching = []

    def params(self):
        return {"eps": self.eps, "v0_target": self.v0_target}

    def _enter_expand(self):
        deg = self.graph.degree
        self.v0 = {v for v in range(self.n) if deg[v] == 0}
        assert len(self.v0) % 2 == 0, "matching covers an even count"
        self.counters["v0_size"] = len(self.v0)
        self.matching = list(self.graph.edges())
        self.induced_deg = {v: 0 for v in self.v0}
        self.stage = 1
        if not self.v0:
            self.succeed({"kind": "perfect_matching", "edges": self.matching})

    def decide(self, u, v):
        if self.stage == 0:
            if self.uncovered <= self.v0_target or self.ledger.observed > self.cap0:
                self._enter_expand()
                if self.done:
                    return False
            else:
                deg = self.graph.degree
                return deg[u] == 0 and deg[v] == 0
        if u not in self.v0 or v not in self.v0:
            return False
        if len(self.v0) == 2:
            return True
        if self.induced_deg[u] < self.expand_deg or self.induced_deg[v] < self.expand_deg:
            return True
        if self.ps is None:
            self.stage = 2
            self.ps = PathSystem(self.graph.adj, self.v0)
            self.ps.seed_greedy()
        return self.ps.is_operational_booster(u, v)

    def after_purchase(self, u, v):
        if self.stage == 0:
            self.uncovered -= 2
            return
        self.induced_deg[u] += 1
        self.induced_deg[v] += 1
        if len(self.v0) == 2:
            self.matching.append((min(u, v), max(u, v)))
            self.succeed({"kind": "perfect_matching", "edges": self.matching})
            return
        if self.ps is None:
            self.stage = 2
            self.ps = PathSystem(self.graph.adj, self.v0)
            self.ps.seed_greedy()
        else:
            self.ps.absorb_edge(u, v)
        if self.ps.done:
            cyc = self.ps.cycle
            for i in range(0, len(cyc), 2):
                a, b = cyc[i], cyc[i + 1]
                self.matching.append((min(a, b), max(a, b)))
            self.succeed({"kind": "perfect_matching", "edges": self.matching})

    def finish(self):
        if self.done:
            return
        if self.ps is not None:
            self.counters["v0_path_len"] = len(self.ps.path)
            if self.ps.spanning():
                # last resort: search endpoint pairs of the spanning path
                found = endpoint_pair_search(self.graph.adj, self.ps.path)
                if found is not None:
                    for i in range(0, len(found), 2):
                        a, b = found[i], found[i + 1]
                        self.matching.append((min(a, b), max(a, b)))
                    self.succeed({"kind": "perfect_matching", "edges": self.matching})
                    return
        self.fail("v0-not-hamiltonian")


# -- Theorem E: fixed trees -------------------------------------------


def _tree_canon(verts, edges):
    """Canonical form of an unrooted tree (center-rooted AHU string)."""
    if len(verts) == 1:
        return "()"
    adj = {v: [] for v in verts}
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    deg = {v: len(adj[v]) for v in verts}
    alive = set(verts)
    layer = [v for v in verts if deg[v] <= 1]
    count = len(verts)
    while count > 2:
        nxt = []
        for v in layer:
            alive.discard(v)
            for w in adj[v]:
                if w in alive:
                    deg[w] -= 1
                    if deg[w] == 1:
                        nxt.append(w)
        count -= len(layer)
        layer = nxt

    def rooted(v, par):
        subs = sorted(rooted(w, v) for w in adj[v] if w != par)
        return "(" + "".join(subs) + ")"

    return min(rooted(c, None) for c in alive)


def _eligible_hosts(verts, edges, target_canon):
    """Vertices of a partial copy where a fresh leaf yields the next
    tree in the chain (-1 is the probe label)."""
    out = []
    verts = list(verts)
    edges = list(edges)
    for h in verts:
        if _tree_canon(verts + [-1], edges + [(h, -1)]) == target_canon:
            out.append(h)
    return out


def leaf_removal_chain(tree_edges):
    """Fix the chain T_1 < T_2 < ... < T_k by repeatedly deleting the
    largest-labeled leaf.  Returns (order, canons) where order[:i] spans
    T_i and canons[i] is its canonical form."""
    verts = sorted({v for e in tree_edges for v in e})
    k = len(verts)
    if verts != list(range(k)) or len(tree_edges) != k - 1:
        raise ValueError("target must be a tree labeled 0..k-1")
    adj = {v: set() for v in verts}
    for a, b in tree_edges:
        adj[a].add(b)
        adj[b].add(a)
    deg = {v: len(adj[v]) for v in verts}
    alive = set(verts)
    removal = []
    while len(alive) > 1:
        leaves = [v for v in alive if deg[v] <= 1]
        if not leaves:
            raise ValueError("target must be a tree (cycle detected)")
        leaf = max(leaves)
        alive.remove(leaf)
        removal.append(leaf)
        for w in adj[leaf]:
            if w in alive:
                deg[w] -= 1
    order = [alive.pop()] + removal[::-1]
    canons = {}
    for i in range(1, k + 1):
        sub = set(order[:i])
        es = [e for e in tree_edges if e[0] in sub and e[1] in sub]
        canons[i] = _tree_canon(order[:i], es)
    return order, canons


def _tree_quota_plan(n, t, b, k, attach_counts, mode):
    """Per-stage copy quotas, seed count and a predicted completion mean.

    prescribed mode follows the geometric schedule
    s_i = (b/(k-1)) * (t/((k-1)n))^(i-2); adaptive mode spends nearly the
    whole budget on the first extension stage and shrinks geometrically
    by the measured per-stage extension probability.
    """
    cap = t // (k - 1)
    pairs = n * (n - 1) / 2
    p = {}
    for i in range(2, k + 1):
        rate = attach_counts[i] * 0.9 * n / pairs
        p[i] = 1.0 - math.exp(-rate * cap)
    if mode == "prescribed":
        base = b / (k - 1)
        ratio = t / ((k - 1) * n)
        quotas = {
            i: max(1, math.ceil(base * ratio ** (i - 2))) for i in range(2, k + 1)
        }
        seeds = min(max(1, math.ceil(b * n / t)), n // 3)
        return quotas, seeds, None
    u = {2: 1.0}
    for i in range(3, k):
        u[i] = u[i - 1] * 0.65 * p[i]
    scale = max(b - 1, 1) / sum(u.values())
    quotas = {i: max(1, math.floor(u[i] * scale)) for i in u}
    quotas[k] = 1
    seeds = min(math.ceil(1.4 * quotas[2] / max(p[2], 1e-12)), n // 3)
    if seeds == n // 3:
        quotas[2] = max(1, min(quotas[2], math.floor(0.7 * seeds * p[2])))
    last = quotas[k - 1] if k >= 3 else seeds
    expected_final = last * p[k]
    return quotas, seeds, expected_final


class TreeStrategy(BuilderStrategy):
    """Build one copy of a fixed tree by staged disjoint partial copies.

    With t >= 5n a single copy is extended leaf by leaf on a budget of
    k-1.  Otherwise each stage extends stored copies of the chain tree
    T_{i-1} to T_i until a quota of copies is met, all copies pairwise
    vertex-disjoint.  In adaptive mode the strategy refuses to run when
    the predicted completion mean falls below `gate` (its success
    probability would be negligible and the budget is better unspent).
    """

    name = "tree"

    def __init__(self, n, t, b, tree, mode="adaptive", gate=0.5):
        super().__init__(n, t, b)
        tree = [tuple(sorted(e)) for e in tree]
        order, canons = leaf_removal_chain(tree)
        self.k = len(order)
        if self.k < 3:
            raise ValueError("tree targets need at least 3 vertices")
        self.tree = tree
        self.canons = canons
        self.stage_names = tuple(f"grow-{i}" for i in range(2, self.k + 1))
        attach_counts = {}
        for i in range(2, self.k + 1):
            sub = set(order[: i - 1])
            es = [e for e in tree if e[0] in sub and e[1] in sub]
            attach_counts[i] = len(_eligible_hosts(order[: i - 1], es, canons[i]))
        self.cap = t // (self.k - 1)
        if t >= 5 * n:
            self.mode = "sequential"
            self.strict = True
            self.quotas = {i: 1 for i in range(2, self.k + 1)}
            seeds = 1
            expected = None
        else:
            self.mode = mode
            self.strict = mode == "prescribed"
            self.quotas, seeds, expected = _tree_quota_plan(
                n, t, b, self.k, attach_counts, mode
            )
        self.counters["mode"] = self.mode
        self.counters["quotas"] = [self.quotas[i] for i in range(2, self.k + 1)]
        self.counters["seeds"] = seeds
        if expected is not None:
            self.counters["expected_final"] = round(expected, 3)
        self.bstage = 2  # size of the copies being built
        self.stage_start = 0
        self.used = set(range(seeds))
        self.cur = [((v,), ()) for v in range(seeds)]
        self.next_copies = []
        self.attach = {v: i for i, (verts, _) in enumerate(self.cur) for v in verts}
        self.copy_hosts = [[v] for (v,), _ in self.cur]
        if expected is not None and expected < gate:
            self.fail("plan-below-gate")

    def params(self):
        return {"tree": [list(e) for e in self.tree], "mode": self.mode}

    def _stage_cap(self):
        if self.bstage == self.k and not self.strict:
            return self.t  # final stage may use all remaining time
        return self.cap

    def _sync(self):
        while not self.done:
            quota = self.quotas[self.bstage]
            if self.bstage < self.k and len(self.next_copies) >= quota:
                self._advance()
                continue
            if self.ledger.observed - self.stage_start > self._stage_cap():
                got = len(self.next_copies)
                if self.bstage == self.k or got == 0 or (self.strict and got < quota):
                    self.fail("quota-unmet")
                else:
                    self._advance()
                    continue
            break

    def _advance(self):
        self.counters.setdefault("copies", []).append(len(self.next_copies))
        self.bstage += 1
        self.stage = self.bstage - 2
        self.stage_start = self.ledger.observed
        self.cur = self.next_copies
        self.next_copies = []
        self.attach = {}
        self.copy_hosts = []
        for idx, (verts, edgs) in enumerate(self.cur):
            hosts = _eligible_hosts(verts, edgs, self.canons[len(verts) + 1])
            for h in hosts:
                self.attach[h] = idx
            self.copy_hosts.append(hosts)

    def decide(self, u, v):
        self._sync()
        if self.done:
            return False
        for x, y in ((u, v), (v, u)):
            ci = self.attach.get(x)
            if ci is not None and y not in self.used:
                self._pending = (ci, x, y)
                return True
        return False

    def after_purchase(self, u, v):
        ci, x, y = self._pending
        self._pending = None
        verts, edgs = self.cur[ci]
        assert y not in self.used, "copies must stay vertex-disjoint"
        self.used.add(y)
        newc = (verts + (y,), edgs + ((x, y),))
        for h in self.copy_hosts[ci]:
            self.attach.pop(h, None)
        self.copy_hosts[ci] = []
        if self.bstage == self.k:
            self.succeed(
                {
                    "kind": "tree_embedding",
                    "vertices": list(newc[0]),
                    "edges": [list(e) for e in newc[1]],
                }
            )
        else:
            self.next_copies.append(newc)

    def finish(self):
        if not self.done:
            self.counters.setdefault("copies", []).append(len(self.next_copies))
            self.fail("time-exhausted")


# -- Theorem F: fixed cycles ------------------------------------------


def _cycle_growth_estimate(n, children, parents):
    """Expected observations to give every parent its children."""
    return 0.5 * n * (children / parents) + 0.5 * n * (math.log(parents + 1) + 2)


def plan_cycle_adaptive(n, t, b, k, odd):
    """Pick (r, d): number of trees and arity, maximizing the expected
    number of trap edges seen after growth, subject to budget and to
    growth fitting comfortably inside t.  Returns None when no positive
    trap count fits the budget."""
    pairs = n * (n - 1) / 2
    best = None
    d = 1
    while d <= 300:
        branch = sum(d**i for i in range(1, k + 1))
        cost = branch if odd else 1 + 2 * branch
        if cost > b - 1:
            break
        r_hi = min((b - 1) // cost, 300, (n // 2) // (cost + 1))
        for r in range(1, r_hi + 1):
            trees = r if odd else 2 * r
            growth = 0.0 if odd else 0.5 * n * (math.log(r + 1) + 1)
            caps = []
            for i in range(1, k + 1):
                g = _cycle_growth_estimate(n, trees * d**i, trees * d ** (i - 1))
                growth += g
                caps.append(math.ceil(3 * g) + n)
            if growth > 0.6 * t:
                continue
            if odd:
                leaves = d**k
                group = d ** (k - 1)
                per_tree = leaves * (leaves - 1) // 2 - d * group * (group - 1) // 2
                traps = r * per_tree
            else:
                traps = r * d ** (2 * k)
            if traps == 0:
                continue
            lam = traps * (t - growth) / pairs
            if best is None or lam > best[0]:
                mate_cap = (
                    None if odd else math.ceil(1.5 * n * (math.log(r + 1) + 2)) + n
                )
                best = (lam, r, d, caps, mate_cap, traps)
        d += 1
    return best


def plan_cycle_prescribed(n, t, b, k, odd):
    """The geometric-parameter schedule: inner time/budget scales, then
    s = n^2/(b't'), d = ceil(s^(1/k)/(k+2)), r = ceil(b/(2s))."""
    lnln = math.log(math.log(n))
    t1 = min(max(t / lnln, 2 * n * math.log(n)), t / 2)
    b1 = max(n ** (k + 2) / t1 ** (k + 1), n / math.sqrt(t1))
    s = n * n / (b1 * t1)
    d = max(1, math.ceil(s ** (1 / k) / (k + 2)))
    r = max(1, math.ceil(b / (2 * s)))
    level_cap = max(1, int(t1 // (k if odd else 2 * k)))
    caps = [level_cap] * k
    mate_cap = None if odd else max(1, int(t1 // 2))
    return {"t_inner": t1, "b_inner": b1, "s": s}, r, d, caps, mate_cap


class CycleStrategy(BuilderStrategy):
    """Build a fixed cycle C_l by growing d-ary trees of depth k and
    waiting for a trap edge between suitable leaves.

    Odd l = 2k+1: a trap joins two leaves of one tree whose root paths
    share only the root.  Even l = 2k+2: each root is first mated to a
    partner by its earliest touching edge; both grow depth-k trees and a
    trap joins leaves across one mated pair.
    """

    name = "cycle"
    stage_names = ("mating", "growing", "trapping")

    def __init__(self, n, t, b, ell, mode="adaptive"):
        super().__init__(n, t, b)
        if ell < 3:
            raise ValueError("cycles need length >= 3")
        self.ell = ell
        self.odd = ell % 2 == 1
        self.k = (ell - 1) // 2 if self.odd else (ell - 2) // 2
        self.mode = mode
        k, odd = self.k, self.odd
        if mode == "adaptive":
            plan = plan_cycle_adaptive(n, t, b, k, odd)
            if plan is None:
                self.r = self.d = 0
                self.fail("budget-too-small")
                return
            lam, self.r, self.d, self.level_caps, self.mate_cap, traps = plan
            self.counters["planned_traps"] = traps
            self.counters["planned_mean_hits"] = round(lam, 2)
        elif mode == "prescribed":
            inner, self.r, self.d, self.level_caps, self.mate_cap = (
                plan_cycle_prescribed(n, t, b, k, odd)
            )
            self.counters.update({key: round(val, 2) for key, val in inner.items()})
        else:
            raise ValueError(f"unknown mode {mode!r}")
        self.counters["r"] = self.r
        self.counters["d"] = self.d
        roots = list(range(self.r))
        self.used = set(roots)
        self.tree_of = {v: v for v in roots}
        self.depth = {v: 0 for v in roots}
        self.side = {v: 0 for v in roots}
        self.anc1 = {}
        self.parent = {}
        self.mate_of = {}
        self.leaves = {}
        self.need = {}
        self.level_start = 0
        self.cur_depth = 0
        self.next_parents = []
        self.remaining = 0
        if odd:
            self.stage = 1
            self._start_level(roots)
        else:
            self.stage = 0
            self.unmated = set(roots)

    def params(self):
        return {"ell": self.ell, "mode": self.mode}

    def _start_level(self, parents):
        self.need = {p: self.d for p in parents}
        self.remaining = self.d * len(parents)
        self.next_parents = []
        self.level_start = self.ledger.observed
        self.level_cap = self.level_caps[self.cur_depth]

    def _is_trap(self, iu, iv):
        # odd: same tree, distinct depth-1 ancestors
        # even: same mated pair, opposite sides
        return iu[0] == iv[0] and iu[1] != iv[1]

    def decide(self, u, v):
        iu = self.leaves.get(u)
        iv = self.leaves.get(v)
        if iu is not None and iv is not None and self._is_trap(iu, iv):
            self._pending = ("T", u, v)
            return True
        if self.stage == 0:
            if self.ledger.observed > self.mate_cap:
                self.fail("mating-unmet")
                return False
            for x, y in ((u, v), (v, u)):
                if x in self.unmated and y not in self.used:
                    self._pending = ("M", x, y)
                    return True
            return False
        if self.stage == 1:
            if self.ledger.observed - self.level_start > self.level_cap:
                self.fail("level-quota-unmet")
                return False
            for x, y in ((u, v), (v, u)):
                if self.need.get(x, 0) > 0 and y not in self.used:
                    self._pending = ("G", x, y)
                    return True
        return False

    def after_purchase(self, u, v):
        tag = self._pending
        self._pending = None
        kind = tag[0]
        if kind == "M":
            _, x, y = tag
            assert y not in self.used, "copies must stay vertex-disjoint"
            self.used.add(y)
            self.tree_of[y] = self.tree_of[x]
            self.depth[y] = 0
            self.side[y] = 1
            self.mate_of[x] = y
            self.unmated.discard(x)
            if not self.unmated:
                self.stage = 1
                self._start_level(sorted(self.tree_of))
            return
        if kind == "G":
            _, x, y = tag
            assert y not in self.used, "copies must stay vertex-disjoint"
            self.used.add(y)
            self.parent[y] = x
            dep = self.depth[x] + 1
            self.depth[y] = dep
            self.tree_of[y] = self.tree_of[x]
            self.side[y] = self.side[x]
            self.anc1[y] = y if dep == 1 else self.anc1[x]
            self.need[x] -= 1
            self.remaining -= 1
            if dep == self.k:
                key = self.anc1[y] if self.odd else self.side[y]
                self.leaves[y] = (self.tree_of[y], key)
            else:
                self.next_parents.append(y)
            if self.remaining == 0:
                self.cur_depth += 1
                if self.cur_depth == self.k:
                    self.stage = 2
                    self.counters["leaves"] = len(self.leaves)
                else:
                    self._start_level(self.next_parents)
            return
        _, u, v = tag
        self._close(u, v)

    def _path_to_root(self, x):
        path = [x]
        while path[-1] in self.parent:
            path.append(self.parent[path[-1]])
        return path

    def _close(self, u, v):
        pu = self._path_to_root(u)
        pv = self._path_to_root(v)
        if self.odd:
            cycle = pu + pv[:-1][::-1]  # shared root appears once
        else:
            cycle = pu + pv[::-1]  # mate edge joins the two roots
        ok = len(cycle) == self.ell and validate_cycle(self.graph.adj, cycle)
        if ok:
            self.counters["traps_hit_at"] = self.ledger.observed
            self.succeed({"kind": "cycle", "ell": self.ell, "cycle": cycle})
        else:
            self.fail("witness-invalid")

    def finish(self):
        if not self.done:
            self.counters["leaves"] = len(self.leaves)
            self.fail("no-trap-hit" if self.stage == 2 else "time-exhausted")


# -- registry ----------------------------------------------------------


def tree_from_label(label):
    """Parse "path:4" or "star:5" into an edge list on 0..k-1."""
    kind, _, num = label.partition(":")
    k = int(num)
    if k < 3:
        raise ValueError("tree targets need at least 3 vertices")
    if kind == "path":
        return [(i, i + 1) for i in range(k - 1)]
    if kind == "star":
        return [(0, i) for i in range(1, k)]
    raise ValueError(f"unknown tree label {label!r}")


def make_strategy(name, n, t, b, params=None):
    """Instantiate a strategy by name with a plain parameter mapping."""
    params = dict(params or {})
    if name == "connectivity":
        return ConnectivityStrategy(n, t, b, **params)
    if name == "nn_emulation":
        return NNEmulationStrategy(n, t, b, k=int(params.pop("k")), **params)
    if name == "two_stage_mindeg":
        return TwoStageMinDegStrategy(
            n, t, b, k=int(params.pop("k")), eps=float(params.pop("eps")), **params
        )
    if name == "ham_optimal_time":
        return HamOptimalTimeStrategy(n, t, b, eps=float(params.pop("eps")), **params)
    if name == "ham_optimal_budget":
        kw = {key: float(params.pop(key)) for key in ("eps", "sigma", "eta") if key in params}
        return HamOptimalBudgetStrategy(n, t, b, **kw, **params)
    if name == "perfect_matching":
        kw = {"eps": float(params.pop("eps"))}
        if "v0_target" in params:
            kw["v0_target"] = int(params.pop("v0_target"))
        return PerfectMatchingStrategy(n, t, b, **kw, **params)
    if name == "tree":
        target = params.pop("tree")
        if isinstance(target, str):
            target = tree_from_label(target)
        return TreeStrategy(n, t, b, tree=target, **params)
    if name == "cycle":
        return CycleStrategy(n, t, b, ell=int(params.pop("ell")), **params)
    raise ValueError(f"unknown strategy {name!r}")


STRATEGY_NAMES = (
    "connectivity",
    "nn_emulation",
    "two_stage_mindeg",
    "ham_optimal_time",
    "ham_optimal_budget",
    "perfect_matching",
    "tree",
    "cycle",
)
