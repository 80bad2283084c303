"""Bounded-hop shortest-path pipeline run on the CONGEST engine.

The pipeline, per skeleton set S:

1. multi-source bounded-hop distances from S (weight-rounded relaxation
   at geometric scale levels, superposed copies with random delays),
2. the complete overlay on S weighted by those distances,
3. the k-shortcut overlay (exact overlay distances to each node's k
   nearest overlay neighbors),
4. bounded-hop distances on the shortcut overlay from a chosen source,
5. node-local combination into approximate distances / eccentricities.

Steps 1 runs as real per-node programs under the bandwidth limit; steps
2-4 are overlay computations whose round costs are charged to the ledger
by their communication schedules (global broadcasts) without simulating
each individual message.

All approximate distances are exact rationals (`fractions.Fraction`) so
the sandwich bounds can be asserted with zero tolerance.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction

from .engine import NodeProgram
from .graphs import INFINITE


class CongestionFailure(RuntimeError):
    """Too many superposed copies wanted the same channel in one round."""


class MissingTableError(LookupError):
    pass


def default_eps(n):
    """Approximation slack max(1/ceil(log2 n), 1/16), rational for exact arithmetic.

    The 1/16 floor keeps the level count meaningful below n = 2^16.
    """
    return Fraction(1, min(16, max(1, math.ceil(math.log2(max(2, n))))))


def hop_budget(hops, eps):
    """Distance budget of one bounded-distance pass: floor((1 + 2/eps) * hops)."""
    return math.floor((1 + 2 / eps) * Fraction(hops))


def scale_levels(n, max_weight, eps):
    """Largest level index: smallest i with 2^i >= 2*n*W/eps."""
    target = 2 * n * Fraction(max_weight) / eps
    i = 0
    while 2 ** i < target:
        i += 1
    return i


def rounded_weight(w, hops, eps, level):
    """Level-`level` rounded weight ceil(2*hops*w / (eps * 2^level)); always >= 1."""
    if isinstance(w, int) and isinstance(hops, int):
        num = 2 * hops * w * eps.denominator
        den = eps.numerator * 2 ** level
        return max(1, -(-num // den))
    return max(1, math.ceil(2 * Fraction(hops) * Fraction(w) / (eps * 2 ** level)))


def _distance_bits(n, value):
    return max(1, (n - 1).bit_length()) + max(1, int(value).bit_length())


class BoundedDistanceProgram(NodeProgram):
    """One node of the distance-bounded relaxation pass.

    A node broadcasts (id, d) exactly in the round where its distance d
    equals the local round index; the pass takes budget+1 rounds total.
    """

    def __init__(self, node, source, budget, weights, n):
        self.node = node
        self.budget = budget
        self.weights = weights  # neighbor -> rounded weight
        self.n = n
        self.dist = 0 if node == source else INFINITE
        self.halted = True  # driven purely by messages/wakes within the budget

    def on_round(self, ctx):
        t0 = ctx.round - ctx.local_round
        for u, d_u in ctx.inbox:
            nd = d_u + self.weights[u]
            if nd <= self.budget and nd < self.dist:
                self.dist = nd
                if nd > ctx.local_round:
                    ctx.wake_at(t0 + nd)
        if self.dist == ctx.local_round:
            ctx.broadcast(self.dist, bits=_distance_bits(self.n, self.dist))


def bounded_distance_sssp(network, s, budget, weights=None, phase="bounded-distance"):
    """Each node learns its distance from s if it is <= budget, else INFINITE.

    Consumes exactly budget+1 engine rounds.  `weights` optionally maps
    canonical edge pairs to rounded weights (defaults to graph weights).
    """
    g = network.graph
    if budget < 0:
        raise ValueError(f"budget must be >= 0: {budget}")

    def edge_w(u, v, w):
        if weights is None:
            return w
        return weights[(min(u, v), max(u, v))]

    programs = {}
    for v in range(g.n):
        programs[v] = BoundedDistanceProgram(
            v, s, budget, {u: edge_w(v, u, w) for u, w in g.adj[v]}, g.n)
    with network.phase(phase):
        network.run(programs, exact_rounds=budget + 1)
    return [programs[v].dist for v in range(g.n)]


def bounded_hop_sssp(network, s, hops, eps, phase="bounded-hop-sssp"):
    """Approximate `hops`-bounded distances from s, via all scale levels.

    Returns a per-node list of Fractions (INFINITE where no level stayed
    within budget).  Guarantee: d <= result <= (1+eps) * d_hops.
    """
    g = network.graph
    if hops <= 0:
        raise ValueError(f"hop bound must be > 0: {hops}")
    if not (0 < eps <= 1):
        raise ValueError(f"need 0 < eps <= 1: {eps}")
    budget = hop_budget(hops, eps)
    top = scale_levels(g.n, g.max_weight, eps)
    best = [INFINITE] * g.n
    for level in range(top + 1):
        weights = {(u, v): rounded_weight(w, hops, eps, level)
                   for u, v, w in g.edges}
        dist = bounded_distance_sssp(network, s, budget, weights=weights,
                                     phase=phase)
        scale = eps * 2 ** level / (2 * Fraction(hops))
        for v in range(g.n):
            if dist[v] is not INFINITE and dist[v] <= budget:
                cand = dist[v] * scale
                if best[v] is INFINITE or cand < best[v]:
                    best[v] = cand
    return best


class _SuperposedProgram(NodeProgram):
    """Delayed superposition of per-source bounded-hop passes.

    Logical rounds are stretched into windows of `stretch` engine rounds;
    a node may owe at most `stretch` broadcasts per window, else the run
    fails with CongestionFailure.  Copy and level of a message are
    inferred from its arrival window and the (globally known) delays.
    """

    def __init__(self, node, sources, delays, budget, levels, weights_by_level,
                 stretch, n):
        self.node = node
        self.sources = sources
        self.delays = delays
        self.budget = budget
        self.levels = levels
        self.weights_by_level = weights_by_level  # level -> {neighbor: w}
        self.stretch = stretch
        self.n = n
        self.span = budget + 1  # windows per level
        self.dist = [[INFINITE] * levels for _ in sources]
        self.due = {}     # window -> list of (copy, level, dist when queued)
        self.outbox = []  # payloads still to send in the current window
        self.halted = True

    def _window_of(self, copy, level, d):
        return self.delays[copy] + level * self.span + d

    def _queue(self, ctx, copy, level, d, t0):
        window = self._window_of(copy, level, d)
        self.due.setdefault(window, []).append((copy, level, d))
        wake = t0 + window * self.stretch
        if wake > ctx.round:
            ctx.wake_at(wake)
        # wake == current round: the end-of-round flush picks it up

    def _flush(self, ctx, t0):
        window = ctx.local_round // self.stretch
        entries = self.due.pop(window, None)
        if entries:
            for copy, level, d in entries:
                if self.dist[copy][level] == d:  # stale if improved since
                    self.outbox.append((copy, d))
            if len(self.outbox) > self.stretch:
                raise CongestionFailure(
                    f"node {self.node}: {len(self.outbox)} broadcasts due in "
                    f"window {window} (limit {self.stretch})")
        if self.outbox:
            copy, d = self.outbox.pop(0)
            # the arrival window plus the public delays determine (level, d),
            # so only the copy index needs to cross the channel
            ctx.broadcast((copy, d), bits=max(1, copy.bit_length()))
            if self.outbox:
                ctx.wake_at(ctx.round + 1)

    def on_round(self, ctx):
        t0 = ctx.round - ctx.local_round
        if ctx.local_round == 0:
            for copy, s in enumerate(self.sources):
                if s == self.node:
                    for level in range(self.levels):
                        self.dist[copy][level] = 0
                        self._queue(ctx, copy, level, 0, t0)
        for u, (copy, d_u) in ctx.inbox:
            sent_window = (ctx.local_round - 1) // self.stretch
            level = (sent_window - self.delays[copy]) // self.span
            nd = d_u + self.weights_by_level[level][u]
            if nd <= self.budget and nd < self.dist[copy][level]:
                self.dist[copy][level] = nd
                self._queue(ctx, copy, level, nd, t0)
        self._flush(ctx, t0)


def bounded_hop_mssp(network, sources, hops, eps, retries=3, phase="mssp"):
    """Approximate hop-bounded distances from every s in `sources` at once.

    Superposes one delayed bounded-hop pass per source; on congestion the
    run is retried with fresh delays (up to `retries` times).  Returns
    {s: per-node list of Fractions}.
    """
    g = network.graph
    sources = sorted(set(sources))
    if not sources:
        raise ValueError("sources must be nonempty")
    b = len(sources)
    budget = hop_budget(hops, eps)
    top = scale_levels(g.n, g.max_weight, eps)
    levels = top + 1
    # per-window allowance ceil(log2 n), floored at 2: a copy owes at most
    # one broadcast per window, so two copies must never be able to jam
    stretch = max(2, math.ceil(math.log2(max(2, g.n))))
    network._require_tree()

    cache_key = (hops, eps, levels)
    per_node_weights = getattr(network, "_mssp_weight_cache", {}).get(cache_key)
    if per_node_weights is None:
        weights_level_edge = [
            {(u, v): rounded_weight(w, hops, eps, level) for u, v, w in g.edges}
            for level in range(levels)
        ]
        per_node_weights = [
            [{u: weights_level_edge[level][(min(v, u), max(v, u))]
              for u, _ in g.adj[v]} for level in range(levels)]
            for v in range(g.n)
        ]
        if not hasattr(network, "_mssp_weight_cache"):
            network._mssp_weight_cache = {}
        network._mssp_weight_cache[cache_key] = per_node_weights

    last_failure = None
    for _attempt in range(retries + 1):
        delays = [network.rng_for(network.leader).randint(0, b * stretch)
                  for _ in range(b)]
        network.broadcast_pipeline(
            [(i, delays[i]) for i in range(b)], phase=phase + "-delays")
        windows = levels * (budget + 1) + b * stretch + 1
        programs = {
            v: _SuperposedProgram(v, sources, delays, budget, levels,
                                  per_node_weights[v], stretch, g.n)
            for v in range(g.n)
        }
        start = network.round_clock
        try:
            with network.phase(phase):
                network.run(programs, exact_rounds=windows * stretch)
        except CongestionFailure as failure:
            last_failure = failure
            network.clear_traffic()
            network.ledger.add_rounds(network.round_clock - start)
            continue
        tables = {}
        for copy, s in enumerate(sources):
            scales = [eps * 2 ** level / (2 * Fraction(hops))
                      for level in range(levels)]
            table = []
            for v in range(g.n):
                vals = [programs[v].dist[copy][level] * scales[level]
                        for level in range(levels)
                        if programs[v].dist[copy][level] is not INFINITE]
                table.append(min(vals) if vals else INFINITE)
            tables[s] = table
        return tables
    raise last_failure


# --- overlay stages ------------------------------------------------------


@dataclass
class SkeletonState:
    """Per-index state of the skeleton pipeline."""

    index: int
    members: list                     # sorted skeleton node ids
    hops: object                      # hop bound used for the base tables
    eps: Fraction
    k: int = 0
    hop_tables: dict = field(default_factory=dict)   # s -> per-node list
    knear: dict = field(default_factory=dict)        # s -> list of overlay ids
    shortcut: dict = field(default_factory=dict)     # (u,v) -> weight
    overlay_tables: dict = field(default_factory=dict)  # s -> {u: value}

    def overlay_weight(self, u, v):
        """Base overlay weight: the approximate bounded-hop distance u-v."""
        key = (min(u, v), max(u, v))
        if key in self.shortcut:
            return self.shortcut[key]
        return self.hop_tables[u][v]

    def base_weight(self, u, v):
        return self.hop_tables[u][v]


def build_skeleton_state(network, index, members, hops, eps, phase="mssp"):
    members = sorted(members)
    state = SkeletonState(index=index, members=members, hops=hops, eps=eps)
    if members:
        state.hop_tables = bounded_hop_mssp(network, members, hops, eps,
                                            phase=phase)
    return state


def _dijkstra_on(weights_adj, source, nodes):
    dist = {v: INFINITE for v in nodes}
    dist[source] = 0
    heap = [(0, source)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in weights_adj.get(u, []):
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def embed_overlay(network, state, k, phase="embed"):
    """Populate the k-shortcut overlay: each skeleton node's k nearest
    overlay neighbors get exact overlay distances as direct edges.

    Every skeleton node announces its k cheapest incident overlay edges;
    shortest paths to a node's k nearest targets only use announced
    edges, so the exact distances are computable locally.  Charged
    rounds: D_G + |S|*k.
    """
    members = state.members
    state.k = k
    state.knear = {}
    state.shortcut = {}
    if len(members) < 2 or k <= 0:
        network.charge_rounds(network.unweighted_diameter(), phase=phase)
        return state

    announced = {}
    for s in members:
        incident = sorted(
            (state.base_weight(s, v), v) for v in members
            if v != s and state.base_weight(s, v) is not INFINITE)
        for w, v in incident[:k]:
            key = (min(s, v), max(s, v))
            if key not in announced or w < announced[key]:
                announced[key] = w

    adj = {s: [] for s in members}
    for (u, v), w in announced.items():
        adj[u].append((v, w))
        adj[v].append((u, w))

    for s in members:
        dist = _dijkstra_on(adj, s, members)
        ranked = sorted((dist[v], v) for v in members
                        if v != s and dist[v] is not INFINITE)
        nearest = ranked[:k]
        state.knear[s] = [v for _, v in nearest]
        for d, v in nearest:
            key = (min(s, v), max(s, v))
            if key not in state.shortcut or d < state.shortcut[key]:
                state.shortcut[key] = d

    network.charge_rounds(network.unweighted_diameter() + len(members) * k,
                          phase=phase)
    return state


def sssp_on_overlay(network, state, s, phase="overlay-sssp"):
    """Bounded-hop distances from s on the shortcut overlay; every node
    learns the whole table (each overlay round is a global broadcast).

    Hop bound 4|S|/k (the shortcut overlay's hop diameter is below that).
    Returns {u: value} and stores it in state.overlay_tables[s].
    """
    members = state.members
    if s not in members:
        raise ValueError(f"source {s} not in skeleton {members}")
    if len(members) == 1:
        state.overlay_tables[s] = {s: 0}
        return state.overlay_tables[s]

    eps = state.eps
    k = state.k
    hop_bound = Fraction(4 * len(members), k) if k >= 1 else Fraction(len(members))
    budget = hop_budget(hop_bound, eps)
    finite_weights = [w for w in
                      (state.overlay_weight(u, v)
                       for i, u in enumerate(members) for v in members[i + 1:])
                      if w is not INFINITE]
    max_w = max(finite_weights, default=1)
    top = scale_levels(len(members), max_w, eps)

    d_g = network.unweighted_diameter()
    charged = 0
    best = {u: INFINITE for u in members}
    for level in range(top + 1):
        adj = {u: [] for u in members}
        for i, u in enumerate(members):
            for v in members[i + 1:]:
                w = state.overlay_weight(u, v)
                if w is INFINITE:
                    continue
                rw = rounded_weight(w, hop_bound, eps, level)
                adj[u].append((v, rw))
                adj[v].append((u, rw))
        dist = _dijkstra_on(adj, s, members)
        scale = eps * 2 ** level / (2 * hop_bound)
        for u in members:
            if dist[u] is not INFINITE and dist[u] <= budget:
                cand = dist[u] * scale
                if best[u] is INFINITE or cand < best[u]:
                    best[u] = cand
        # per overlay round: count senders (D_G), broadcast (D_G + a); a is
        # charged at its bound |S| so every probe costs the same (lockstep)
        charged += (budget + 1) * (2 * d_g + 1 + len(members))

    network.charge_rounds(charged, phase=phase)
    state.overlay_tables[s] = best
    return best


def approx_distance(state, s, v):
    """min over skeleton u of (overlay distance s->u) + (hop table u->v).

    Node-local: both summands already live in v's memory.
    """
    if s not in state.overlay_tables:
        raise MissingTableError(f"no overlay table for source {s}")
    overlay = state.overlay_tables[s]
    best = INFINITE
    for u in state.members:
        a = overlay.get(u, INFINITE)
        b = state.hop_tables[u][v] if u in state.hop_tables else INFINITE
        if a is INFINITE or b is INFINITE:
            continue
        cand = a + b
        if best is INFINITE or cand < best:
            best = cand
    return best


def approx_eccentricity(state, s, node_count=None):
    """Max of the approximate distance from s over all physical nodes."""
    if not state.hop_tables:
        raise MissingTableError("hop tables absent")
    n = node_count if node_count is not None else len(
        next(iter(state.hop_tables.values())))
    if len(state.members) == 1:
        table = state.hop_tables[s]
        return max(table)
    return max(approx_distance(state, s, v) for v in range(n))
