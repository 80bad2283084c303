"""Exact weighted-graph primitives: the ground truth everything else is tested against.

Graphs are undirected, connected, with positive integer weights.  Overlay
graphs built by the approximation pipeline may carry positive rational
weights (``fractions.Fraction``); all routines here accept those too.
Unreachable / over-budget distances are the saturating sentinel
``INFINITE`` (``math.inf``).
"""

from __future__ import annotations

import heapq
import json
import math
import random
from fractions import Fraction

INFINITE = math.inf


class GraphError(ValueError):
    pass


class DisconnectedGraphError(GraphError):
    def __init__(self, components):
        self.components = components
        preview = ", ".join(str(sorted(c)) for c in components[:4])
        super().__init__(
            f"graph is disconnected ({len(components)} components): {preview}"
        )


def _check_weight(w):
    if isinstance(w, bool) or not isinstance(w, (int, Fraction)):
        raise GraphError(f"edge weight must be a positive int (or Fraction): {w!r}")
    if w < 1:
        raise GraphError(f"edge weight must be >= 1: {w!r}")


class WeightedGraph:
    """Undirected connected graph with node ids 0..n-1 and weights >= 1."""

    def __init__(self, node_count, edges, check_connected=True):
        if node_count < 1:
            raise GraphError(f"node_count must be >= 1: {node_count}")
        self.n = node_count
        self.adj = [[] for _ in range(node_count)]
        self.edges = []
        seen = set()
        for u, v, w in edges:
            if not (0 <= u < node_count and 0 <= v < node_count):
                raise GraphError(f"edge ({u},{v}) out of range for n={node_count}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            _check_weight(w)
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"duplicate edge {key}")
            seen.add(key)
            self.edges.append((key[0], key[1], w))
            self.adj[u].append((v, w))
            self.adj[v].append((u, w))
        if check_connected:
            comps = self.components()
            if len(comps) > 1:
                raise DisconnectedGraphError(comps)

    @property
    def max_weight(self):
        return max((w for _, _, w in self.edges), default=1)

    def components(self):
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            comp, stack = [], [s]
            seen[s] = True
            while stack:
                u = stack.pop()
                comp.append(u)
                for v, _ in self.adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(comp)
        return comps

    def weight(self, u, v):
        for x, w in self.adj[u]:
            if x == v:
                return w
        raise GraphError(f"no edge between {u} and {v}")

    def unit_weights(self):
        """Same topology, every weight 1 (the communication graph's metric)."""
        return WeightedGraph(self.n, [(u, v, 1) for u, v, _ in self.edges],
                             check_connected=False)

    # --- serialization ---------------------------------------------------

    def to_text(self):
        lines = [f"{self.n} {len(self.edges)}"]
        for u, v, w in sorted(self.edges):
            lines.append(f"{u} {v} {w}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        tokens = text.split()
        if len(tokens) < 2:
            raise GraphError("graph text must start with 'n m'")
        n, m = int(tokens[0]), int(tokens[1])
        body = tokens[2:]
        if len(body) != 3 * m:
            raise GraphError(f"expected {3 * m} edge tokens, got {len(body)}")
        edges = [(int(body[3 * i]), int(body[3 * i + 1]), int(body[3 * i + 2]))
                 for i in range(m)]
        return cls(n, edges)

    def to_json_dict(self):
        return {"node_count": self.n,
                "edges": [[u, v, int(w)] for u, v, w in sorted(self.edges)]}

    @classmethod
    def from_json_dict(cls, d):
        return cls(d["node_count"], [tuple(e) for e in d["edges"]])

    @classmethod
    def from_file(cls, path):
        with open(path) as fh:
            text = fh.read()
        stripped = text.lstrip()
        if stripped.startswith("{"):
            return cls.from_json_dict(json.loads(text))
        return cls.from_text(text)


def _check_node(g, s):
    if not (0 <= s < g.n):
        raise GraphError(f"unknown node id {s} (n={g.n})")


def exact_sssp(g, s):
    """Dijkstra from s; returns list of exact distances."""
    _check_node(g, s)
    dist = [INFINITE] * g.n
    dist[s] = 0
    heap = [(0, s)]
    while heap:
        d, u = heapq.heappop(heap)
        if d > dist[u]:
            continue
        for v, w in g.adj[u]:
            nd = d + w
            if nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return dist


def exact_all_pairs(g):
    return [exact_sssp(g, s) for s in range(g.n)]


def exact_bounded_hop(g, s, hops):
    """Least length over paths with at most `hops` edges (Bellman-Ford rounds)."""
    _check_node(g, s)
    if hops < 0:
        raise GraphError(f"hop bound must be >= 0: {hops}")
    dist = [INFINITE] * g.n
    dist[s] = 0
    for _ in range(int(hops)):
        nxt = list(dist)
        changed = False
        for u, v, w in g.edges:
            if dist[u] + w < nxt[v]:
                nxt[v] = dist[u] + w
                changed = True
            if dist[v] + w < nxt[u]:
                nxt[u] = dist[v] + w
                changed = True
        dist = nxt
        if not changed:
            break
    return dist


def eccentricity(g, u):
    return max(exact_sssp(g, u))


def diameter(g):
    return max(eccentricity(g, u) for u in range(g.n))


def radius(g):
    return min(eccentricity(g, u) for u in range(g.n))


def min_hops_on_shortest_paths(g, s):
    """For each v: minimum edge count among shortest s-v paths."""
    _check_node(g, s)
    # lexicographic Dijkstra on (length, hops)
    best = [(INFINITE, INFINITE)] * g.n
    best[s] = (0, 0)
    heap = [(0, 0, s)]
    while heap:
        d, h, u = heapq.heappop(heap)
        if (d, h) > best[u]:
            continue
        for v, w in g.adj[u]:
            cand = (d + w, h + 1)
            if cand < best[v]:
                best[v] = cand
                heapq.heappush(heap, (d + w, h + 1, v))
    return [h for _, h in best]


def hop_diameter(g):
    """Max over pairs of the min edge count among shortest paths."""
    return max(max(min_hops_on_shortest_paths(g, s)) for s in range(g.n))


def contract_unit_edges(g):
    """Contract every weight-1 edge; parallel edges keep the minimum weight.

    Returns (contracted_graph, mapping) where mapping[v] is v's node id in
    the contracted graph.
    """
    parent = list(range(g.n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, w in g.edges:
        if w == 1:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[max(ru, rv)] = min(ru, rv)

    roots = sorted({find(v) for v in range(g.n)})
    new_id = {r: i for i, r in enumerate(roots)}
    mapping = [new_id[find(v)] for v in range(g.n)]

    best = {}
    for u, v, w in g.edges:
        cu, cv = mapping[u], mapping[v]
        if cu == cv:
            continue
        key = (min(cu, cv), max(cu, cv))
        if key not in best or w < best[key]:
            best[key] = w
    contracted = WeightedGraph(len(roots),
                               [(u, v, w) for (u, v), w in best.items()],
                               check_connected=False)
    return contracted, mapping


# --- generators ---------------------------------------------------------


def random_connected_graph(n, max_weight=10, rng=None, extra_edge_prob=0.15):
    """Random spanning tree plus extra edges; weights uniform in [1, max_weight]."""
    rng = rng if rng is not None else random.Random(0)
    if n < 1:
        raise GraphError("n must be >= 1")
    edges = []
    present = set()
    order = list(range(n))
    rng.shuffle(order)
    for i in range(1, n):
        u = order[i]
        v = order[rng.randrange(i)]
        present.add((min(u, v), max(u, v)))
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in present and rng.random() < extra_edge_prob:
                present.add((u, v))
    for u, v in sorted(present):
        edges.append((u, v, rng.randint(1, max_weight)))
    return WeightedGraph(n, edges)


def cycle_graph(n, weight=1):
    if n == 1:
        return WeightedGraph(1, [])
    if n == 2:
        return WeightedGraph(2, [(0, 1, weight)])
    return WeightedGraph(n, [(i, (i + 1) % n, weight) for i in range(n)])


def star_graph(n, weight=1):
    """Node 0 is the center."""
    return WeightedGraph(n, [(0, i, weight) for i in range(1, n)])


def grid_graph(rows, cols, weight=1):
    def nid(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols):
            if c + 1 < cols:
                edges.append((nid(r, c), nid(r, c + 1), weight))
            if r + 1 < rows:
                edges.append((nid(r, c), nid(r + 1, c), weight))
    return WeightedGraph(rows * cols, edges)


def make_graph(kind, n, max_weight=10, rng=None):
    """Named generators used by the CLI."""
    if kind == "random-connected":
        return random_connected_graph(n, max_weight=max_weight, rng=rng)
    if kind == "cycle":
        return cycle_graph(n)
    if kind == "star":
        return star_graph(n)
    if kind == "grid":
        side = max(1, int(math.isqrt(n)))
        return grid_graph(side, (n + side - 1) // side)
    raise GraphError(f"unknown generator {kind!r}")
