"""Lower-bound gadget graphs and their brute-force verifiers.

The construction: a server skeleton (full binary tree of height h plus
m = 2s + l disjoint paths of 2^h nodes) sandwiched between two input
halves.  Alice's half encodes x, Bob's encodes y, via edge weights
alpha/beta between the selector cliques {a_i}/{b_i} and the star columns
a*_j/b*_j.  With alpha = n^2, beta = 2n^2:

  diameter variant:  F(x, y) = 1  =>  D <= max(2a, b) + n
                     F(x, y) = 0  =>  D >= min(a+b, 3a)
  radius variant (extra hub a_0): same gap driven by F'(x, y).

Everything here is verified exactly: Dijkstra on the full graph and on
the weight-1-contracted graph, every tabulated distance bound, and the
round-by-round ownership schedule of the two-party simulation argument.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .graphs import (
    WeightedGraph,
    contract_unit_edges,
    exact_sssp,
)


# --- index helpers -------------------------------------------------------


def bin_bit(i, j):
    """j-th bit (1-based, least significant first) of i-1."""
    return (i - 1 >> j - 1) & 1


def adj_index(i, j):
    """The integer whose (i-1)-expansion differs from i's in the j-th bit."""
    return ((i - 1) ^ (1 << j - 1)) + 1


def ind_index(i, j):
    """Smallest z with bin_bit(i, z) != bin_bit(j, z); requires i != j."""
    if i == j:
        raise ValueError("indices must differ")
    z = 1
    while bin_bit(i, z) == bin_bit(j, z):
        z += 1
    return z


# --- embedded Boolean functions ------------------------------------------


def eval_F(x, y, rows, cols):
    """AND over rows of (OR over cols of x_{i,j} AND y_{i,j})."""
    _check_input(x, rows, cols)
    _check_input(y, rows, cols)
    return int(all(
        any(x[i * cols + j] and y[i * cols + j] for j in range(cols))
        for i in range(rows)))


def eval_F_prime(x, y, rows, cols):
    """OR over all (i, j) of x_{i,j} AND y_{i,j}."""
    _check_input(x, rows, cols)
    _check_input(y, rows, cols)
    return int(any(a and b for a, b in zip(x, y)))


def _check_input(bits, rows, cols):
    if len(bits) != rows * cols:
        raise ValueError(f"input must have {rows * cols} bits, got {len(bits)}")
    if any(b not in (0, 1) for b in bits):
        raise ValueError("input bits must be 0/1")


def ver(x, y):
    """1 iff x + y is 0 or 1 modulo 4, for x, y in {0,1,2,3}."""
    if x not in (0, 1, 2, 3) or y not in (0, 1, 2, 3):
        raise ValueError(f"ver arguments must be in 0..3: {x}, {y}")
    return int((x + y) % 4 in (0, 1))


def gdt(x, y):
    """OR of the four pairwise ANDs, for x, y in {0,1}^4."""
    if len(x) != 4 or len(y) != 4:
        raise ValueError("gdt arguments must be 4-bit")
    return int(any(a and b for a, b in zip(x, y)))


VER_X_PROMISE = [(0, 0, 1, 1), (1, 0, 0, 1), (1, 1, 0, 0), (0, 1, 1, 0)]
VER_Y_PROMISE = [(0, 0, 0, 1), (0, 0, 1, 0), (0, 1, 0, 0), (1, 0, 0, 0)]


def encode_ver_x(v):
    """Promise encoding of Alice's ver argument: 0011 rotated right v times."""
    return VER_X_PROMISE[v]


def encode_ver_y(v):
    """Promise encoding of Bob's ver argument: a single 1 at position 4-v."""
    return VER_Y_PROMISE[v]


def gdt_promise(x, y):
    """gdt restricted to the promise sets; must agree with ver there."""
    if tuple(x) not in VER_X_PROMISE:
        raise ValueError(f"x outside the promise set: {x}")
    if tuple(y) not in VER_Y_PROMISE:
        raise ValueError(f"y outside the promise set: {y}")
    return gdt(x, y)


# --- construction --------------------------------------------------------


@dataclass
class SkeletonSpec:
    """The input-independent server part: tree of height h + m paths."""

    height: int
    path_count: int

    @property
    def width(self):
        return 2 ** self.height

    def nodes(self):
        h, m = self.height, self.path_count
        names = [("t", i, j) for i in range(h + 1) for j in range(1, 2 ** i + 1)]
        names += [("p", i, j) for i in range(1, m + 1)
                  for j in range(1, self.width + 1)]
        return names

    def tree_edges(self):
        return [(("t", i, j), ("t", i - 1, (j + 1) // 2))
                for i in range(1, self.height + 1)
                for j in range(1, 2 ** i + 1)]

    def path_edges(self):
        return [(("p", i, j), ("p", i, j - 1))
                for i in range(1, self.path_count + 1)
                for j in range(2, self.width + 1)]

    def leaf_path_edges(self):
        return [(("t", self.height, j), ("p", i, j))
                for i in range(1, self.path_count + 1)
                for j in range(1, self.width + 1)]


@dataclass
class GadgetInstance:
    variant: str
    h: int
    s: int
    l: int
    alpha: int
    beta: int
    x: tuple
    y: tuple
    graph: WeightedGraph
    node_id: dict                  # structured name -> dense id
    names: list                    # id -> name
    skeleton: SkeletonSpec = None

    @property
    def selectors(self):
        return 2 ** self.s

    def id(self, *name):
        return self.node_id[name]


def gadget_node_count(h, variant="diameter"):
    s, l = 3 * h // 2, 2 ** (3 * h // 2 - h)
    n = (2 ** (h + 1) - 1) + (2 * s + l) * (2 ** h + 2) + 2 * 2 ** s
    return n + 1 if variant == "radius" else n


def build_gadget(h, x=None, y=None, variant="diameter", alpha=None, beta=None):
    """The full lower-bound graph for the given inputs.

    h must be even and >= 2; s = 3h/2, l = 2^(s-h), m = 2s + l paths.
    x, y are flat 0/1 sequences of length 2^s * l (row-major over (i, j));
    default all-ones.  alpha/beta default to n^2 / 2n^2.
    """
    if h < 2 or h % 2:
        raise ValueError(f"h must be an even number >= 2: {h}")
    if variant not in ("diameter", "radius"):
        raise ValueError(f"unknown variant {variant!r}")
    s = 3 * h // 2
    l = 2 ** (s - h)
    m = 2 * s + l
    sel = 2 ** s
    if x is None:
        x = (1,) * (sel * l)
    if y is None:
        y = (1,) * (sel * l)
    x, y = tuple(x), tuple(y)
    _check_input(x, sel, l)
    _check_input(y, sel, l)

    skeleton = SkeletonSpec(height=h, path_count=m)
    names = skeleton.nodes()
    names += [("a", i) for i in range(1, sel + 1)]
    names += [("abit", b, j) for j in range(1, s + 1) for b in (0, 1)]
    names += [("astar", j) for j in range(1, l + 1)]
    names += [("b", i) for i in range(1, sel + 1)]
    names += [("bbit", b, j) for j in range(1, s + 1) for b in (0, 1)]
    names += [("bstar", j) for j in range(1, l + 1)]
    if variant == "radius":
        names.append(("a0",))
    names.sort()
    node_id = {name: i for i, name in enumerate(names)}
    n = len(names)
    expected = gadget_node_count(h, variant)
    if n != expected:
        raise AssertionError(f"node count {n} != formula value {expected}")
    alpha = n ** 2 if alpha is None else alpha
    beta = 2 * n ** 2 if beta is None else beta
    if not alpha < beta:
        raise ValueError(f"need alpha < beta: {alpha}, {beta}")

    def E(u, v, w):
        edges.append((node_id[u], node_id[v], w))

    edges = []
    width = 2 ** h
    for u, v in skeleton.tree_edges() + skeleton.path_edges():
        E(u, v, 1)
    for u, v in skeleton.leaf_path_edges():
        E(u, v, alpha)
    # path endpoints into the two halves (weight 1, contracted later)
    for i in range(1, s + 1):
        E(("abit", 0, i), ("p", 2 * i - 1, 1), 1)
        E(("bbit", 1, i), ("p", 2 * i - 1, width), 1)
        E(("abit", 1, i), ("p", 2 * i, 1), 1)
        E(("bbit", 0, i), ("p", 2 * i, width), 1)
    for j in range(1, l + 1):
        E(("astar", j), ("p", 2 * s + j, 1), 1)
        E(("bstar", j), ("p", 2 * s + j, width), 1)
    # the two halves
    for i in range(1, sel + 1):
        for j in range(1, s + 1):
            E(("a", i), ("abit", bin_bit(i, j), j), alpha)
            E(("b", i), ("bbit", bin_bit(i, j), j), alpha)
        for j in range(1, l + 1):
            E(("a", i), ("astar", j), alpha if x[(i - 1) * l + j - 1] else beta)
            E(("b", i), ("bstar", j), alpha if y[(i - 1) * l + j - 1] else beta)
        for i2 in range(i + 1, sel + 1):
            E(("a", i), ("a", i2), alpha)
            E(("b", i), ("b", i2), alpha)
    if variant == "radius":
        for i in range(1, sel + 1):
            E(("a0",), ("a", i), 2 * alpha)

    graph = WeightedGraph(n, edges)
    return GadgetInstance(variant=variant, h=h, s=s, l=l, alpha=alpha,
                          beta=beta, x=x, y=y, graph=graph, node_id=node_id,
                          names=names, skeleton=skeleton)


# --- exact verification --------------------------------------------------


def _contracted_handles(inst, mapping):
    """Contracted-graph ids for the named node classes."""
    cid = lambda *name: mapping[inst.node_id[name]]
    handles = {
        "t": cid("t", 0, 1),
        "a": {i: cid("a", i) for i in range(1, inst.selectors + 1)},
        "b": {i: cid("b", i) for i in range(1, inst.selectors + 1)},
        # path 2j-1 merges with abit0_j/bbit1_j; path 2j with abit1_j/bbit0_j
        "abit": {(bit, j): cid("abit", bit, j)
                 for j in range(1, inst.s + 1) for bit in (0, 1)},
        "astar": {j: cid("astar", j) for j in range(1, inst.l + 1)},
        "routers": sorted({mapping[inst.node_id[("p", i, 1)]]
                           for i in range(1, 2 * inst.s + inst.l + 1)}),
    }
    if inst.variant == "radius":
        handles["a0"] = cid("a0")
    return handles


def check_table2(inst, contracted=None, mapping=None):
    """Every tabulated distance upper bound, checked on the contracted graph.

    Returns (rows_checked, failures) where failures lists
    (description, u, v, distance, bound).
    """
    if contracted is None:
        contracted, mapping = contract_unit_edges(inst.graph)
    hd = _contracted_handles(inst, mapping)
    a, b = inst.alpha, inst.beta
    sel, s, l = inst.selectors, inst.s, inst.l
    dist = {}
    sources = {hd["t"], *hd["a"].values(), *hd["b"].values(), *hd["routers"]}
    for u in sources:
        dist[u] = exact_sssp(contracted, u)

    rows = []
    t = hd["t"]
    for p in hd["routers"]:
        rows.append(("t-router", t, p, a))
    for i in range(1, sel + 1):
        ai, bi = hd["a"][i], hd["b"][i]
        rows.append(("t-a", t, ai, 2 * a))
        rows.append(("t-b", t, bi, 2 * a))
        for i2 in range(1, sel + 1):
            if i2 == i:
                continue
            rows.append(("a-a", ai, hd["a"][i2], a))
            rows.append(("b-b", bi, hd["b"][i2], a))
            rows.append(("a-b", ai, hd["b"][i2], 2 * a))
        for j in range(1, s + 1):
            same = hd["abit"][(bin_bit(i, j), j)]
            flip = hd["abit"][(bin_bit(i, j) ^ 1, j)]
            rows.append(("a-ownbit", ai, same, a))
            rows.append(("a-otherbit", ai, flip, 2 * a))
            rows.append(("b-ownbit", bi, flip, a))
            rows.append(("b-otherbit", bi, same, 2 * a))
        for j in range(1, l + 1):
            rows.append(("a-star", ai, hd["astar"][j], b))
            rows.append(("b-star", bi, hd["astar"][j], b))
    for u in hd["routers"]:
        for v in hd["routers"]:
            if u != v:
                rows.append(("router-router", u, v, 2 * a))

    failures = [(desc, u, v, dist[u][v], bound)
                for desc, u, v, bound in rows if dist[u][v] > bound]
    return len(rows), failures


def verify_reduction(inst):
    """Exact check of the gap lemma, the contraction sandwich, and Table 2.

    Brute-forces the diameter (or radius) on both the full graph and the
    weight-1 contraction; any violated inequality lands in
    report["counterexamples"].
    """
    g = inst.graph
    n = g.n
    contracted, mapping = contract_unit_edges(g)
    sel, l = inst.selectors, inst.l

    def metric(graph):
        eccs = [max(exact_sssp(graph, u)) for u in range(graph.n)]
        return (max(eccs) if inst.variant == "diameter" else min(eccs)), eccs

    exact, _ = metric(g)
    exact_c, eccs_c = metric(contracted)

    if inst.variant == "diameter":
        fval = eval_F(inst.x, inst.y, sel, l)
    else:
        fval = eval_F_prime(inst.x, inst.y, sel, l)
    upper = max(2 * inst.alpha, inst.beta) + n
    lower = min(inst.alpha + inst.beta, 3 * inst.alpha)

    counterexamples = []
    if not exact_c <= exact <= exact_c + n:
        counterexamples.append(
            {"check": "contraction-sandwich",
             "detail": f"{exact_c} <= {exact} <= {exact_c} + {n} fails"})
    if fval == 1 and exact > upper:
        counterexamples.append(
            {"check": "gap-upper", "detail": f"{exact} > {upper} with F=1"})
    if fval == 0 and exact < lower:
        counterexamples.append(
            {"check": "gap-lower", "detail": f"{exact} < {lower} with F=0"})

    table_rows, table_failures = check_table2(inst, contracted, mapping)
    for desc, u, v, d, bound in table_failures:
        counterexamples.append(
            {"check": f"table2-{desc}",
             "detail": f"d'({u},{v}) = {d} > {bound}"})

    if inst.variant == "radius":
        hd = _contracted_handles(inst, mapping)
        sel_ids = set(hd["a"].values())
        for v in range(contracted.n):
            if v not in sel_ids and eccs_c[v] < 3 * inst.alpha:
                counterexamples.append(
                    {"check": "radius-ecc-floor",
                     "detail": f"e'({v}) = {eccs_c[v]} < {3 * inst.alpha}"})

    return {
        "variant": inst.variant,
        "h": inst.h,
        "s": inst.s,
        "l": inst.l,
        "alpha": inst.alpha,
        "beta": inst.beta,
        "F": fval,
        "D_or_R_exact": exact,
        "contracted_exact": exact_c,
        "lemma_bound_low": lower,
        "lemma_bound_high": upper,
        "table2_rows": table_rows,
        "counterexamples": counterexamples,
        "pass": not counterexamples,
    }


# --- ownership schedule --------------------------------------------------

ALICE, BOB, SERVER = 0, 1, 2


@dataclass
class OwnershipSchedule:
    instance: GadgetInstance
    rounds: int                     # T; owners defined for r in [0, T]
    owners: list = field(default_factory=list)  # per round: per-id owner


def ownership_schedule(inst, T):
    """Who simulates which node at the end of each round r in [0, T].

    The server's share of each path shrinks by one node per round from
    both ends; tree ownership follows by the index-interval formulas.
    Requires T < 2^h / 2.
    """
    h = inst.h
    width = 2 ** h
    if not (0 <= T < width // 2):
        raise ValueError(f"need 0 <= T < 2^h/2 = {width // 2}: {T}")
    owners = []
    for r in range(T + 1):
        owner = [None] * inst.graph.n
        for name, vid in inst.node_id.items():
            kind = name[0]
            if kind == "p":
                _, _, j = name
                if j < 1 + r:
                    owner[vid] = ALICE
                elif j > width - r:
                    owner[vid] = BOB
                else:
                    owner[vid] = SERVER
            elif kind == "t":
                _, i, j = name
                low = math.ceil((1 + r) / 2 ** (h - i))
                high = math.ceil((width - r) / 2 ** (h - i))
                if j < low:
                    owner[vid] = ALICE
                elif j > high:
                    owner[vid] = BOB
                else:
                    owner[vid] = SERVER
            elif kind in ("a", "abit", "astar", "a0"):
                owner[vid] = ALICE
            else:
                owner[vid] = BOB
        owners.append(owner)
    return OwnershipSchedule(instance=inst, rounds=T, owners=owners)


def validate_schedule(schedule):
    """Partition, hand-off locality, and crossing-count checks.

    Returns (per-round crossing counts, violations); a violation is a
    (round, node-or-edge, description) triple.
    """
    inst = schedule.instance
    g = inst.graph
    tree_ids = {vid for name, vid in inst.node_id.items() if name[0] == "t"}
    violations = []
    crossings = []
    prev = None
    for r, owner in enumerate(schedule.owners):
        if any(o is None for o in owner):
            violations.append((r, None, "node without an owner"))
        if prev is not None:
            for v in range(g.n):
                if owner[v] != SERVER and prev[v] not in (owner[v], SERVER):
                    violations.append(
                        (r, v, "node handed directly between Alice and Bob"))
            count = 0
            for u, v, _ in g.edges:
                for a, bnode in ((u, v), (v, u)):
                    if owner[a] != SERVER and prev[bnode] not in (owner[a], SERVER):
                        violations.append(
                            (r, (a, bnode),
                             "neighbor on the far side in the previous round"))
                    if (prev[a] == SERVER and owner[a] == SERVER
                            and prev[bnode] != SERVER):
                        count += 1
                        if a not in tree_ids:
                            violations.append(
                                (r, (bnode, a), "crossing at a non-tree node"))
            crossings.append(count)
            if count > 2 * inst.h:
                violations.append(
                    (r, None, f"{count} crossings > 2h = {2 * inst.h}"))
        prev = owner
    return crossings, violations
