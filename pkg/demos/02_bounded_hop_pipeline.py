"""
The bounded-hop approximation pipeline, stage by stage
======================================================

Run the whole distance pipeline on one graph with a full skeleton (S = V)
and check the (1+eps)^2 sandwich against the exact oracle.  With S = V
and the hop bound at n the result is deterministic: every entry must land
inside the sandwich, with exact rational arithmetic.
"""

import random

from congestsim import Network
from congestsim.graphs import exact_sssp, random_connected_graph
from congestsim.toolkit import (
    approx_distance,
    build_skeleton_state,
    default_eps,
    embed_overlay,
    sssp_on_overlay,
)

g = random_connected_graph(12, max_weight=10, rng=random.Random(7))
net = Network(g, seed=7)
eps = default_eps(g.n)
print(f"n = {g.n}, eps = {eps}")

# Stage 1: multi-source bounded-hop tables (superposed delayed copies,
# real messages under the bandwidth limit).
state = build_skeleton_state(net, 0, list(range(g.n)), hops=g.n, eps=eps)

# Stage 2+3: the k-shortcut overlay on the skeleton.
embed_overlay(net, state, k=4)
print(f"{len(state.shortcut)} shortcut edges")

# Stage 4: bounded-hop distances on the overlay, one source at a time.
for s in range(g.n):
    sssp_on_overlay(net, state, s)

# Stage 5: node-local combination, checked against the exact oracle.
slack = (1 + eps) ** 2
worst = 0
for s in range(g.n):
    exact = exact_sssp(g, s)
    for v in range(g.n):
        d = approx_distance(state, s, v)
        assert exact[v] <= d <= slack * exact[v]
        if exact[v]:
            worst = max(worst, d / exact[v])
print(f"all {g.n * g.n} pairs inside the sandwich; "
      f"worst ratio {float(worst):.4f} (bound {float(slack):.4f})")

totals = {}
for phase in net.ledger.phases:
    totals[phase.name] = totals.get(phase.name, 0) + phase.rounds
for name, rounds in totals.items():
    if rounds:
        print(f"  {name:>14}: {rounds} rounds")
print(f"total rounds: {net.ledger.rounds}")
