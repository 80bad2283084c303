"""
A first look at the round engine
================================

Flood a one-bit token through a small network and watch the cost ledger:
rounds, messages, and bits, all under the per-edge bandwidth limit.
"""

import random

from congestsim import Network, NodeProgram
from congestsim.graphs import random_connected_graph


# A tiny per-node program: forward the token once, away from its senders.
class Flood(NodeProgram):
    def __init__(self, node, origin):
        self.node = node
        self.origin = origin
        self.seen = node == origin
        self.halted = node != origin

    def on_round(self, ctx):
        if self.node == self.origin and ctx.local_round == 0:
            ctx.broadcast(1)
        else:
            senders = {u for u, _ in ctx.inbox}
            if senders and not self.seen:
                self.seen = True
                for v in ctx.neighbors():
                    if v not in senders:
                        ctx.send(v, 1)
        self.halted = True


g = random_connected_graph(12, rng=random.Random(1))
net = Network(g, seed=1)
print(f"n = {g.n}, bandwidth = {net.bandwidth_bits} bits/edge/round")

rounds = net.run({v: Flood(v, 0) for v in range(g.n)})
print(f"flood finished in {rounds} rounds")
print(net.ledger.to_json())

# The engine also ships the three classic tree primitives.
net.build_bfs_tree()
items = net.broadcast_pipeline([10, 20, 30])
print("every node now holds", items[g.n - 1])
print("max of 0..n-1 by convergecast:",
      net.convergecast_extremum(list(range(g.n))))
