"""Deterministic synchronous message-passing engine with per-edge bandwidth limits.

Semantics: in each round every node may send at most B bits along each
incident (directed) edge; a message sent in round r is readable in round
r+1.  The engine fast-forwards over rounds in which no delivery or wake
is scheduled, but the round clock and the cost ledger still account for
every round of the budget.
"""

from __future__ import annotations

import heapq
import json
import math
import random
from dataclasses import dataclass, field


class BandwidthExceeded(RuntimeError):
    def __init__(self, edge, round_no, bits, limit):
        self.edge, self.round_no, self.bits, self.limit = edge, round_no, bits, limit
        super().__init__(
            f"edge {edge} carries {bits} bits in round {round_no} (limit {limit})"
        )


class MaxRoundsExceeded(RuntimeError):
    pass


def payload_bits(payload):
    """Default bit-size of a message payload (tuples of small non-negative ints)."""
    if isinstance(payload, tuple):
        return sum(payload_bits(p) for p in payload)
    if isinstance(payload, bool):
        return 1
    if isinstance(payload, int):
        return max(1, payload.bit_length())
    if isinstance(payload, str):
        return 8 * len(payload)
    raise TypeError(f"cannot size payload {payload!r}; pass bits= explicitly")


@dataclass
class Phase:
    name: str
    rounds: int = 0
    messages: int = 0
    bits: int = 0


@dataclass
class CostLedger:
    rounds: int = 0
    messages: int = 0
    bits: int = 0
    phases: list = field(default_factory=list)
    _current: Phase = None

    def begin_phase(self, name):
        self._current = Phase(name)
        self.phases.append(self._current)

    def end_phase(self):
        self._current = None

    def add_rounds(self, k):
        self.rounds += k
        if self._current is not None:
            self._current.rounds += k

    def add_message(self, bits):
        self.messages += 1
        self.bits += bits
        if self._current is not None:
            self._current.messages += 1
            self._current.bits += bits

    def to_dict(self):
        return {
            "rounds": self.rounds,
            "messages": self.messages,
            "bits": self.bits,
            "phases": [
                {"name": p.name, "rounds": p.rounds,
                 "messages": p.messages, "bits": p.bits}
                for p in self.phases
            ],
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


class NodeProgram:
    """Base class for per-node programs.

    `on_round(ctx)` is invoked whenever the node has incoming messages or a
    scheduled wake (and for every node in the program's first round).  Set
    `self.halted = True` when done; the run stops once all programs halt
    and no messages are in flight.
    """

    halted = False

    def on_round(self, ctx):
        raise NotImplementedError


class Context:
    __slots__ = ("network", "node", "round", "inbox", "_start_round")

    def __init__(self, network, node, round_no, inbox, start_round):
        self.network = network
        self.node = node
        self.round = round_no
        self.inbox = inbox
        self._start_round = start_round

    @property
    def local_round(self):
        """Rounds since this run() started."""
        return self.round - self._start_round

    @property
    def rng(self):
        return self.network.rng_for(self.node)

    def neighbors(self):
        return [v for v, _ in self.network.graph.adj[self.node]]

    def send(self, neighbor, payload, bits=None):
        self.network._send(self.node, neighbor, payload,
                           bits if bits is not None else payload_bits(payload),
                           self.round)

    def send_word(self, neighbor, payload, bits=None):
        """Send a word of arbitrary width, fragmented over consecutive rounds."""
        self.network._send_fragmented(
            self.node, neighbor, payload,
            bits if bits is not None else payload_bits(payload), self.round)

    def broadcast(self, payload, bits=None):
        for v in self.neighbors():
            self.send(v, payload, bits=bits)

    def wake_at(self, round_no):
        self.network._wake(self.node, round_no)


class Network:
    """A CONGEST network over a WeightedGraph with a global round clock."""

    def __init__(self, graph, bandwidth_bits=None, leader=0, seed=0):
        self.graph = graph
        self.n = graph.n
        if bandwidth_bits is None:
            bandwidth_bits = max(4, math.ceil(4 * math.log2(max(2, graph.n))))
        self.bandwidth_bits = bandwidth_bits
        self.leader = leader
        self.seed = seed
        self.round_clock = 0
        self.ledger = CostLedger()
        self._rngs = {}
        # delivery round -> node -> list of (sender, payload)
        self._pending = {}
        # (u, v, round) -> bits already claimed
        self._edge_bits = {}
        self._wakes = set()
        self._wake_heap = []
        self._last_send_round = None
        # BFS tree cache: (parent, children, depth) lists
        self.tree = None
        self._unweighted_diameter = None

    def unweighted_diameter(self):
        """Hop diameter of the communication graph (cached; used for charging)."""
        if self._unweighted_diameter is None:
            from .graphs import diameter
            self._unweighted_diameter = int(diameter(self.graph.unit_weights()))
        return self._unweighted_diameter

    def charge_rounds(self, k, phase=None):
        """Account `k` rounds of a formula-charged stage (no per-message replay)."""
        self.round_clock += k
        if phase is not None and self.ledger._current is None:
            self.ledger.begin_phase(phase)
            self.ledger.add_rounds(k)
            self.ledger.end_phase()
        else:
            self.ledger.add_rounds(k)

    def clear_traffic(self):
        """Drop all in-flight messages and wakes (e.g. after an aborted run)."""
        self._pending.clear()
        self._wakes.clear()
        self._wake_heap.clear()
        self._edge_bits.clear()

    def rng_for(self, node):
        rng = self._rngs.get(node)
        if rng is None:
            rng = random.Random(f"{self.seed}:{node}")
            self._rngs[node] = rng
        return rng

    def phase(self, name):
        network = self

        class _PhaseCtx:
            def __enter__(self):
                network.ledger.begin_phase(name)

            def __exit__(self, *exc):
                network.ledger.end_phase()

        return _PhaseCtx()

    # --- low-level message plumbing -------------------------------------

    def _claim_edge(self, u, v, round_no, bits):
        key = (u, v, round_no)
        total = self._edge_bits.get(key, 0) + bits
        if total > self.bandwidth_bits:
            raise BandwidthExceeded((u, v), round_no, total, self.bandwidth_bits)
        self._edge_bits[key] = total

    def _deliver(self, v, round_no, sender, payload):
        per_node = self._pending.setdefault(round_no, {})
        per_node.setdefault(v, []).append((sender, payload))

    def _send(self, u, v, payload, bits, round_no):
        if bits > self.bandwidth_bits:
            raise BandwidthExceeded((u, v), round_no, bits, self.bandwidth_bits)
        self._claim_edge(u, v, round_no, bits)
        self.ledger.add_message(bits)
        self._note_send(round_no)
        self._deliver(v, round_no + 1, u, payload)

    def _send_fragmented(self, u, v, payload, bits, round_no):
        b = self.bandwidth_bits
        nfrag = max(1, (bits + b - 1) // b)
        for j in range(nfrag):
            frag_bits = min(b, bits - j * b)
            self._claim_edge(u, v, round_no + j, frag_bits)
            self.ledger.add_message(frag_bits)
        self._note_send(round_no + nfrag - 1)
        self._deliver(v, round_no + nfrag, u, payload)

    def _note_send(self, round_no):
        if self._last_send_round is None or round_no > self._last_send_round:
            self._last_send_round = round_no

    def _wake(self, node, round_no):
        if round_no < self.round_clock:
            raise ValueError(f"cannot wake in the past: {round_no} < {self.round_clock}")
        if (round_no, node) not in self._wakes:
            self._wakes.add((round_no, node))
            heapq.heappush(self._wake_heap, (round_no, node))

    def _pop_wakes(self, round_no):
        # Entries below round_no are stale (registered for a round that was
        # already being processed); drain them so they cannot clog the heap.
        woken = []
        while self._wake_heap and self._wake_heap[0][0] <= round_no:
            item = heapq.heappop(self._wake_heap)
            self._wakes.discard(item)
            if item[0] == round_no:
                woken.append(item[1])
        return woken

    # --- the round loop --------------------------------------------------

    def run(self, programs, max_rounds=None, exact_rounds=None):
        """Execute programs round by round.

        `programs` is a dict node -> NodeProgram (one per node, subsets
        allowed: missing nodes are inert).  With `exact_rounds` the run
        consumes exactly that many rounds (quiet tail included); otherwise
        it stops when all programs have halted and nothing is in flight,
        or fails with MaxRoundsExceeded at `max_rounds`.

        Returns the number of rounds consumed.
        """
        start = self.round_clock
        budget_end = None
        if exact_rounds is not None:
            budget_end = start + exact_rounds
        limit_end = None
        if max_rounds is not None:
            limit_end = start + max_rounds

        self._last_send_round = None
        first = True
        while True:
            r = self.round_clock
            if budget_end is not None and r >= budget_end:
                break
            if limit_end is not None and r >= limit_end:
                if budget_end is None and not self._quiescent(programs):
                    raise MaxRoundsExceeded(f"no halt within {max_rounds} rounds")
                break

            inboxes = self._pending.pop(r, {})
            woken = self._pop_wakes(r)
            if first:
                active = sorted(programs.keys())
                first = False
            else:
                active = sorted(set(inboxes) | set(woken))
            for v in active:
                prog = programs.get(v)
                if prog is None:
                    continue
                ctx = Context(self, v, r, inboxes.get(v, []), start)
                prog.on_round(ctx)

            self.round_clock += 1
            self._prune_edge_bits()

            if budget_end is None and self._quiescent(programs):
                break

            # Fast-forward to the next round with a delivery or a wake; the
            # skipped quiet rounds still count against the budget.
            nxt = min(self._pending) if self._pending else None
            if self._wake_heap and (nxt is None or self._wake_heap[0][0] < nxt):
                nxt = self._wake_heap[0][0]
            if nxt is not None:
                for end in (budget_end, limit_end):
                    if end is not None and nxt > end:
                        nxt = end
                if nxt > self.round_clock:
                    self.round_clock = nxt
            elif budget_end is not None:
                self.round_clock = budget_end
            elif limit_end is not None:
                self.round_clock = limit_end
            else:
                raise MaxRoundsExceeded(
                    "deadlock: nothing in flight but programs have not halted")

        # Charge rounds.  For fixed-budget runs the whole budget counts
        # (quiet tail included).  Otherwise rounds are counted through the
        # last round that carried traffic; the final delivery-only round is
        # local computation and free.
        if budget_end is not None:
            used = budget_end - start
            self.round_clock = budget_end
        elif self._last_send_round is not None:
            used = self._last_send_round - start + 1
        else:
            used = 0
        self.ledger.add_rounds(used)
        return used

    def _quiescent(self, programs):
        if self._pending or self._wake_heap:
            return False
        return all(p.halted for p in programs.values())

    def _prune_edge_bits(self):
        if len(self._edge_bits) > 4 * len(self.graph.edges):
            r = self.round_clock
            self._edge_bits = {k: v for k, v in self._edge_bits.items() if k[2] >= r}

    # --- tree primitives -------------------------------------------------

    def build_bfs_tree(self):
        """Build and cache a BFS tree rooted at the leader (real messages)."""
        programs = {v: _TreeBuildProgram(v, self.leader) for v in range(self.n)}
        with self.phase("bfs-tree"):
            self.run(programs, max_rounds=2 * self.n + 2)
        parent = [programs[v].parent for v in range(self.n)]
        depth = [programs[v].depth for v in range(self.n)]
        children = [[] for _ in range(self.n)]
        for v in range(self.n):
            if parent[v] is not None:
                children[parent[v]].append(v)
        self.tree = (parent, children, depth)
        return self.tree

    def _require_tree(self):
        if self.tree is None:
            self.build_bfs_tree()
        return self.tree

    def broadcast_pipeline(self, items, phase="broadcast"):
        """Leader pipelines `items` down the BFS tree; all nodes learn all items.

        Each item must fit in B bits.  Returns the per-node item lists
        (identical everywhere).
        """
        for it in items:
            if payload_bits(it) > self.bandwidth_bits:
                raise BandwidthExceeded(("item",), self.round_clock,
                                        payload_bits(it), self.bandwidth_bits)
        parent, children, depth = self._require_tree()
        programs = {v: _PipelineProgram(v, self.leader, children[v],
                                        list(items) if v == self.leader else None,
                                        len(items))
                    for v in range(self.n)}
        with self.phase(phase):
            self.run(programs, max_rounds=self.n + len(items) + 2)
        return {v: programs[v].received for v in range(self.n)}

    def convergecast_extremum(self, local_values, mode="max", phase="convergecast"):
        """Aggregate the max/min of per-node values up the BFS tree to the leader."""
        if mode not in ("max", "min"):
            raise ValueError(f"mode must be 'max' or 'min': {mode!r}")
        parent, children, depth = self._require_tree()
        programs = {v: _ConvergecastProgram(v, parent[v], len(children[v]),
                                            local_values[v], mode)
                    for v in range(self.n)}
        with self.phase(phase):
            self.run(programs, max_rounds=self.n + 2)
        return programs[self.leader].value

    # --- skeleton sampling -----------------------------------------------

    def sample_skeleton_sets(self, r, count):
        """Each node joins each of `count` sets independently with probability r/n.

        Node-local (0 rounds); driven by the per-node seeded RNG streams so
        the result is independent of iteration order.
        """
        if not (0 < r <= self.n):
            raise ValueError(f"need 0 < r <= n: r={r}, n={self.n}")
        sets = [set() for _ in range(count)]
        p = r / self.n
        for v in range(self.n):
            rng = self.rng_for(v)
            for i in range(count):
                if rng.random() < p:
                    sets[i].add(v)
        return sets


class _TreeBuildProgram(NodeProgram):
    def __init__(self, node, root):
        self.node = node
        self.root = root
        self.parent = None
        self.depth = 0 if node == root else None
        self.halted = node != root  # non-root nodes idle until offered

    OFFER, ACCEPT = 0, 1

    def on_round(self, ctx):
        if self.node == self.root and ctx.local_round == 0:
            ctx.broadcast((self.OFFER, 0))
            self.halted = True
            return
        if self.depth is None:
            offers = sorted((d, u) for u, (kind, d) in ctx.inbox
                            if kind == self.OFFER)
            if offers:
                d, u = offers[0]
                self.parent = u
                self.depth = d + 1
                ctx.send(u, (self.ACCEPT, 0))
                ctx.broadcast((self.OFFER, self.depth))
        self.halted = True


class _PipelineProgram(NodeProgram):
    def __init__(self, node, root, children, items, total):
        self.node = node
        self.children = children
        self.total = total
        self.received = list(items) if items is not None else []
        self.queue = list(items) if items is not None else []
        self.halted = total == 0
        if node == root and total:
            self.halted = False

    def on_round(self, ctx):
        for _, payload in ctx.inbox:
            self.received.append(payload)
            self.queue.append(payload)
        if self.queue:
            item = self.queue.pop(0)
            for c in self.children:
                ctx.send(c, item)
            if self.queue:
                ctx.wake_at(ctx.round + 1)
        if len(self.received) == self.total and not self.queue:
            self.halted = True


class _ConvergecastProgram(NodeProgram):
    def __init__(self, node, parent, n_children, value, mode):
        self.node = node
        self.parent = parent
        self.n_children = n_children
        self.value = value
        self.mode = mode
        self.pending = n_children
        self.halted = False

    def on_round(self, ctx):
        for _, child_value in ctx.inbox:
            pick = max if self.mode == "max" else min
            self.value = pick(self.value, child_value)
            self.pending -= 1
        if self.pending == 0:
            if self.parent is not None:
                ctx.send(self.parent, self.value)
            self.halted = True
