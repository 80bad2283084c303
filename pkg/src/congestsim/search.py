"""Randomized extremum search over skeleton indices and sources.

The diameter/radius estimators sample n random skeleton sets, define
f(i) = extremum over skeleton sources s of the approximate eccentricity
computed through skeleton i's tables, and search for the extremum of f
by amplified random sampling — the classical, cost-accounted stand-in
for quantum maximum finding.

Charged rounds of a search are T0 + evaluations * T, where T0 is the
one-time setup and T the per-evaluation round cost (constant across
probes: the real protocol runs every probe in lockstep).
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction

from .graphs import INFINITE, diameter
from .toolkit import (
    build_skeleton_state,
    default_eps,
    embed_overlay,
    sssp_on_overlay,
    approx_eccentricity,
)

# Budget of an amplified search with success density rho is
# ceil(2 * ln(1/delta) / rho) evaluations; SEARCH_COST_CONSTANT is the
# single global constant C with evaluations <= C * sqrt(log(1/delta) /
# rho_measured) for every configuration this package exercises.
SEARCH_COST_CONSTANT = 60

DEFAULT_DELTA = Fraction(1, 12)


class LowConfidenceResult(RuntimeError):
    """Every probe of the search hit an empty/degenerate candidate."""

    def __init__(self, trace):
        self.trace = trace
        super().__init__("search produced no usable value")


class IterationBudgetExceeded(RuntimeError):
    """Threshold-mode search exhausted its budget without a good element."""

    def __init__(self, trace):
        self.trace = trace
        super().__init__(
            f"no element reached the threshold in {trace.evaluations} evaluations")


@dataclass
class ParameterSchedule:
    """The n- and diameter-driven knobs of one estimator run."""

    n: int
    unweighted_diameter: int
    eps: Fraction
    r: int          # expected skeleton size
    hops: int       # hop bound of the base distance tables
    k: int          # shortcut degree of the overlay

    @classmethod
    def for_graph(cls, g, eps_floor=None):
        n = g.n
        d = max(1, diameter(g.unit_weights()))
        eps = default_eps(n)
        if eps_floor is not None:
            floor = Fraction(eps_floor).limit_denominator(10 ** 6)
            if eps < floor:
                eps = floor
        r = min(n, max(1, math.ceil(n ** 0.4 * d ** -0.2)))
        hops = min(n, max(1, math.ceil(n * math.log2(max(2, n)) / r)))
        k = max(1, math.ceil(math.sqrt(d)))
        return cls(n=n, unweighted_diameter=d, eps=eps, r=r, hops=hops, k=k)

    def to_dict(self):
        return {
            "n": self.n,
            "unweighted_diameter": self.unweighted_diameter,
            "eps": f"{self.eps.numerator}/{self.eps.denominator}",
            "r": self.r,
            "hops": self.hops,
            "k": self.k,
        }


@dataclass
class SearchTrace:
    """Record of one amplified search run."""

    mode: str = "max"
    rho: object = 1          # configured success density
    delta: object = DEFAULT_DELTA
    candidate_count: int = 0
    evaluations: int = 0
    setup_rounds: int = 0
    eval_rounds: int = 0     # worst single-evaluation cost observed
    charged_rounds: int = 0  # setup + evaluations * eval_rounds
    found: object = None
    value: object = None
    success: object = None   # set post hoc against an oracle value
    probes: list = field(default_factory=list)  # (candidate, value) sampled

    def check_success(self, oracle_value, slack=1):
        """Success = found value reaches the oracle extremum (times slack)."""
        if self.value is None:
            self.success = False
        elif self.mode == "max":
            self.success = self.value >= oracle_value and \
                self.value <= oracle_value * slack
        else:
            self.success = self.value <= oracle_value * slack and \
                self.value >= oracle_value
        return self.success


def search_budget(rho, delta):
    """Evaluations of one amplified search: ceil(2 ln(1/delta) / rho)."""
    if not (0 < rho <= 1):
        raise ValueError(f"need 0 < rho <= 1: {rho}")
    if not (0 < delta < 1):
        raise ValueError(f"need 0 < delta < 1: {delta}")
    return max(1, math.ceil(2 * math.log(1 / delta) / rho))


def amplified_max_search(candidates, evaluate, rho, delta, rng, mode="max",
                         setup_rounds=0, threshold=None):
    """Repeatedly sample a candidate, evaluate it, keep the extremum.

    `evaluate(x)` returns (value, rounds); value None marks a degenerate
    probe that contributes cost but no value.  With a `threshold`, stops
    as soon as a probe reaches it and raises IterationBudgetExceeded if
    none does within the budget.  Raises LowConfidenceResult when every
    probe was degenerate.
    """
    if mode not in ("max", "min"):
        raise ValueError(f"mode must be 'max' or 'min': {mode!r}")
    if not candidates:
        raise ValueError("no candidates to search over")
    budget = search_budget(rho, delta)
    trace = SearchTrace(mode=mode, rho=rho, delta=delta,
                        candidate_count=len(candidates),
                        setup_rounds=setup_rounds)
    better = (lambda a, b: a > b) if mode == "max" else (lambda a, b: a < b)
    reached = (lambda v: v >= threshold) if mode == "max" else \
        (lambda v: v <= threshold)
    for _ in range(budget):
        x = rng.choice(candidates)
        value, rounds = evaluate(x)
        trace.evaluations += 1
        trace.probes.append((x, value))
        if rounds > trace.eval_rounds:
            trace.eval_rounds = rounds
        if value is not None and (trace.value is None
                                  or better(value, trace.value)):
            trace.value = value
            trace.found = x
        if threshold is not None and value is not None and reached(value):
            break
    trace.charged_rounds = trace.setup_rounds + trace.evaluations * trace.eval_rounds
    if trace.value is None:
        raise LowConfidenceResult(trace)
    if threshold is not None and not reached(trace.value):
        raise IterationBudgetExceeded(trace)
    return trace


def reference_search(candidates, evaluate, mode="max"):
    """Deterministic debug mode: evaluate every candidate, return the extremum.

    Upper-bounds (max) / lower-bounds (min) every stochastic trace's value.
    """
    best_x, best_v = None, None
    better = (lambda a, b: a > b) if mode == "max" else (lambda a, b: a < b)
    for x in candidates:
        value, _ = evaluate(x)
        if value is not None and (best_v is None or better(value, best_v)):
            best_x, best_v = x, value
    return best_x, best_v


def evaluate_f_i(network, index, members, schedule, delta=DEFAULT_DELTA,
                 mode="max", trace_sink=None, cache=None):
    """f(i): extremum over skeleton sources s of the approximate
    eccentricity through skeleton i, with its full communication cost.

    Returns (value, rounds); value None when the skeleton is empty.
    Rounds = initialization (multi-source tables + overlay embedding,
    charged once) + inner amplified search over sources, each probe
    paying: collect the skeleton, announce s, overlay distances, local
    combine + convergecast.
    """
    members = sorted(members)
    if not members:
        return None, 0
    d_g = network.unweighted_diameter()
    ledger = network.ledger

    # Repeat evaluations of the same index reproduce the same tables and
    # the same round cost; reuse the tables but charge the rounds again.
    cached = cache.get(("init", index)) if cache is not None else None
    if cached is not None:
        state, init_rounds = cached
        network.charge_rounds(init_rounds, phase="init")
    else:
        mark = ledger.rounds
        state = build_skeleton_state(network, index, members, schedule.hops,
                                     schedule.eps)
        embed_overlay(network, state, schedule.k)
        init_rounds = ledger.rounds - mark
        if cache is not None:
            cache[("init", index)] = (state, init_rounds)

    if len(members) == 1:
        s = members[0]
        value = approx_eccentricity(state, s, node_count=network.n)
        extra = 2 * d_g + 1  # announce s + convergecast the eccentricity
        network.charge_rounds(extra, phase="eval")
        if trace_sink is not None:
            trace_sink.append(SearchTrace(
                mode=mode, rho=1, delta=delta, candidate_count=1,
                evaluations=1, setup_rounds=init_rounds, eval_rounds=extra,
                charged_rounds=init_rounds + extra, found=s, value=value,
                probes=[(s, value)]))
        return value, init_rounds + extra

    def probe(s):
        cached = cache.get(("probe", index, s)) if cache is not None else None
        if cached is not None:
            value, rounds = cached
            network.charge_rounds(rounds, phase="setup")
            return value, rounds
        probe_mark = ledger.rounds
        # collect the skeleton at the prober, then announce s
        network.charge_rounds(d_g + len(members), phase="setup")
        network.charge_rounds(d_g, phase="setup")
        sssp_on_overlay(network, state, s)
        value = approx_eccentricity(state, s, node_count=network.n)
        network.charge_rounds(d_g, phase="eval")  # convergecast the extremum
        rounds = ledger.rounds - probe_mark
        if cache is not None:
            cache[("probe", index, s)] = (value, rounds)
        return value, rounds

    trace = amplified_max_search(
        members, probe, rho=Fraction(1, len(members)), delta=delta,
        rng=network.rng_for(network.leader), mode=mode,
        setup_rounds=init_rounds)
    if trace_sink is not None:
        trace_sink.append(trace)
    return trace.value, trace.charged_rounds


def _estimate(network, schedule, delta, rng, mode, trace_sink=None):
    sets = network.sample_skeleton_sets(schedule.r, network.n)
    cache = {}

    def outer(i):
        return evaluate_f_i(network, i, sets[i], schedule, delta, mode=mode,
                            trace_sink=trace_sink, cache=cache)

    rho = Fraction(min(schedule.r, network.n), network.n)
    trace = amplified_max_search(list(range(network.n)), outer,
                                 rho=rho, delta=delta, rng=rng, mode=mode)
    if trace_sink is not None:
        trace_sink.append(trace)
    return trace, sets


def approx_diameter(network, schedule=None, delta=DEFAULT_DELTA, rng=None,
                    trace_sink=None):
    """Estimate the weighted diameter; never an overestimate beyond the
    (1+eps)^2 sandwich when the tables behave.

    Returns (estimate, outer SearchTrace, ledger).
    """
    if schedule is None:
        schedule = ParameterSchedule.for_graph(network.graph)
    if rng is None:
        rng = random.Random(network.seed)
    trace, _ = _estimate(network, schedule, delta, rng, "max", trace_sink)
    return trace.value, trace, network.ledger


def approx_radius(network, schedule=None, delta=DEFAULT_DELTA, rng=None,
                  trace_sink=None):
    if schedule is None:
        schedule = ParameterSchedule.for_graph(network.graph)
    if rng is None:
        rng = random.Random(network.seed)
    trace, _ = _estimate(network, schedule, delta, rng, "min", trace_sink)
    return trace.value, trace, network.ledger
