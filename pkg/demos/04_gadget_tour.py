"""
A tour of the lower-bound gadget
================================

Build the h=2 instance, flip some input bits, and watch the exact
diameter jump across the gap that separates F = 1 from F = 0.  Then
check the ownership schedule of the two-party simulation argument.
"""

import random

from congestsim.gadgets import (
    build_gadget,
    eval_F,
    ownership_schedule,
    validate_schedule,
    verify_reduction,
)

# All-ones input: every AND clause is satisfiable, F = 1, small diameter.
inst = build_gadget(2)
report = verify_reduction(inst)
print(f"h=2: n = {inst.graph.n}, alpha = {inst.alpha}, beta = {inst.beta}")
print(f"all-ones: F = {report['F']}, D = {report['D_or_R_exact']}, "
      f"upper bound {report['lemma_bound_high']}, pass = {report['pass']}")

# Block one row of x: that clause can no longer fire, F = 0, and the
# diameter jumps above the lower gap bound.
x = [1] * 16
x[0] = x[1] = 0
report = verify_reduction(build_gadget(2, x=tuple(x)))
print(f"blocked row: F = {report['F']}, D = {report['D_or_R_exact']}, "
      f"lower bound {report['lemma_bound_low']}, pass = {report['pass']}")

# Random inputs land on the correct side of the gap every time.
rng = random.Random(0)
for _ in range(5):
    x = tuple(rng.randint(0, 1) for _ in range(16))
    y = tuple(rng.randint(0, 1) for _ in range(16))
    r = verify_reduction(build_gadget(2, x=x, y=y))
    f_direct = eval_F(x, y, 8, 2)
    print(f"random: F = {r['F']} (= {f_direct}), D = {r['D_or_R_exact']}, "
          f"pass = {r['pass']}")

# The simulation argument: per-round ownership of every node, with at
# most 2h charged crossings per round.
sched = ownership_schedule(inst, T=1)
crossings, violations = validate_schedule(sched)
print(f"ownership: crossings per round {crossings}, "
      f"violations {len(violations)}, cap {2 * inst.h}")
