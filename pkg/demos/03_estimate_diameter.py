"""
End-to-end diameter and radius estimation
=========================================

The two-level randomized search: sample n skeleton sets, search the
extremum of f(i) = extremum over sources of the approximate
eccentricity, with every evaluation charged at its full communication
cost.  Compare the estimates and the charged rounds with the exact
values.
"""

import random

from congestsim import Network
from congestsim.graphs import diameter, radius, random_connected_graph
from congestsim.search import ParameterSchedule, approx_diameter, approx_radius

g = random_connected_graph(32, max_weight=10, rng=random.Random(3))
schedule = ParameterSchedule.for_graph(g)
print("parameters:", schedule.to_dict())

true_d, true_r = diameter(g), radius(g)
slack = (1 + schedule.eps) ** 2

for name, run, true in (("diameter", approx_diameter, true_d),
                        ("radius", approx_radius, true_r)):
    net = Network(g, seed=3)
    estimate, trace, ledger = run(net, schedule, rng=random.Random(3))
    print(f"{name}: true {true}, estimate {float(estimate):.2f} "
          f"(allowed up to {float(slack * true):.2f})")
    print(f"  {trace.evaluations} outer evaluations, "
          f"{ledger.rounds} charged rounds")
    # the paper-level budget for comparison, up to polylog factors
    budget = g.n ** 0.9 * schedule.unweighted_diameter ** 0.3
    print(f"  n^0.9 * D_G^0.3 = {budget:.0f}")
