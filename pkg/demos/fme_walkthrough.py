"""
Eliminating the split rates
===========================

Start from the superposition scheme written over nine rates (the four
message rates plus five split rates), eliminate the split rates one at a
time, and compare the middle stages with the hand-written systems.
"""
import random

from groupcast.geometry import equal_sets, fme_project, minimize
from groupcast.network import DiamondMessageSet, evaluate_optimal_distribution, random_network
from groupcast.regions import printed_fme_stage, split_rate_region, theorem1_region

rng = random.Random(7)
net = random_network(4, rng)
val = evaluate_optimal_distribution(net)   # atom values of the optimal distribution
M = DiamondMessageSet(4)

start = split_rate_region(val)
print("start:", start.dim, "variables,", len(start), "rows")

stages = fme_project(start, M.split_rates)
for step, stage in enumerate(stages[1:], 1):
    small = minimize(stage)
    line = f"after removing {M.split_rates[step - 1]}: {len(stage)} rows, {len(small)} irredundant"
    if step in (2, 3, 4):       # only these stages are written out by hand
        same = equal_sets(small, printed_fme_stage(val, step))
        line += f", printed stage {'agrees' if same else 'differs'}"
    print(line)

# the last stage should be the closed-form inner bound
print("final stage equals the inner bound:", equal_sets(stages[-1], theorem1_region(val)))
