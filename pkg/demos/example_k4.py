"""
The four-receiver example, by hand
===================================

Build the capacity region of a K=4 combination network with every link at
capacity 1, minimize it, list its vertices, and line its rows up with the
nine hand-written inequalities of the worked example.
"""
from groupcast.geometry import enumerate_vertices, minimize
from groupcast.network import CombinationNetwork
from groupcast.regions import example_k4_region, theorem2_region
from groupcast.verify import example_k4_table

net = CombinationNetwork.uniform(4)     # 15 links, all capacity 1
print(net.K, "receivers,", len(net.capacities), "links")

# the general-K description, at this network
region = minimize(theorem2_region(net))
print(region)

# the same region written out for K=4 directly
hand = example_k4_region(net)
for row in hand.rows:
    print(" ", row)

# every hand-written row should appear among the minimized rows
for label, hit in example_k4_table():
    print(f"{label:10s} -> row {hit + 1 if hit is not None else '?'}")

# four rates, so the vertex list is short
for v in enumerate_vertices(region):
    print(dict(zip(region.variables, map(str, v))))
