"""
Inner bound meets outer bound
=============================

Draw random combination networks for K=3..6, and for each one check
that the achievable region and the cut-set outer region contain each other.
A failing check would come with a witness point.
"""
import time
from collections import Counter

from groupcast import verify as V

t0 = time.perf_counter()
reports = V.run_campaign("capacity", range(3, 7), 10, seed=1)
tally = Counter((r.instance["K"], r.passed) for r in reports)
for K in range(3, 7):
    print(f"K={K}: {tally[K, True]} passed, {tally[K, False]} failed")
print(f"{len(reports)} networks in {time.perf_counter() - t0:.1f}s")

# one report in full, as it would be written by the CLI
print(reports[0].to_json())
