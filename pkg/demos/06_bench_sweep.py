"""
Failure rate against the number of queries
==========================================

The same sweep the ``boolsketch bench`` command runs, driven from Python.
Each trial gets its own seed derived from (seed, point, trial).
"""

from boolsketch.cli import run_trial, summarize

values = [150, 300, 600, 1200]
tasks = [
    {"seed": 0, "point": i, "value": v, "trial": t, "kind": "graph", "n": 50, "s": 2, "d": 3, "m1": v}
    for i, v in enumerate(values)
    for t in range(30)
]
rows = [run_trial(t) for t in tasks]
for p in summarize(rows):
    print(f"queries {p['value']:5d}  failure rate {p['failure_rate']:.2f}")
