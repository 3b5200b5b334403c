"""Broadcasting a single bit through noisy layered DAGs.

Exact chain dynamics of the fraction-of-ones statistic, Monte Carlo
simulation of random and fixed wirings, bipartite-expander DAG construction,
and the matching impossibility bounds.
"""

__version__ = "0.1.0"
