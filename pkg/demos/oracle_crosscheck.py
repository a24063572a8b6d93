"""Sparse simulator against the dense reference on random experiments."""
import numpy as np

from ifmsim import measure
from ifmsim.oracle import compare, oracle_run, random_scenario
from ifmsim.scenario import evolve

rng = np.random.default_rng(20261018)
worst = 0.0
for _ in range(50):
    sc = random_scenario(rng)
    worst = max(worst, compare(measure(evolve(sc), sc.detector), oracle_run(sc)))
print(f"largest deviation over 50 random scenarios: {worst:.2e}")
