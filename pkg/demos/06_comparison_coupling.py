"""Monotone coupling: more immigration never hurts.
================================================

Two copies of the process driven by the same Brownian increments and the
same Poisson candidates, one with immigration drift beta, one with
beta' >= beta, stay ordered: X_t <= X'_t. Discretisation can break the
ordering only through the shared diffusion term, and the violation fraction
vanishes as the step shrinks.
"""

import numpy as np

from cbi import load_scenario
from cbi.montecarlo import verify_comparison
from cbi.simulate import SimConfig, block_generator, simulate_coupled

s3 = load_scenario("S3")
p = s3.params
der = s3.derived()

# One coupled pair, beta' = beta + (1, 1): the gap opens and stays positive.
cfg = SimConfig(T=1.0, dt=2.0 ** -10)
lower, upper = simulate_coupled(
    p, der, p.beta + np.array([1.0, 1.0]), [2.0, 1.0], [2.0, 1.0], cfg,
    block_generator(seed=31415, block_index=0))
gap = upper.states - lower.states
print("final gap:", gap[-1])
print("most negative gap entry over the whole path:", gap.min())

# The scenario-level check quantifies this over 10^4 coupled pairs at two
# step sizes: the violation fraction is tiny and does not grow on halving.
print()
print(verify_comparison(s3).table())
