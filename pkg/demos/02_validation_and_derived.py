"""Admissibility validation and derived drift parameters.
=======================================================

A parameter tuple (d, c, beta, B, nu, mu) must satisfy positivity and
integrability conditions before the process exists. Validation never throws
on a bad tuple: every condition is reported as data. Once admissible, the
modified drifts (beta_tilde, B_tilde, D, B_hat) summarise how the jump
measures fold into the linear dynamics.
"""

import numpy as np

from cbi import AdmissibleParams, derive, validate
from cbi.measures import DiscreteAtoms, TemperedPowerLawAxis

# A healthy two-type instance.
good = AdmissibleParams(
    d=2,
    c=[0.02, 0.02],
    beta=[0.45, 0.35],
    B=[[-2.5, 0.8], [0.8, -2.5]],
    nu=DiscreteAtoms(2, [(np.array([0.1, 0.1]), 0.5)]),
    mu=(DiscreteAtoms(2, [(np.array([0.1, 0.05]), 2.0)]),
        DiscreteAtoms(2, [(np.array([0.05, 0.12]), 1.5)])),
)
report = validate(good)
print("admissible:", report.ok)

der = derive(good)
print("beta_tilde  ", der.beta_tilde)
print("B_tilde     \n", der.B_tilde)
print("D           \n", der.D)
print("B_hat       \n", der.B_hat)
print("effective simulation drift\n", der.drift_matrix)

# An immigration measure that is too heavy near the origin: alpha >= 1 makes
# int (1 ^ ||z||) diverge, and the report names the failing condition.
bad = AdmissibleParams(
    d=1, c=[1.0], beta=[1.0], B=[[-1.0]],
    nu=TemperedPowerLawAxis(1, 0, alpha=1.5, theta=1.0, scale=1.0),
    mu=(None,),
)
for check in validate(bad).checks:
    flag = "ok " if check.passed else "FAIL"
    print(f"[{flag}] {check.name}: {check.citation}")
