"""
Yosida approximation without the resolvent of A
===============================================

The classical approximator needs (lam - A)^{-1}. The generalized one only
uses the resolvent of T = -(A*A)^{1/2}, which exists for every lam > 0.
"""

import numpy as np

from banach_adjoint import (BanachNorm, Operator, check_polar,
                            check_yosida_identities, make_rigging, polar_factors,
                            semigroup_experiment, yosida_classical, yosida_general)

r = make_rigging(2, BanachNorm.lp(1), [1.0, 0.25], [0.5, 0.125])
A = Operator(r, [[0.0, 1.0], [0.0, 0.0]])

P = polar_factors(A)
print("T =\n", P.T.M, "\nU =\n", P.U.M, "\nU T =\n", P.U.M @ P.T.M)
print(check_polar(A, seed=0).summary())

for lam in (1.0, 10.0, 1000.0):
    print(f"lam={lam:7g}  A_lam[0,1] = {yosida_general(A, lam).M[0, 1]:.6f}")

# the classical version refuses lam below the spectral abscissa
B = Operator(make_rigging(1, BanachNorm.lp(2), [1.0], [1.0]), [[2.0]])
try:
    yosida_classical(B, 1.0)
except ValueError as exc:
    print("classical:", exc)
print("generalized at lam=1:", yosida_general(B, 1.0).M)

lams = [2.0 ** k for k in range(11)]
print(check_yosida_identities(A, lams).summary())

# both errors halve when lam doubles
tab = semigroup_experiment(A, lams[1:], [0.5, 1.0, 2.0], list(np.eye(2)))
print(tab.to_csv())
print(tab.report.summary())
