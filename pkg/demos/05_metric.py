"""
A metric between operators
==========================

The bounded transform A0 = A (I + A*A)^{-1/2} squeezes every operator into
the unit ball; the distance is the B-norm of A0 - B0.
"""

import numpy as np

from banach_adjoint import (BanachNorm, Operator, bounded_transform, check_metric,
                            identity_rigging, make_rigging, operator_metric)
from banach_adjoint._random import make_rng

r = make_rigging(2, BanachNorm.lp(1), [1.0, 0.25], [0.5, 0.125])
A = Operator(r, [[0.0, 1.0], [0.0, 0.0]])
Z = Operator(r, np.zeros((2, 2)))
print("A0 =\n", bounded_transform(A).M)
print("d(A, 0) =", operator_metric(A, Z), " d(A, A) =", operator_metric(A, A))

# far-apart operators stay within distance 2
rng = make_rng(1)
I3 = identity_rigging(3)
big = [Operator(I3, 1e3 * rng.standard_normal((3, 3))) for _ in range(2)]
print("d(big1, big2) =", operator_metric(*big))

print(check_metric(I3, trials=100, seed=0).summary())
