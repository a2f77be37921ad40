"""
An adjoint for a matrix acting on a Banach space
================================================

The adjoint is built from the two Riesz maps, A* = W1^{-1} A^T W2. It is
the Hilbert adjoint from H1 to H2, which is what makes A*A well behaved.
"""

import numpy as np

from banach_adjoint import (BanachNorm, Operator, adjoint, check_h2_bound,
                            check_lax, check_vonneumann, gram, identity_rigging,
                            make_rigging, star_residual)
from banach_adjoint._random import make_rng
from banach_adjoint.adjoint import h2_symmetric_operator

r = make_rigging(2, BanachNorm.lp(1), [1.0, 0.25], [0.5, 0.125])
A = Operator(r, [[0.0, 1.0], [0.0, 0.0]])

print("A* =\n", adjoint(A).M)
AtA, inv = gram(A)
print("A*A =\n", AtA.M, "\n(I + A*A)^-1 =\n", inv.M)

# A*A is self-adjoint in H1 but not in the literal (A*A)* sense
print("star residual ‖(A*A)* - A*A‖ =", star_residual(A))
print(check_vonneumann(A, n_x=200, seed=0).summary())

# on the identity rigging everything collapses to the transpose
I4 = identity_rigging(4)
B = Operator(I4, make_rng(3).standard_normal((4, 4)))
print("identity rigging: A* == A^T ?", np.array_equal(adjoint(B).M, B.M.T))

# the sign of <A*Ax, phi_x> depends on the rigging; here it flips
s = make_rigging(2, BanachNorm.lp(2), [1.0, 1.0], [1.0, 0.01])
C = Operator(s, [[1.0, 1.0], [0.0, 0.0]])
print(check_vonneumann(C, n_x=200, seed=0).summary())

# an H2-self-adjoint operator is no larger on H2 than on B
rng = make_rng(4)
S = h2_symmetric_operator(make_rigging(3, BanachNorm.lp(np.inf), [1.0, 2.0, 4.0],
                                       [1.0, 0.5, 0.1]), rng)
print(check_lax(S).summary())
print(check_h2_bound(A).summary())
