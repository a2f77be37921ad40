"""
A unit-norm biorthogonal basis
==============================

The common eigenvectors of W2 and T12, normalized in B, pair with the
rescaled Riesz functionals to give a system with ‖x_i‖ = ‖x_i*‖ = 1.
"""

import math

from banach_adjoint import (check_basis, markushevich, random_diagonal_rigging,
                            wiener_rigging)
from banach_adjoint._random import make_rng

rng = make_rng(0)
for p in (1.0, 1.5, 2.0, 3.0, math.inf):
    b = markushevich(random_diagonal_rigging(6, p, rng))
    rep = check_basis(b, seed=0)
    print(f"p={p:>4}: {'ok' if rep.passed else 'FAIL'}")

# a discretized Wiener rigging has a sine eigenbasis: biorthogonal but
# not monotone under the sup-norm, so the norm-one duals are lost
print(check_basis(markushevich(wiener_rigging(16)), seed=0).summary())
