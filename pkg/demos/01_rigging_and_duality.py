"""
Three norms on one coordinate space
===================================

A rigging puts a Banach norm B between two Hilbert norms, H1 inside B
inside H2. Here B is l^1 on R^2 and the Hilbert weights are diagonal.
"""

import numpy as np

from banach_adjoint import (BanachNorm, check_embedding, j_map, make_rigging,
                            norm, pairing, special_duality)

# w2 weights H2, t12 shrinks H2 into H1; both are rescaled so the
# embeddings have norm at most one
r = make_rigging(2, BanachNorm.lp(1), w2_raw=[1.0, 0.25], t12=[0.5, 0.125])
print("W2 =", np.diag(r.W2), " W1 =", np.diag(r.W1), " constants =", r.c_scale)

# every vector is ordered the same way: ‖x‖_H2 <= ‖x‖_B <= ‖x‖_H1
x = np.array([1.0, 1.0])
for space in ("H2", "B", "H1"):
    print(f"‖x‖_{space:2s} = {norm(r, x, space):.6f}")

# J2 is the Riesz map of H2; rescaling it gives a duality map for B
f = special_duality(r, x)
print("J2 x =", j_map(r, x, 2).coords, " phi_x =", f.coords)
print("<x, phi_x> =", pairing(x, f), "= ‖x‖_B^2 =", norm(r, x) ** 2)

# the ordering and pairing identities hold on random vectors too
print(check_embedding(r, trials=500, seed=1).summary())
