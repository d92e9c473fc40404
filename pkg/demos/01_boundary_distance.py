"""Boundary distance on R x_M R^3 with one Jordan block and one scalar block."""

import math

import numpy as np

from heintze import build_basis, dM, dM_coordinate, euclid_cygan, first_contact_height
from heintze.spectral import standard_dilation

# (1) A = J_2(1) + (2): levels are listed lowest first, precedence runs the other way.
basis = build_basis([(1.0, [2]), (2.0, [1])])
print("ascending levels:", basis.ascending)
print("precedence order:", basis.levels)

# (2) D_M = e^{t0}; t0 is where the level distance first drops to 1.
p, q = np.array([0.0, 7.0, 1.0]), np.zeros(3)
r = dM(basis, p, q)
print(f"D_M = {r.value:.12f}  t0 = {r.t0:.12f}  attained at {r.witness_level}")

# (3) The explicit per-chain formula, solved by scanning, gives the same t0.
print(f"coordinate formula t0 = {dM_coordinate(basis, p, q).t0:.12f}")

# (4) Dilations scale D_M exactly.
for s in (0.5, 2.0, 10.0):
    d = dM(basis, standard_dilation(basis, s, p), standard_dilation(basis, s, q)).value
    print(f"s = {s:5}: D_M(d_s p, d_s q) / D_M(p, q) = {d / r.value:.12f}")

# (5) The Euclid-Cygan quantity is e^{1/2} D_M once the cut is below t0.
t0 = first_contact_height(basis, p, q)
print("Euclid-Cygan / D_M =", euclid_cygan(basis, p, q, t0 - 10) / r.value, "vs", math.exp(0.5))
