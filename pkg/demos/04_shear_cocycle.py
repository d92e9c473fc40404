"""Unipotent shears: inverse by back-substitution, the iterate cocycle and averaging bounds."""

import math

import numpy as np

from heintze import UnipotentShear, build_basis, cocycle_iterate_check, shear_bound_experiment
from heintze.maps import random_poly_shear

basis = build_basis([(1.0, [2]), (2.0, [1])])
rng = np.random.default_rng(0)

# (1) A random polynomial shear and its exact inverse.
g = random_poly_shear(basis, rng)
y = rng.uniform(-1, 1, basis.n)
print("round trip error:", np.max(np.abs(g(g.inverse()(y)) - y)))

# (2) B_{gamma^n} is the sum of B_gamma along the orbit.
for n in (1, 2, 8, 32):
    print(f"n = {n:2d}: cocycle residual {cocycle_iterate_check(basis, g, y, n):.2e}")

# (3) A bounded shear: one-step oscillation against osc_n / n + 2 chi.
h = UnipotentShear(basis, {0: lambda t: math.sin(t[0] + t[1]), 1: lambda t: 0.1 * math.cos(t[0])})
rep = shear_bound_experiment(basis, h, 0, [0.0, 0.2, 0.3], [0.0, 0.1, -0.4], 16)
print("one-step oscillation", rep["step_oscillation"], "bound holds:", rep["bound_holds"])
for row in rep["rows"][::5]:
    print(f"  n = {row['n']:2d}  osc/n = {row['avg']:.4f}  chi = {row['chi']:.4f}  bound = {row['bound']:.4f}")
