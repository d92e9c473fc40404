"""Witnesses against maps that swap eigenvalue blocks, and what similarities do instead."""

import numpy as np

from heintze import (Sampler, bilip_constant_estimate, build_basis, dilation, foliation_check,
                     nonbilip_witness_via_triangle)
from heintze.maps import coordinate_swap, random_triangular

basis = build_basis([(1.0, [1]), (2.0, [1])])
swap = coordinate_swap(basis, 0, 1)

# (1) A swap leaves no foliation invariant: a pair in one U_(2,1) leaf lands in two.
print(foliation_check(basis, swap, (2, 1), Sampler(seed=0), 100))

# (2) A pair with finite chain functional at level (1, 1) maps to one with infinite functional.
w = nonbilip_witness_via_triangle(basis, swap, None, Sampler(seed=0), 100)
print("triangle witness:", w.p, w.q, "ratios", w.evidence["ratios"])

# (3) Sampled constants: a swap is far from bilipschitz, a dilation is a similarity.
print("swap K >=", bilip_constant_estimate(basis, swap, Sampler(seed=0), 2000)["K"])
r = bilip_constant_estimate(basis, dilation(basis, 3.0), Sampler(seed=0), 2000)
print("dilation:", r["kind"], "factor", r["factor"], "K_qsim", r["K_qsim"])

# (4) Triangular maps pass by construction.
F = random_triangular(basis, np.random.default_rng(1))
print([foliation_check(basis, F, lev, Sampler(seed=1), 200) for lev in basis.ascending])
