"""Chain functional trichotomy: the leading differing level decides 0, finite or infinite."""

import numpy as np

from heintze import build_basis, classify_triangle

basis = build_basis([(1.0, [2]), (2.0, [1])])

# (1) p and q differ by 3 at level (1, 2) and arbitrarily below it.
p = np.array([0.4, 0.0, 0.0])
q = np.array([-5.0, 3.0, 0.0])

# (2) Query every level; the bounds bracket the functional along ln k up to 2^30.
for level in basis.ascending:
    c = classify_triangle(basis, p, q, level)
    last = c.evidence[-1]
    print(f"level {level}: {c.kind:>8}  value {c.value:.6g}  "
          f"(bounds at ln k = {last.log_k:.3g}: [{last.lower:.6g}, {last.upper:.6g}])")
