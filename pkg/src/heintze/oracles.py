"""Slow reference computations used to cross-check the fast solvers."""

from __future__ import annotations

import math

import numpy as np

from .space import _abs_components, _lower_bound, component_polys
from .spectral import OrderedBasis


def dense_scan_t0(basis: OrderedBasis, delta, step: float = 1e-4,
                  xtol: float = 1e-12, chunk: int = 8192) -> float:
    """First contact height by a fixed-step scan followed by bisection.

    The scan starts at the certified lower bound (below it the top entry
    of some chain alone exceeds 1) and walks up in steps of ``step`` until
    the level distance first drops to 1.
    """
    delta = np.asarray(delta, dtype=float)
    C = component_polys(basis, delta)
    live = np.any(C != 0, axis=1)
    if not live.any():
        return -math.inf
    alphas, C = basis.alphas[live], C[live]

    def norm(t):
        return np.max(_abs_components(alphas, C, np.atleast_1d(t)), axis=0)

    lo = _lower_bound(alphas, C)
    if norm(lo)[0] <= 1.0:
        return lo
    start = lo
    while True:
        grid = start + step * np.arange(1, chunk + 1)
        hit = np.nonzero(norm(grid) <= 1.0)[0]
        if hit.size:
            b = float(grid[hit[0]])
            a = b - step
            break
        start = float(grid[-1])
    while b - a > xtol:
        mid = 0.5 * (a + b)
        if norm(mid)[0] <= 1.0:
            b = mid
        else:
            a = mid
    return b
