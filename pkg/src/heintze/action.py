"""Height-respecting maps of ``G_M`` and the boundary constants they induce.

A height-respecting map is modeled by its normal form
``phi(t, p) = (t + a +- eps, F(p))``: a boundary map ``F``, a height shift
``a`` and an additive fuzz ``eps >= 0``.  First contact heights then move
by ``a`` up to ``eps``, so ``F`` scales ``D_M`` by ``e^a`` up to a factor
``e^{+-eps}``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .boundary import dm_batch
from .errors import ContractViolation, DomainError
from .maps import BoundaryMap, _pairs
from .sampling import as_sampler
from .space import first_contact_height
from .spectral import OrderedBasis

BAND_RTOL = 1e-9


@dataclass(frozen=True)
class HeightRespectingMap:
    boundary_part: BoundaryMap
    height_shift: float = 0.0
    additive_fuzz: float = 0.0

    def __post_init__(self):
        if not self.additive_fuzz >= 0:
            raise DomainError("additive fuzz must be nonnegative")


def induced_boundary_constants(basis: OrderedBasis, phi: HeightRespectingMap,
                               sampler=None, trials: int = 1000) -> dict:
    """Observed similarity factor and fuzz of the induced boundary map.

    ``factor`` is the geometric mean of the ratios
    ``D_M(F p, F q) / D_M(p, q)`` and ``fuzz`` is ``exp`` of the largest
    deviation of a log ratio from the log factor.  Raises
    :class:`ContractViolation` when a ratio leaves
    ``[e^{a - eps}, e^{a + eps}]`` (relative slack ``1e-9``).
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sampler = as_sampler(sampler)
    F = phi.boundary_part
    P, Q = _pairs(basis, sampler.rng(), sampler.R, trials)
    FP = np.array([F(p) for p in P])
    FQ = np.array([F(q) for q in Q])
    _, d0 = dm_batch(basis, P - Q)
    _, d1 = dm_batch(basis, FP - FQ)
    ok = d0 > 0
    logr = np.log(d1[ok] / d0[ok])
    idx = np.nonzero(ok)[0]
    a, eps = phi.height_shift, phi.additive_fuzz
    slack = math.log1p(BAND_RTOL)
    out = np.abs(logr - a) > eps + slack
    if out.any():
        k = int(np.argmax(np.abs(logr - a)))
        raise ContractViolation(
            f"ratio {math.exp(logr[k]):.12g} outside [e^{a - eps:.6g}, e^{a + eps:.6g}]",
            witness=(P[idx[k]].copy(), Q[idx[k]].copy()))
    center = float(np.mean(logr))
    return {"factor": math.exp(center),
            "fuzz": math.exp(float(np.max(np.abs(logr - center)))),
            "ratio_min": math.exp(float(logr.min())),
            "ratio_max": math.exp(float(logr.max())),
            "pairs": int(ok.sum())}


def first_contact_consistency(basis: OrderedBasis, phi: HeightRespectingMap, p, q) -> float:
    """``T' - T - a`` for the first contact heights ``T`` of ``p, q`` and ``T'`` of their images."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if np.array_equal(p, q):
        raise DomainError("first contact needs p != q")
    F = phi.boundary_part
    T = first_contact_height(basis, p, q)
    T1 = first_contact_height(basis, F(p), F(q))
    return T1 - T - phi.height_shift
