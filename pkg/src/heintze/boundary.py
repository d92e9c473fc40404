"""The boundary quasimetric ``D_M`` on ``R^n = boundary(G_M) minus infinity``.

``D_M(p, q) = e^{t0}`` where ``t0`` is the first contact height of the
vertical geodesics through ``p`` and ``q``.  Two routes are provided:

* :func:`dM` solves for ``t0`` on the matrix exponential (the reference);
* :func:`dM_coordinate` evaluates the explicit per-chain sums

  ``max_{alpha, l, j} e^{-alpha t} |sum_{i=j}^{l} (-1)^i t^{i-j}/(i-j)! dx_{alpha,i}|``

  and finds the first crossing of 1 by a grid scan.  Here ``l`` runs over
  the chain lengths (one sum per chain, ending at the top of that chain);
  truncating a chain's sum below its top is *not* a term of the norm.  The
  factor ``(-1)^i`` differs from the expansion of ``e^{-tA}``, which
  carries ``(-1)^(i-j)``, only by the sign ``(-1)^j`` common to the whole
  sum, so it does not change the modulus.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import PrecisionError
from .sampling import as_sampler
from .space import (CROSS_RTOL, SpacePoint, _solve_t0, component_polys, d_L,
                    first_contact_height, first_crossing)
from .spectral import OrderedBasis


@dataclass(frozen=True)
class BoundaryDistanceResult:
    """``value = e^{t0}``; ``witness_level`` is ``(alpha, chain length, j)``."""

    value: float
    t0: float
    witness_level: Optional[tuple] = None

    def __float__(self):
        return self.value


def _witness(basis: OrderedBasis, i: int) -> tuple:
    ix = basis.index_of[i]
    chain = next(ch for ch in basis.chains if i in ch.positions)
    return (ix.alpha, chain.size, ix.ell)


def dM(basis: OrderedBasis, p, q) -> BoundaryDistanceResult:
    delta = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    t0, i = _solve_t0(basis, delta)
    if i is None:
        return BoundaryDistanceResult(0.0, -math.inf, None)
    C = component_polys(basis, delta)
    if np.all(C[i, 1:] == 0):
        # the attaining component is e^{-alpha t} c, so e^{t0} = |c|^{1/alpha}
        value = abs(C[i, 0]) ** (1.0 / basis.alphas[i])
    else:
        with np.errstate(over="ignore"):
            value = float(np.exp(t0))
    return BoundaryDistanceResult(float(value), float(t0), _witness(basis, i))


def dm_value(basis: OrderedBasis, p, q) -> float:
    return dM(basis, p, q).value


def dm_batch(basis: OrderedBasis, deltas) -> tuple:
    """``(t0, value)`` arrays for a stack of differences ``deltas[k] = p_k - q_k``.

    Rows whose first contact is certified by the top-of-chain bound are
    handled in bulk; the rest go through the scalar solver.
    """
    D = np.atleast_2d(np.asarray(deltas, dtype=float))
    K = D.shape[0]
    al = basis.alphas
    C = np.empty((K, basis.n, basis.max_size))
    fact = 1.0
    for m in range(basis.max_size):
        if m:
            fact *= m
        C[:, :, m] = ((-1) ** m / fact) * (D @ basis.nilpotent_power(m).T)
    const = np.all(C[:, :, 1:] == 0, axis=2) & (C[:, :, 0] != 0)
    with np.errstate(divide="ignore"):
        Li = np.where(const, np.log(np.abs(C[:, :, 0])) / al, -np.inf)
    star = np.argmax(Li, axis=1)
    L = Li[np.arange(K), star]
    t0 = np.full(K, -np.inf)
    value = np.zeros(K)
    nz = np.isfinite(L)

    Lc = np.where(nz, L, 0.0)[:, None]
    poly = C[:, :, -1].copy()
    for m in range(basis.max_size - 2, -1, -1):
        poly = poly * Lc + C[:, :, m]
    with np.errstate(divide="ignore", over="ignore"):
        norm_at_L = np.max(np.exp(-al * Lc + np.log(np.abs(poly))), axis=1)
    fast = nz & (norm_at_L <= 1.0 + CROSS_RTOL)
    t0[fast] = L[fast]
    value[fast] = np.abs(C[fast, star[fast], 0]) ** (1.0 / al[star[fast]])
    for k in np.nonzero(nz & ~fast)[0]:
        r = dM(basis, D[k], np.zeros(basis.n))
        t0[k], value[k] = r.t0, r.value
    return t0, value


# -- explicit coordinate formula --------------------------------------------


def _coordinate_terms(basis: OrderedBasis, delta):
    """One row per (chain, j): eigenvalue and polynomial coefficients in t."""
    rows, alphas, tags = [], [], []
    for ch in basis.chains:
        ell = ch.size
        dx = [delta[pos] for pos in ch.positions]  # dx[i-1] = dx_{alpha,i}
        for j in range(1, ell + 1):
            coeffs = np.zeros(basis.max_size)
            for i in range(j, ell + 1):
                coeffs[i - j] = (-1) ** i / math.factorial(i - j) * dx[i - 1]
            rows.append(coeffs)
            alphas.append(ch.alpha)
            tags.append((ch.alpha, ell, j))
    return np.array(alphas), np.array(rows), tags


def dM_coordinate(basis: OrderedBasis, p, q) -> BoundaryDistanceResult:
    """``D_M`` from the explicit per-coordinate maximum, solved by scanning."""
    delta = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    if not np.any(delta):
        return BoundaryDistanceResult(0.0, -math.inf, None)
    alphas, P, tags = _coordinate_terms(basis, delta)
    live = np.any(P != 0, axis=1)
    alphas, P = alphas[live], P[live]
    tags = [t for t, keep in zip(tags, live) if keep]
    powers = np.arange(P.shape[1])

    def terms(t):
        t = np.atleast_1d(np.asarray(t, dtype=float))
        poly = P @ (t[None, :] ** powers[:, None])
        with np.errstate(divide="ignore", over="ignore"):
            return np.exp(-alphas[:, None] * t[None, :] + np.log(np.abs(poly)))

    def F(t):
        return np.max(terms(t), axis=0)

    # the highest nonzero entry of each chain gives a constant term, so
    # the maximum certainly exceeds 1 below the largest of their crossings
    safe = -math.inf
    for ch in basis.chains:
        nz = [pos for pos in ch.positions if delta[pos] != 0]
        if nz:
            safe = max(safe, math.log(abs(delta[nz[-1]])) / ch.alpha)
    start = math.log(np.max(np.abs(delta))) / float(np.min(basis.alphas))
    lo, width = min(start, safe), 1.0
    while not F(lo)[0] > 1.0:
        lo -= width
        width *= 2.0
    hi, width = max(start, lo) + 1.0, 1.0
    while F(hi)[0] > 1.0:
        hi += width
        width *= 2.0
    t0 = first_crossing(F, lo, hi, xtol=1e-13)
    k = int(np.argmax(terms(t0)[:, 0]))
    return BoundaryDistanceResult(float(np.exp(t0)), t0, tags[k])


# -- Euclid-Cygan comparison -------------------------------------------------


def euclid_cygan(basis: OrderedBasis, p, q, t_cut: float) -> float:
    """``exp(-(-2t - d_L(p_t, q_t)) / 2)`` at ``t = t_cut`` on the vertical geodesics.

    Once ``t_cut`` is below the first contact height ``t0`` this equals
    ``e^{t0 + 1/2} = e^{1/2} D_M(p, q)`` exactly.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    t0 = first_contact_height(basis, p, q)
    if t0 == -math.inf:
        return 0.0
    if t_cut > t0 - 5.0:
        raise PrecisionError(f"t_cut={t_cut} is not below t0 - 5 = {t0 - 5.0}")
    dl = d_L(basis, SpacePoint(t_cut, p), SpacePoint(t_cut, q))
    return math.exp(-0.5 * (-2.0 * t_cut - dl))


# -- metric axiom audit ------------------------------------------------------


def _dyadic(x, bits: int = 20):
    return np.round(np.asarray(x) * 2.0**bits) / 2.0**bits


def sample_triples(basis: OrderedBasis, sampler, trials: int):
    """``(trials, 3, n)`` triples; every other one collinear and equally spaced.

    The collinear triples ``x, x + v, x + 2v`` use dyadic coordinates so that
    all three differences are exact in floating point.
    """
    sampler = as_sampler(sampler)
    rng = sampler.rng()
    T = sampler.points(rng, 3 * trials, basis.n).reshape(trials, 3, basis.n)
    col = np.arange(trials) % 2 == 1
    x = _dyadic(T[col, 0])
    v = _dyadic(0.5 * (T[col, 1] - T[col, 0]))
    T[col, 0], T[col, 1], T[col, 2] = x, x + v, x + 2 * v
    return T


def quasi_triangle_audit(basis: OrderedBasis, sampler=None, trials: int = 10_000) -> dict:
    """Largest ``D(a, c) / (D(a, b) + D(b, c))`` over sampled triples.

    Ties resolve to the lowest trial index.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    T = sample_triples(basis, sampler, trials)
    _, dac = dm_batch(basis, T[:, 0] - T[:, 2])
    _, dab = dm_batch(basis, T[:, 0] - T[:, 1])
    _, dbc = dm_batch(basis, T[:, 1] - T[:, 2])
    den = dab + dbc
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(den > 0, dac / den, 0.0)
    k = int(np.argmax(ratio))
    return {"maxC": float(ratio[k]), "trial": k, "worst_triple": T[k].copy()}
