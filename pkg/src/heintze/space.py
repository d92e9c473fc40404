"""The model space ``G_M``: level metrics, first contact height and ``d_L``.

A point of ``G_M`` is a pair ``(t, p)`` of a height and a fiber point.  The
level set at height ``t`` carries ``d_{t,M}(p, q) = |e^{-tA}(p - q)|_inf``.
Because every eigenvalue of ``A`` is positive this tends to infinity as
``t -> -inf`` and to zero as ``t -> +inf``; the first height at which it
drops to 1 is the quantity everything else is built on.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.optimize import brentq

from .sampling import as_sampler
from .spectral import OrderedBasis, exp_tA

CROSS_RTOL = 1e-12
XTOL = 1e-14


class SpacePoint(NamedTuple):
    t: float
    p: np.ndarray


def height(x: SpacePoint) -> float:
    return x.t


def vertical_geodesic(basis: OrderedBasis, p, t: float) -> SpacePoint:
    """Point at height ``t`` on the vertical geodesic through ``p``."""
    p = np.asarray(p, dtype=float)
    if p.shape != (basis.n,):
        raise ValueError(f"expected a point of R^{basis.n}")
    return SpacePoint(float(t), p)


def level_metric(basis: OrderedBasis, t: float, p, q) -> float:
    delta = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    return float(np.max(np.abs(exp_tA(basis, -t) @ delta)))


# -- first contact height ---------------------------------------------------


def component_polys(basis: OrderedBasis, delta) -> np.ndarray:
    """Coefficients ``C`` with ``(e^{-tA} delta)_i = e^{-alpha_i t} sum_m C[i, m] t^m``."""
    delta = np.asarray(delta, dtype=float)
    C = np.empty((basis.n, basis.max_size))
    fact = 1.0
    for m in range(basis.max_size):
        if m:
            fact *= m
        C[:, m] = ((-1) ** m / fact) * (basis.nilpotent_power(m) @ delta)
    return C


def _abs_components(alphas, C, t):
    """``|e^{-alpha t} P(t)|`` per row, in log space to dodge inf*0.

    ``t`` may be a scalar (result shape ``(n,)``) or an array of heights
    (result shape ``(n, len(t))``).
    """
    if np.ndim(t):
        t = np.asarray(t)[None, :]
        alphas = alphas[:, None]
        C = C[:, :, None]
    poly = C[:, -1] * 1.0
    for m in range(C.shape[1] - 2, -1, -1):
        poly = poly * t + C[:, m]
    with np.errstate(divide="ignore", over="ignore"):
        return np.exp(-alphas * t + np.log(np.abs(poly)))


def _real_roots(coeffs) -> list:
    """Real parts of all roots of ``sum coeffs[m] t^m`` (extra points are harmless)."""
    c = np.trim_zeros(np.asarray(coeffs, dtype=float), "b")
    if c.size <= 1:
        return []
    if c.size == 2:
        return [-c[0] / c[1]]
    if c.size == 3:
        a, b, cc = c[2], c[1], c[0]
        disc = b * b - 4 * a * cc
        if disc < 0:
            return [-b / (2 * a)]
        sq = math.sqrt(disc)
        q = -0.5 * (b + math.copysign(sq, b))
        out = [q / a]
        if q != 0:
            out.append(cc / q)
        return out
    return list(np.roots(c[::-1]).real)


def _lower_bound(alphas, C) -> float:
    """Heights below this are certified to have level distance > 1.

    A component whose polynomial is a nonzero constant ``c`` exceeds 1 for
    ``t < ln|c| / alpha``; the top nonzero coordinate of every chain is one.
    """
    const = np.all(C[:, 1:] == 0, axis=1) & (C[:, 0] != 0)
    return float(np.max(np.log(np.abs(C[const, 0])) / alphas[const]))


def _solve_t0(basis: OrderedBasis, delta):
    """First contact height and the index of the component attaining it."""
    alphas = basis.alphas
    C = component_polys(basis, delta)
    live = np.any(C != 0, axis=1)
    if not live.any():
        return -math.inf, None
    alphas, C = alphas[live], C[live]
    rows = np.nonzero(live)[0]

    def norm(t):
        return np.max(_abs_components(alphas, C, t), axis=0)

    lo = _lower_bound(alphas, C)
    if norm(lo) <= 1.0 + CROSS_RTOL:
        return lo, int(rows[np.argmax(_abs_components(alphas, C, lo))])

    step = 1.0
    hi = lo + step
    while norm(hi) > 1.0:
        step *= 2.0
        hi = lo + step

    # Every boundary point of {t : norm(t) <= 1} is a point where some
    # component has modulus 1.  Each modulus is monotone between zeros of
    # its polynomial and of its derivative, so all such points are found by
    # one bracketed solve per monotone piece.
    cands = [lo]
    for i in range(C.shape[0]):
        a = alphas[i]
        P = C[i]
        dP = np.append(P[1:] * np.arange(1, P.size), 0.0) - a * P
        breaks = [x for x in _real_roots(P) + _real_roots(dP) if lo < x < hi]
        knots = [lo] + sorted(breaks) + [hi]

        def phi(t, a=a, P=P):
            v = abs(np.polynomial.polynomial.polyval(t, P))
            if v == 0.0:
                return -1.0
            return math.expm1(min(-a * t + math.log(v), 700.0))

        vals = [phi(k) for k in knots]
        for k, v in zip(knots, vals):
            if abs(v) <= CROSS_RTOL:
                cands.append(k)
        for (x0, v0), (x1, v1) in zip(zip(knots, vals), zip(knots[1:], vals[1:])):
            if v0 * v1 < 0:
                cands.append(brentq(phi, x0, x1, xtol=XTOL, rtol=4 * np.finfo(float).eps))

    for c in sorted(cands):
        if norm(c) <= 1.0 + CROSS_RTOL:
            return c, int(rows[np.argmax(_abs_components(alphas, C, c))])
    # not reached for well-posed input; fall back to a scan
    t0 = first_crossing(norm, lo, hi)
    return t0, int(rows[np.argmax(_abs_components(alphas, C, t0))])


def first_contact_height(basis: OrderedBasis, p, q) -> float:
    """Smallest ``t`` with ``|e^{-tA}(p - q)|_inf <= 1``; ``-inf`` when ``p == q``."""
    delta = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    return _solve_t0(basis, delta)[0]


def first_crossing(f, lo: float, hi: float, *, step: float = 0.5,
                   min_step: float = 1.0 / 256, xtol: float = 1e-13) -> float:
    """First point of ``[lo, hi]`` where ``f`` drops to 1, by scan and bisection.

    ``f`` must accept an array of heights.  Requires ``f(lo) > 1 >= f(hi)``.
    The whole range ``[lo, b]`` is rescanned with half the step until the
    first-crossing bracket ``[a, b]`` stops moving (and the step is at most
    ``min_step``); the bracket is then bisected.  Dips narrower than the
    final grid can be missed, which is why :func:`first_contact_height`
    does not rely on this routine.
    """
    prev = None
    while True:
        n = max(2, int(math.ceil((hi - lo) / step)) + 1)
        grid = np.linspace(lo, hi, n)
        k = int(np.argmax(np.asarray(f(grid)) <= 1.0))
        a, b = grid[max(k - 1, 0)], grid[k]
        stable = prev is not None and a >= prev[0] - 1e-15
        prev = (a, b)
        if stable and step <= min_step:
            break
        step /= 2.0
        hi = b
    a, b = prev
    while b - a > xtol:
        mid = 0.5 * (a + b)
        if f(np.array([mid]))[0] <= 1.0:
            b = mid
        else:
            a = mid
    return float(b)


# -- the path metric -------------------------------------------------------


def d_L(basis: OrderedBasis, x: SpacePoint, y: SpacePoint) -> float:
    """Model metric on ``G_M``.

    With ``t0`` the first contact height of the two fibers: if
    ``t0 >= max(t, t')`` the distance is ``|t - t0| + |t0 - t'| + 1``;
    otherwise it is ``(t - t') + |e^{-tA}(p - q)|`` with the pair ordered
    so that ``t >= t'``.
    """
    (t, p), (s, q) = x, y
    t0 = first_contact_height(basis, p, q)
    if t0 >= max(t, s):
        return abs(t - t0) + abs(t0 - s) + 1.0
    if t < s:
        t, s = s, t
    return (t - s) + level_metric(basis, t, p, q)


def dl_triangle_audit(basis: OrderedBasis, sampler=None, trials: int = 1000,
                      height_range: float = 10.0) -> dict:
    """Largest ``d_L(x, z) / (d_L(x, y) + d_L(y, z))`` over sampled triples.

    ``d_L`` is only claimed to be bilipschitz to a metric, so this is
    reported, not asserted.
    """
    sampler = as_sampler(sampler)
    rng = sampler.rng()
    worst, worst_i, worst_triple = -math.inf, -1, None
    for i in range(trials):
        pts = sampler.points(rng, 3, basis.n)
        hs = rng.uniform(-height_range, height_range, size=3)
        a, b, c = (SpacePoint(float(h), p) for h, p in zip(hs, pts))
        den = d_L(basis, a, b) + d_L(basis, b, c)
        ratio = d_L(basis, a, c) / den if den > 0 else 0.0
        if ratio > worst:
            worst, worst_i, worst_triple = ratio, i, (a, b, c)
    return {"maxC": worst, "trial": worst_i, "worst_triple": worst_triple}
