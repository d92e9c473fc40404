"""Chain functionals of ``D_M`` and the Zero / Finite / Infinite trichotomy.

For the gauge ``eta_{alpha,j}(w) = j! w^alpha / |ln w|^j`` the chain
functional of a pair is the ``liminf`` over ``k`` of the cheapest chain
``p = p_0, ..., p_m = q`` with every step at distance ``1/k``, each step
costing ``eta(1/k)``.  The infimum over chains is never searched; each
``k`` is bracketed by

* an **upper** bound: straight segments, one per level in which ``p`` and
  ``q`` differ, cut into steps of distance ``1/k`` (a shorter last step
  per segment);
* a **lower** bound valid for every chain of ``1/k`` steps: for every
  coordinate ``i`` of eigenvalue ``beta``, each step moves
  ``sum_m L^m/m! (N^m delta)_i`` by at most ``k^-beta`` (``L = ln k``),
  and these moves add up to the total.

A level ``(alpha, ell)`` is measured with the gauge of index ``ell - 1``
(its nilpotency depth): a step of size ``s`` at that level of a chain has
``D_M = 1/k`` exactly when ``s = k^-alpha min_m m!/L^m`` over ``m <= ell-1``,
which is ``(ell-1)!/(k^alpha L^(ell-1))`` once ``L >= ell - 1``.

Everything is evaluated in ``log k`` so that schedules reaching
``k = e^(10^9)`` are routine; the logarithmic rates of the same-eigenvalue
cases need them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError
from .space import component_polys
from .spectral import OrderedBasis

DEFAULT_LOG_SCHEDULE = (2.0**5, 2.0**10, 2.0**20, 2.0**30)
MIN_LOG_K = math.log(3.0)

ZERO, FINITE, INFINITE, INCONCLUSIVE = "zero", "finite", "infinite", "inconclusive"


def eta(alpha: float, j: int, w: float) -> float:
    """``j! w^alpha / |ln w|^j`` for ``0 < w < 1``."""
    if not 0.0 < w < 1.0:
        raise DomainError(f"eta is defined on (0, 1), got w={w}")
    return math.factorial(j) * w**alpha / abs(math.log(w)) ** j


def log_eta_inv_k(alpha: float, j: int, log_k: float) -> float:
    """``log eta_{alpha,j}(1/k)`` in terms of ``log k``."""
    return math.lgamma(j + 1) - alpha * log_k - j * math.log(log_k)


def log_step_size(beta: float, depth: int, log_k: float) -> float:
    """Log of the largest single-level step with ``D_M = 1/k``."""
    L = log_k
    worst = max(m * math.log(L) - math.lgamma(m + 1) for m in range(depth + 1))
    return -beta * L - worst


@dataclass(frozen=True)
class ChainBound:
    log_k: float
    upper: float
    lower: float

    @property
    def k(self) -> float:
        return math.exp(self.log_k) if self.log_k < 700 else math.inf


@dataclass(frozen=True)
class Classification:
    kind: str
    value: float = math.nan
    evidence: tuple = field(default_factory=tuple)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "value": self.value,
            "evidence": [{"log_k": b.log_k, "upper": b.upper, "lower": b.lower}
                         for b in self.evidence],
        }


def _log_k(k, log_k) -> float:
    if log_k is None:
        if k is None:
            raise TypeError("give k or log_k")
        log_k = math.log(k)
    if log_k < MIN_LOG_K:
        raise DomainError(f"chain bounds need k >= 3, got log k = {log_k}")
    return float(log_k)


def chain_upper_bound(basis: OrderedBasis, p, q, level, k=None, *, log_k=None) -> float:
    """Cost of the concatenated straight-segment chain at step ``1/k``."""
    L = _log_k(k, log_k)
    alpha, ell = basis.resolve_level(level)
    log_eta = log_eta_inv_k(alpha, ell - 1, L)
    delta = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    total = 0.0
    for lev in basis.ascending:
        amount = float(np.max(np.abs(delta[basis.level_slice(lev)])))
        if amount == 0.0:
            continue
        log_m = math.log(amount) - log_step_size(lev[0], lev[1] - 1, L)
        if log_m < 50.0:
            log_m = math.log(math.ceil(math.exp(log_m) * (1 - 1e-15)))
        with np.errstate(over="ignore"):
            total += float(np.exp(log_m + log_eta))
    return total


def chain_lower_bound(basis: OrderedBasis, p, q, level, k=None, *, log_k=None) -> float:
    """Lower bound on the cost of *every* chain of ``1/k`` steps from ``p`` to ``q``."""
    L = _log_k(k, log_k)
    alpha, ell = basis.resolve_level(level)
    depth = ell - 1
    delta = np.asarray(p, dtype=float) - np.asarray(q, dtype=float)
    C = component_polys(basis, delta)
    moved = np.abs(np.polynomial.polynomial.polyval(-L, C.T))
    best = -math.inf
    for i in np.nonzero(moved)[0]:
        beta = basis.alphas[i]
        v = ((beta - alpha) * L + math.lgamma(depth + 1) - depth * math.log(L)
             + math.log(moved[i]))
        best = max(best, v)
    with np.errstate(over="ignore"):
        return float(np.exp(best)) if best > -math.inf else 0.0


def _nonincreasing(xs) -> bool:
    return all(b <= a * (1 + 1e-12) for a, b in zip(xs, xs[1:]))


def _nondecreasing(xs) -> bool:
    return all(b >= a * (1 - 1e-12) for a, b in zip(xs, xs[1:]))


def classify_triangle(basis: OrderedBasis, p, q, level, schedule=None, *,
                      log_schedule=None, diverge: float = 1e3,
                      vanish: float = 1e-6, rel_tol: float = 0.05) -> Classification:
    """Decide whether the chain functional at ``level`` is 0, finite or infinite.

    ``schedule`` lists values of ``k``; ``log_schedule`` lists ``log k``
    directly (default :data:`DEFAULT_LOG_SCHEDULE`).  At least three
    entries, increasing.  Finite needs the final bounds within ``rel_tol``
    of each other and the last two midpoints within ``rel_tol``; bounds
    that fail to settle give an ``"inconclusive"`` classification rather
    than an exception.
    """
    if log_schedule is None:
        log_schedule = (DEFAULT_LOG_SCHEDULE if schedule is None
                        else [math.log(k) for k in schedule])
    log_schedule = [float(x) for x in log_schedule]
    if len(log_schedule) < 3 or any(b <= a for a, b in zip(log_schedule, log_schedule[1:])):
        raise DomainError("schedule must be increasing with at least 3 entries")
    level = basis.resolve_level(level)
    evidence = tuple(
        ChainBound(L, chain_upper_bound(basis, p, q, level, log_k=L),
                   chain_lower_bound(basis, p, q, level, log_k=L))
        for L in log_schedule
    )
    uppers = [b.upper for b in evidence]
    lowers = [b.lower for b in evidence]
    if lowers[-1] > diverge and _nondecreasing(lowers):
        return Classification(INFINITE, math.inf, evidence)
    if uppers[-1] < vanish and _nonincreasing(uppers):
        return Classification(ZERO, 0.0, evidence)
    up, lo = uppers[-1], lowers[-1]
    mid, prev = 0.5 * (up + lo), 0.5 * (uppers[-2] + lowers[-2])
    settled = abs(mid - prev) <= rel_tol * mid
    if math.isfinite(up) and lo > 0 and up - lo <= rel_tol * lo and settled:
        return Classification(FINITE, mid, evidence)
    return Classification(INCONCLUSIVE, math.nan, evidence)
