"""Boundary self-maps and the structural verifiers run against them.

Maps act on points of R^n written in the ordered basis of an
:class:`~heintze.spectral.OrderedBasis`.  The concrete classes are

* :class:`Triangular`: one function per level, each fed only the
  coordinates at and above its own level, so the flag of foliations
  ``U_{alpha,ell}`` is preserved by construction;
* :class:`AffineQSim`: ``x -> M^s (Lambda R (x + B))`` with ``R`` orthogonal
  and ``Lambda`` an optional positive per-level scale;
* :class:`UnipotentShear`: ``x_i -> x_i + B_i(x_{i+1}, ..., x_n)`` per
  coordinate;
* :class:`Linear` (matrix plus translation) and :class:`Sampled` (any
  callable).

Verifiers only evaluate maps; none of them inspects a map's internals, so
they apply equally to black-box maps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional

import numpy as np

from .boundary import dm_batch, dm_value
from .errors import DomainError, SpecError
from .length import INFINITE, classify_triangle
from .sampling import as_sampler, sphere
from .spectral import OrderedBasis, compare_levels, exp_tA, leaf_level_of_difference

ORTHO_TOL = 1e-10


class BoundaryMap:
    """Base class: a callable ``R^n -> R^n`` tied to an ordered basis."""

    basis: OrderedBasis

    def __call__(self, p) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def n(self) -> int:
        return self.basis.n

    def _check(self, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        if p.shape != (self.n,):
            raise ValueError(f"expected a point of R^{self.n}, got shape {p.shape}")
        return p


def apply(F: BoundaryMap, p) -> np.ndarray:
    return F(p)


# -- map classes --------------------------------------------------------------


class Triangular(BoundaryMap):
    """``F(x)_L = f_L(x_{>=L})`` for every level ``L``.

    ``funcs`` maps levels to callables.  ``f_L`` receives a read-only copy of
    the coordinates at and above ``L`` (its own level first) and returns the
    new level-``L`` coordinates.  Levels without a function are left
    unchanged.
    """

    def __init__(self, basis: OrderedBasis, funcs: Optional[Mapping] = None):
        self.basis = basis
        self.funcs = {basis.resolve_level(lev): f for lev, f in (funcs or {}).items()}

    def __call__(self, p) -> np.ndarray:
        p = self._check(p)
        out = p.copy()
        for lev, f in self.funcs.items():
            sl = self.basis.level_slice(lev)
            suffix = p[sl.start:].copy()
            suffix.setflags(write=False)
            out[sl] = np.asarray(f(suffix), dtype=float).reshape(sl.stop - sl.start)
        return out


def random_triangular(basis: OrderedBasis, rng: np.random.Generator) -> Triangular:
    """Random nonlinear triangular map (used for fuzzing)."""
    funcs = {}
    for lev in basis.ascending:
        sl = basis.level_slice(lev)
        size, rest = sl.stop - sl.start, basis.n - sl.stop
        diag = rng.uniform(0.5, 2.0, size) * rng.choice([-1.0, 1.0], size)
        W = rng.normal(size=(size, rest))
        c = rng.normal(size=size)

        def f(x, diag=diag, W=W, c=c, size=size):
            return diag * x[:size] + np.tanh(W @ x[size:]) + c

        funcs[lev] = f
    return Triangular(basis, funcs)


@dataclass(frozen=True, eq=False)
class Linear(BoundaryMap):
    """``x -> matrix @ x + translation``."""

    basis: OrderedBasis
    matrix: np.ndarray
    translation: Optional[np.ndarray] = None

    def __call__(self, p) -> np.ndarray:
        p = self._check(p)
        out = self.matrix @ p
        return out if self.translation is None else out + self.translation


def identity(basis: OrderedBasis) -> Linear:
    return Linear(basis, np.eye(basis.n))


def dilation(basis: OrderedBasis, t: float) -> Linear:
    """Standard dilation ``delta_t = M^{ln t}``."""
    if not t > 0:
        raise DomainError(f"dilation factor must be positive, got {t}")
    return Linear(basis, exp_tA(basis, math.log(t)))


def translation(basis: OrderedBasis, v) -> Linear:
    return Linear(basis, np.eye(basis.n), np.asarray(v, dtype=float))


def coordinate_swap(basis: OrderedBasis, i: int, j: int) -> Linear:
    P = np.eye(basis.n)
    P[[i, j]] = P[[j, i]]
    return Linear(basis, P)


@dataclass(frozen=True, eq=False)
class Sampled(BoundaryMap):
    """Black-box map from a callable."""

    basis: OrderedBasis
    func: Callable

    def __call__(self, p) -> np.ndarray:
        return np.asarray(self.func(self._check(p)), dtype=float)


def level_rotation(basis: OrderedBasis, blocks: Mapping) -> np.ndarray:
    """Block-diagonal orthogonal matrix from per-level orthogonal blocks."""
    R = np.eye(basis.n)
    for lev, Q in blocks.items():
        sl = basis.level_slice(lev)
        R[sl, sl] = np.asarray(Q, dtype=float)
    return R


class AffineQSim(BoundaryMap):
    """``x -> M^s (Lambda R (x + B))``.

    ``rotation`` is an orthogonal ``n x n`` matrix (``R^T R = I`` to
    ``1e-10``); ``scale`` optionally maps levels to positive factors, which
    make up the diagonal matrix ``Lambda``.
    """

    def __init__(self, basis: OrderedBasis, s: float = 0.0, rotation=None,
                 translation=None, scale: Optional[Mapping] = None):
        self.basis = basis
        self.s = float(s)
        n = basis.n
        R = np.eye(n) if rotation is None else np.array(rotation, dtype=float)
        if R.shape != (n, n):
            raise SpecError(f"rotation must be {n}x{n}")
        if np.max(np.abs(R.T @ R - np.eye(n))) > ORTHO_TOL:
            raise SpecError("rotation is not orthogonal to 1e-10")
        B = np.zeros(n) if translation is None else np.array(translation, dtype=float)
        if B.shape != (n,):
            raise SpecError(f"translation must have length {n}")
        lam = np.ones(n)
        for lev, v in (scale or {}).items():
            if not v > 0:
                raise SpecError(f"scale factors must be positive, got {v}")
            lam[basis.level_slice(lev)] = float(v)
        self.rotation, self.translation, self.scale = R, B, lam
        self._matrix = exp_tA(basis, self.s) @ (lam[:, None] * R)

    @property
    def linear_part(self) -> np.ndarray:
        return self._matrix

    def __call__(self, p) -> np.ndarray:
        return self._matrix @ (self._check(p) + self.translation)

    def compose(self, other: "AffineQSim") -> "AffineQSim":
        """``self o other`` as one :class:`AffineQSim` with ``s`` added.

        Requires ``Lambda_1 R_1`` to commute with ``M^{s_2}`` and ``R_1`` with
        ``Lambda_2``; otherwise :class:`DomainError`.
        """
        L1 = self.scale[:, None] * self.rotation
        E2 = exp_tA(self.basis, other.s)
        tol = 1e-10 * max(1.0, np.max(np.abs(E2)))
        if np.max(np.abs(L1 @ E2 - E2 @ L1)) > tol:
            raise DomainError("left factor does not commute with M^s of the right")
        if np.max(np.abs(self.rotation * other.scale[None, :]
                         - other.scale[:, None] * self.rotation)) > ORTHO_TOL:
            raise DomainError("left rotation does not commute with the right scale")
        L2 = other.scale[:, None] * other.rotation
        B = other.translation + np.linalg.solve(E2 @ L2, self.translation)
        out = AffineQSim(self.basis, self.s + other.s, self.rotation @ other.rotation, B)
        out.scale = self.scale * other.scale
        out._matrix = exp_tA(self.basis, out.s) @ (out.scale[:, None] * out.rotation)
        return out


class UnipotentShear(BoundaryMap):
    """``x_i -> x_i + B_i(x_{i+1}, ..., x_n)`` for each coordinate ``i``.

    ``terms`` maps 0-based coordinate indices to callables receiving the
    coordinates strictly after ``i`` (a read-only array).  All ``B_i`` read
    the input point, not partially updated output.
    """

    def __init__(self, basis: OrderedBasis, terms: Mapping, polys: Optional[dict] = None):
        self.basis = basis
        for i in terms:
            if not 0 <= int(i) < basis.n:
                raise SpecError(f"shear index {i} out of range")
        self.terms = {int(i): f for i, f in sorted(terms.items())}
        self.polys = polys

    def displacement(self, i: int, p) -> float:
        f = self.terms.get(i)
        if f is None:
            return 0.0
        tail = np.array(p[i + 1:], dtype=float)
        tail.setflags(write=False)
        return float(f(tail))

    def __call__(self, p) -> np.ndarray:
        p = self._check(p)
        out = p.copy()
        for i in self.terms:
            out[i] += self.displacement(i, p)
        return out

    def inverse(self) -> "UnipotentShear":
        """Exact inverse by back-substitution from the last coordinate."""
        fwd = self

        def solve_tail(y_tail, start):
            # recover x[start:] from y[start:]
            x = np.array(y_tail, dtype=float)
            for k in range(len(x) - 1, -1, -1):
                i = start + k
                if i in fwd.terms:
                    t = x[k + 1:].copy()
                    t.setflags(write=False)
                    x[k] = x[k] - float(fwd.terms[i](t))
            return x

        def make(i):
            def g(y_tail):
                x_tail = solve_tail(y_tail, i + 1)
                x_tail.setflags(write=False)
                return -float(fwd.terms[i](x_tail))
            return g

        return UnipotentShear(self.basis, {i: make(i) for i in self.terms})


def poly_term(coeffs) -> Callable:
    """Polynomial in the trailing coordinates from ``[[c, [e_1, e_2, ...]], ...]``.

    Exponent lists may be shorter than the tail; missing exponents are 0.
    """
    mons = [(float(c), np.asarray(e, dtype=int)) for c, e in coeffs]

    def f(tail):
        total = 0.0
        for c, e in mons:
            if e.size > len(tail):
                raise SpecError("monomial has more exponents than trailing coordinates")
            total += c * float(np.prod(tail[:e.size] ** e))
        return total

    return f


def shear_from_polys(basis: OrderedBasis, polys: Mapping) -> UnipotentShear:
    """Shear whose terms are :func:`poly_term` polynomials keyed by 0-based index."""
    return UnipotentShear(basis, {i: poly_term(c) for i, c in polys.items()},
                          polys={int(i): c for i, c in polys.items()})


def random_poly_shear(basis: OrderedBasis, rng: np.random.Generator,
                      max_terms: int = 3, max_degree: int = 2) -> UnipotentShear:
    polys = {}
    for i in range(basis.n - 1):
        tail = basis.n - i - 1
        mons = []
        for _ in range(int(rng.integers(1, max_terms + 1))):
            e = rng.integers(0, max_degree + 1, size=tail).tolist()
            mons.append([float(rng.normal() * 0.5), e])
        polys[i] = mons
    polys[basis.n - 1] = [[float(rng.normal()), []]]
    return shear_from_polys(basis, polys)


class LeafwiseAffine(BoundaryMap):
    """``(x, y) -> (M^s R_y (x + B_y), g(y))`` with ``x`` the coordinates of ``x_levels``.

    ``rotation(y)`` and ``translation(y)`` give the leafwise orthogonal part
    and translation; ``g`` defaults to the identity.
    """

    def __init__(self, basis: OrderedBasis, x_levels, rotation: Callable,
                 translation: Callable, s: float = 0.0, g: Optional[Callable] = None):
        self.basis = basis
        mask = np.zeros(basis.n, dtype=bool)
        for lev in x_levels:
            mask[basis.level_slice(lev)] = True
        self.mask = mask
        self.s = float(s)
        self.rotation, self.translation = rotation, translation
        self.g = g if g is not None else (lambda y: y)
        E = exp_tA(basis, self.s)
        self._Ex = E[np.ix_(mask, mask)]

    def split(self, p):
        return p[self.mask], p[~self.mask]

    def join(self, x, y) -> np.ndarray:
        out = np.empty(self.n)
        out[self.mask], out[~self.mask] = x, y
        return out

    def __call__(self, p) -> np.ndarray:
        x, y = self.split(self._check(p))
        R = np.asarray(self.rotation(y), dtype=float)
        return self.join(self._Ex @ (R @ (x + self.translation(y))), self.g(y))


# -- JSON descriptors -----------------------------------------------------------


def map_from_json(basis: OrderedBasis, doc: Mapping) -> BoundaryMap:
    """Build a map from a descriptor document.

    Kinds: ``identity``, ``translation`` (``v``), ``dilation`` (``t``),
    ``linear`` (``matrix``, optional ``translation``), ``affine_qsim``
    (``s``, ``rotation``, ``translation``, optional ``scale`` as a list of
    ``[alpha, ell, factor]``) and ``unipotent_shear`` (``B``: a list of
    ``{"i": <1-based index>, "expr": "poly", "coeffs": [[c, [e...]], ...]}``).
    """
    try:
        kind = doc["kind"]
        if kind == "identity":
            return identity(basis)
        if kind == "translation":
            return translation(basis, doc["v"])
        if kind == "dilation":
            return dilation(basis, float(doc["t"]))
        if kind == "linear":
            M = np.array(doc["matrix"], dtype=float)
            if M.shape != (basis.n, basis.n):
                raise SpecError(f"matrix must be {basis.n}x{basis.n}")
            tr = doc.get("translation")
            return Linear(basis, M, None if tr is None else np.array(tr, dtype=float))
        if kind == "affine_qsim":
            scale = {(a, int(l)): v for a, l, v in doc.get("scale", [])}
            return AffineQSim(basis, doc.get("s", 0.0), doc.get("rotation"),
                              doc.get("translation"), scale)
        if kind == "unipotent_shear":
            polys = {}
            for term in doc["B"]:
                if term.get("expr", "poly") != "poly":
                    raise SpecError("only polynomial shear terms can be serialized")
                polys[int(term["i"]) - 1] = term["coeffs"]
            return shear_from_polys(basis, polys)
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, SpecError):
            raise
        raise SpecError(f"malformed map descriptor: {exc!r}") from None
    raise SpecError(f"unknown map kind {doc.get('kind')!r}")


def map_to_json(F: BoundaryMap) -> dict:
    if isinstance(F, AffineQSim):
        doc = {"kind": "affine_qsim", "s": F.s, "rotation": F.rotation.tolist(),
               "translation": F.translation.tolist()}
        if np.any(F.scale != 1.0):
            doc["scale"] = [[a, l, float(F.scale[F.basis.level_slice((a, l)).start])]
                            for a, l in F.basis.ascending]
        return doc
    if isinstance(F, UnipotentShear) and F.polys is not None:
        return {"kind": "unipotent_shear",
                "B": [{"i": i + 1, "expr": "poly", "coeffs": c} for i, c in sorted(F.polys.items())]}
    if isinstance(F, Linear):
        doc = {"kind": "linear", "matrix": F.matrix.tolist()}
        if F.translation is not None:
            doc["translation"] = F.translation.tolist()
        return doc
    raise SpecError(f"{type(F).__name__} has no JSON form")


# -- verdicts -----------------------------------------------------------------


@dataclass(frozen=True)
class Pass:
    trials: int


@dataclass(frozen=True)
class NotFound:
    trials: int


@dataclass(frozen=True)
class Witness:
    p: np.ndarray
    q: np.ndarray
    image_level: Optional[tuple] = None
    trial: int = -1
    evidence: Optional[dict] = None


# -- bilipschitz constant -----------------------------------------------------


def _pairs(basis: OrderedBasis, rng, R: float, trials: int):
    """Sampled pairs; every other pair differs in one level only, at a random scale."""
    P = rng.uniform(-R, R, size=(trials, basis.n))
    Q = rng.uniform(-R, R, size=(trials, basis.n))
    for k in range(1, trials, 2):
        lev = basis.ascending[int(rng.integers(len(basis.ascending)))]
        sl = basis.level_slice(lev)
        Q[k] = P[k]
        Q[k, sl] += 10.0 ** rng.uniform(-3, 1) * sphere(rng, sl.stop - sl.start)
    return P, Q


def bilip_constant_estimate(basis: OrderedBasis, F: BoundaryMap, sampler=None,
                            trials: int = 1000) -> dict:
    """Sampled lower bounds on the bilipschitz constant of ``F``.

    Returns ``K`` (max of ``ratio`` and ``1/ratio``), ``factor`` (geometric
    midpoint ``sqrt(r_min r_max)``), ``K_qsim = sqrt(r_max / r_min)`` (the
    constant left after dividing out the best similarity factor), the
    class ``"sim"`` or ``"bilip"`` and the witnessing pair for ``K``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sampler = as_sampler(sampler)
    rng = sampler.rng()
    P, Q = _pairs(basis, rng, sampler.R, trials)
    FP = np.array([F(p) for p in P])
    FQ = np.array([F(q) for q in Q])
    _, d0 = dm_batch(basis, P - Q)
    _, d1 = dm_batch(basis, FP - FQ)
    ok = d0 > 0
    if not ok.any():
        raise DomainError("no sampled pair with positive distance")
    ratio = d1[ok] / d0[ok]
    idx = np.nonzero(ok)[0]
    sym = np.maximum(ratio, 1.0 / ratio)
    k = int(np.argmax(sym))
    rmin, rmax = float(ratio.min()), float(ratio.max())
    K_qsim = math.sqrt(rmax / rmin)
    return {
        "K": float(sym[k]),
        "factor": math.sqrt(rmin * rmax),
        "K_qsim": K_qsim,
        "kind": "sim" if K_qsim <= 1 + 1e-9 else "bilip",
        "witness": (P[idx[k]].copy(), Q[idx[k]].copy()),
        "pairs": int(ok.sum()),
    }


# -- foliations ---------------------------------------------------------------


def foliation_check(basis: OrderedBasis, F: BoundaryMap, level, sampler=None,
                    trials: int = 100, tol: float = 1e-9):
    """Sample pairs in one ``U_level`` coset and test that images share a coset.

    Returns :class:`Pass` or the first :class:`Witness`.  ``tol`` is
    relative to the size of the image points.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    level = basis.resolve_level(level)
    below = basis.below_mask(level)
    if not below.any():
        return Pass(trials)
    sampler = as_sampler(sampler)
    rng = sampler.rng()
    for k in range(trials):
        p = rng.uniform(-sampler.R, sampler.R, basis.n)
        q = p.copy()
        q[below] = rng.uniform(-sampler.R, sampler.R, int(below.sum()))
        fp, fq = F(p), F(q)
        scale = max(1.0, float(np.max(np.abs(fp))), float(np.max(np.abs(fq))))
        if np.max(np.abs((fp - fq)[~below])) > tol * scale:
            img = leaf_level_of_difference(basis, fp, fq, tol * scale)
            return Witness(p, q, img, k)
    return Pass(trials)


def nonbilip_witness_via_triangle(basis: OrderedBasis, F: BoundaryMap, level=None,
                                  sampler=None, trials: int = 100, schedule=None,
                                  log_schedule=None, ratio_threshold: float = 1e3):
    """Search for a pair whose chain functional is finite before ``F`` and infinite after.

    Pairs are drawn differing only at ``level`` (every level in turn when
    ``level`` is None), so the source classification is Finite by
    construction and is checked anyway.  A hit is an image classified
    Infinite, or an image lower bound over source upper bound ratio above
    ``ratio_threshold`` and growing along the schedule.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    levels = basis.ascending if level is None else (basis.resolve_level(level),)
    sampler = as_sampler(sampler)
    rng = sampler.rng()
    kw = {"schedule": schedule, "log_schedule": log_schedule}
    for k in range(trials):
        lev = levels[k % len(levels)]
        sl = basis.level_slice(lev)
        p = rng.uniform(-sampler.R, sampler.R, basis.n)
        q = p.copy()
        q[sl] += rng.uniform(0.5, 2.0) * sphere(rng, sl.stop - sl.start)
        src = classify_triangle(basis, p, q, lev, **kw)
        if src.kind != "finite":
            continue
        img = classify_triangle(basis, F(p), F(q), lev, **kw)
        ratios = [b.lower / a.upper for a, b in zip(src.evidence, img.evidence)]
        growing = all(r1 >= r0 for r0, r1 in zip(ratios, ratios[1:]))
        if img.kind == INFINITE or (ratios[-1] > ratio_threshold and growing):
            return Witness(p, q, lev, k, {"source": src.to_dict(), "image": img.to_dict(),
                                          "ratios": ratios})
    return NotFound(trials)


# -- modulus of continuity along leaves -----------------------------------------


@dataclass(frozen=True)
class ModulusCurve:
    w: np.ndarray
    sup: np.ndarray
    envelope: np.ndarray = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "envelope", np.maximum.accumulate(self.sup))


def upsilon(basis: OrderedBasis, level, w: float) -> float:
    """``D_M`` of a difference of size ``w`` along the first slot of ``level``."""
    d = np.zeros(basis.n)
    d[basis.level_slice(level).start] = w
    return dm_value(basis, d, np.zeros(basis.n))


def _require_below(basis, source_level, target_level):
    if compare_levels(basis, source_level, target_level) != -1:
        raise DomainError(f"target {target_level} must lie below source {source_level}")


def xi_modulus_curve(basis: OrderedBasis, F: BoundaryMap, source_level, target_level,
                     grid, sampler=None, trials: int = 50) -> ModulusCurve:
    """Observed ``sup |F(p)_target - F(q)_target|`` for ``|p - q| = w`` at ``source_level``."""
    source_level = basis.resolve_level(source_level)
    target_level = basis.resolve_level(target_level)
    _require_below(basis, source_level, target_level)
    sampler = as_sampler(sampler)
    rng = sampler.rng()
    src, tgt = basis.level_slice(source_level), basis.level_slice(target_level)
    w = np.sort(np.asarray(grid, dtype=float))
    sup = np.zeros_like(w)
    for a, wa in enumerate(w):
        for _ in range(trials):
            p = rng.uniform(-sampler.R, sampler.R, basis.n)
            q = p.copy()
            q[src] += wa * sphere(rng, src.stop - src.start)
            sup[a] = max(sup[a], float(np.max(np.abs(F(p)[tgt] - F(q)[tgt]))))
    return ModulusCurve(w, sup)


def xi_recursive_bound(basis: OrderedBasis, K: float, source_level, target_level,
                       w: float, eps: Optional[float] = None) -> float:
    """Inductive bound on the target displacement for a ``K``-bilipschitz map.

    ``Xi_top = K^a Y^a`` at the top level of the target eigenvalue and
    ``Xi_l = K^a Y^a + sum_{k > l} (|t| + eps)^(k-l)/(k-l)! Xi_k`` below, with
    ``Y`` the source distance and ``t = ln Y``.  ``eps`` defaults to
    ``ln K + 1e-9``, the height window a ``K``-bilipschitz map allows.
    """
    source_level = basis.resolve_level(source_level)
    alpha, ell = basis.resolve_level(target_level)
    _require_below(basis, source_level, (alpha, ell))
    if eps is None:
        eps = math.log(K) + 1e-9
    Y = upsilon(basis, source_level, w)
    t = abs(math.log(Y))
    top = max(l for a, l in basis.ascending if a == alpha)
    base = (K * Y) ** alpha
    xi = {}
    for k in range(top, ell - 1, -1):
        xi[k] = base + sum((t + eps) ** (m - k) / math.factorial(m - k) * xi[m]
                           for m in range(k + 1, top + 1))
    return xi[ell]


# -- leafwise rotations ---------------------------------------------------------


def rotation_blowup_experiment(basis: OrderedBasis, G: LeafwiseAffine, y, y_prime,
                               radii=(1.0, 10.0, 100.0, 1000.0), tol: float = 1e-9) -> dict:
    """Displacement of leafwise rotations along pairs with fixed preimage distance.

    For each radius ``r``, ``z`` is ``r`` times the top right singular vector
    of ``R_y - R_y'``; the pair ``(z - B_y, y)``, ``(z - B_y', y')`` has a
    difference independent of ``r``.  Reports ``(r, |R_y z - R_y' z|, D_M)``
    rows and the status ``"violation"`` (displacement linear in ``r`` with
    constant preimage distance) or ``"no_blowup"``.
    """
    y = np.asarray(y, dtype=float)
    y_prime = np.asarray(y_prime, dtype=float)
    Ry, Ryp = np.asarray(G.rotation(y), float), np.asarray(G.rotation(y_prime), float)
    By, Byp = np.asarray(G.translation(y), float), np.asarray(G.translation(y_prime), float)
    D = Ry - Ryp
    _, svals, Vt = np.linalg.svd(D)
    sigma = float(svals[0])
    if sigma <= 1e-10:
        return {"status": "no_blowup", "sigma": sigma, "rows": []}
    v = Vt[0]
    rows = []
    for r in radii:
        z = r * v
        p, q = G.join(z - By, y), G.join(z - Byp, y_prime)
        disp = float(np.linalg.norm(Ry @ z - Ryp @ z))
        rows.append({"r": float(r), "displacement": disp, "slope": disp / r,
                     "preimage_dM": dm_value(basis, p, q)})
    d0 = rows[0]["preimage_dM"]
    constant = all(abs(row["preimage_dM"] - d0) <= tol * max(1.0, d0) for row in rows)
    linear = all(abs(row["slope"] - sigma) <= tol * max(1.0, sigma) for row in rows)
    unbounded = len(rows) > 1 and rows[-1]["displacement"] > rows[0]["displacement"]
    status = "violation" if constant and linear and unbounded else "inconclusive"
    return {"status": status, "sigma": sigma, "rows": rows}


# -- unipotent cocycles -------------------------------------------------------


def _iterate(gamma: UnipotentShear, y, n: int) -> np.ndarray:
    orbit = [np.asarray(y, dtype=float)]
    for _ in range(n):
        orbit.append(gamma(orbit[-1]))
    return np.array(orbit)


def cocycle_iterate_check(basis: OrderedBasis, gamma: UnipotentShear, y, n: int) -> float:
    """Largest scaled residual of ``B_{i,gamma^n}(y) = sum_{s<n} B_{i,gamma}(gamma^s y)``.

    The left side is read off ``gamma`` composed ``n`` times; the right side
    sums the one-step displacements along the orbit.  Each residual is
    divided by ``max(1, |y_i|, sum_s |B_{i,gamma}(gamma^s y)|)``.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    orbit = _iterate(gamma, y, n)
    worst = 0.0
    for i in range(basis.n):
        lhs = orbit[n, i] - orbit[0, i]
        steps = [gamma.displacement(i, orbit[s]) for s in range(n)]
        rhs = math.fsum(steps)
        scale = max(1.0, abs(orbit[0, i]), math.fsum(abs(b) for b in steps))
        worst = max(worst, abs(lhs - rhs) / scale)
    return worst


def shear_bound_experiment(basis: OrderedBasis, gamma: UnipotentShear, i: int, y, y_prime,
                           n_max: int = 32) -> dict:
    """Averaging bound on the oscillation of one shear term.

    For each ``n <= n_max`` it records ``osc_n = |B_{i,gamma^n}(y) -
    B_{i,gamma^n}(y')|``, the drift ``chi_n = max_{s<n} |B_{i,gamma}(gamma^s y)
    - B_{i,gamma}(y)|`` (and the same at ``y'``) and the bound
    ``osc_n / n + 2 chi_n`` on the one-step oscillation
    ``|B_{i,gamma}(y) - B_{i,gamma}(y')|``.
    """
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    A = _iterate(gamma, y, n_max)
    B = _iterate(gamma, y_prime, n_max)
    step = abs(gamma.displacement(i, A[0]) - gamma.displacement(i, B[0]))
    dA = [gamma.displacement(i, A[s]) for s in range(n_max)]
    dB = [gamma.displacement(i, B[s]) for s in range(n_max)]
    rows = []
    chi = 0.0
    for n in range(1, n_max + 1):
        chi = max(chi, abs(dA[n - 1] - dA[0]), abs(dB[n - 1] - dB[0]))
        osc = abs((A[n, i] - A[0, i]) - (B[n, i] - B[0, i]))
        rows.append({"n": n, "osc": osc, "avg": osc / n, "chi": chi, "bound": osc / n + 2 * chi})
    holds = all(step <= r["bound"] * (1 + 1e-12) + 1e-12 for r in rows)
    return {"step_oscillation": step, "bound_holds": holds, "rows": rows}
