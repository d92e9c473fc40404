"""Jordan data of ``A = log M`` and the flag-ordered coordinate system.

Coordinate layout
-----------------
Coordinates of a point of R^n are laid out by *level* ``(alpha, ell)``:
eigenvalues ascending, and inside one eigenvalue the nilpotency level
``ell`` ascending::

    (x_{a,1}, x_{a,2}, ..., x_{b,1}, ...)      a < b

Inside a level the slots follow chain declaration order: slot ``c`` holds
the level-``ell`` vector of the ``c``-th declared chain among those of size
at least ``ell``.  Level ``ell`` of a chain is ``(A - alpha)^(size-ell) v``,
so the nilpotent part of ``A`` maps level ``ell`` onto level ``ell - 1`` of
the same chain.  In this layout ``A`` is a permuted Jordan form, and the
coordinates of the levels at or above a given level form a contiguous
suffix.

Order on levels
---------------
``(b, j) < (a, l)`` iff ``b < a``, or ``b == a`` and ``j < l``.  The flag
space ``U_{a,l}`` is spanned by the levels strictly below ``(a, l)`` and is
invariant under ``exp(tA)``.  Levels higher in this order *take precedence*;
:attr:`OrderedBasis.levels` lists them in precedence order (highest first)
and :func:`compare_levels` answers "does ``a`` precede ``b``".
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import DomainError, SpecError

Level = tuple  # (alpha: float, ell: int)

LEVEL_ATOL = 1e-12


@dataclass(frozen=True)
class JordanSpec:
    """Eigenvalues ``alpha > 0`` of ``A`` with their Jordan block sizes.

    Blocks are canonicalized on construction: entries with the same
    eigenvalue are merged (sizes concatenated in declaration order) and the
    eigenvalues are stored in increasing order.
    """

    blocks: tuple

    def __post_init__(self):
        merged: dict[float, list[int]] = {}
        for entry in self.blocks:
            try:
                alpha, sizes = entry
            except (TypeError, ValueError):
                raise SpecError(f"block must be (alpha, sizes), got {entry!r}") from None
            if isinstance(alpha, complex) or np.iscomplexobj(alpha):
                raise SpecError("complex eigenvalues are not supported")
            alpha = float(alpha)
            if not math.isfinite(alpha) or alpha <= 0:
                raise SpecError(f"eigenvalues of A must be positive, got {alpha}")
            if isinstance(sizes, (int, np.integer)):
                sizes = [sizes]
            sizes = list(sizes)
            if not sizes:
                raise SpecError(f"no Jordan blocks given for alpha={alpha}")
            for s in sizes:
                if isinstance(s, bool) or int(s) != s or int(s) < 1:
                    raise SpecError(f"Jordan block sizes must be positive integers, got {s!r}")
            key = next((a for a in merged if abs(a - alpha) <= LEVEL_ATOL), alpha)
            merged.setdefault(key, []).extend(int(s) for s in sizes)
        if not merged:
            raise SpecError("empty Jordan spec")
        canon = tuple((a, tuple(merged[a])) for a in sorted(merged))
        object.__setattr__(self, "blocks", canon)

    @property
    def n(self) -> int:
        return sum(sum(sizes) for _, sizes in self.blocks)

    @property
    def is_diagonal(self) -> bool:
        return all(s == 1 for _, sizes in self.blocks for s in sizes)

    # -- serialization -------------------------------------------------------

    @classmethod
    def from_dict(cls, data: dict) -> "JordanSpec":
        try:
            blocks = [(b["alpha"], b["sizes"]) for b in data["blocks"]]
        except (KeyError, TypeError) as exc:
            raise SpecError(f"malformed spec document: {exc}") from None
        return cls(tuple(blocks))

    def to_dict(self) -> dict:
        return {"blocks": [{"alpha": a, "sizes": list(s)} for a, s in self.blocks]}

    @classmethod
    def from_json(cls, text: str) -> "JordanSpec":
        return cls.from_dict(json.loads(text))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_matrix(cls, M, P, blocks, atol: float = 1e-9) -> "JordanSpec":
        """Accept a matrix ``M`` together with a change-of-basis certificate.

        ``P`` must map the ordered basis of ``blocks`` to the standard basis,
        i.e. ``P^{-1} M P == exp(A_J)`` where ``A_J`` is the Jordan form laid
        out as described in the module docstring.  The matrix itself is
        discarded once checked.
        """
        spec = cls(tuple(blocks))
        M = np.asarray(M, dtype=float)
        P = np.asarray(P, dtype=float)
        if M.shape != (spec.n, spec.n) or P.shape != (spec.n, spec.n):
            raise SpecError(f"expected {spec.n}x{spec.n} matrices")
        conj = np.linalg.solve(P, M @ P)
        target = exp_tA(build_basis(spec), 1.0)
        err = np.max(np.abs(conj - target))
        if not err <= atol:
            raise SpecError(f"certificate rejected: |P^-1 M P - exp(J)| = {err:.3e}")
        return spec


class CoordIndex(NamedTuple):
    alpha: float
    ell: int
    slot: int

    @property
    def level(self) -> Level:
        return (self.alpha, self.ell)


class Chain(NamedTuple):
    alpha: float
    size: int
    positions: tuple  # coordinate positions of levels 1..size


class OrderedBasis:
    """Flag-ordered basis for a :class:`JordanSpec`.

    Attributes
    ----------
    spec : JordanSpec
    n : int
    index_of : tuple of CoordIndex
        ``index_of[i]`` is the level/slot of coordinate ``i``.
    levels : tuple of (alpha, ell)
        Distinct levels in precedence order (highest first).
    ascending : tuple of (alpha, ell)
        Same levels, lowest first; ``ascending[i-1]`` is the level numbered
        ``i`` in the ``(x_1, ..., x_r)`` notation.
    alphas : ndarray
        Eigenvalue attached to each coordinate.
    nilpotent : ndarray
        The nilpotent part ``N = A - diag(alphas)``.
    chains : tuple of Chain
    """

    def __init__(self, spec: JordanSpec):
        self.spec = spec
        n = spec.n
        self.n = n
        index_of = []
        chains_pos: list[list[list[int]]] = []
        for alpha, sizes in spec.blocks:
            pos_by_chain = [[] for _ in sizes]
            for ell in range(1, max(sizes) + 1):
                slot = 0
                for c, size in enumerate(sizes):
                    if size >= ell:
                        pos_by_chain[c].append(len(index_of))
                        index_of.append(CoordIndex(alpha, ell, slot))
                        slot += 1
            chains_pos.append(pos_by_chain)

        self.index_of = tuple(index_of)
        chains = []
        for (alpha, sizes), pos_by_chain in zip(spec.blocks, chains_pos):
            for size, pos in zip(sizes, pos_by_chain):
                chains.append(Chain(alpha, size, tuple(pos)))
        self.chains = tuple(chains)

        N = np.zeros((n, n))
        for ch in self.chains:
            for lo, hi in zip(ch.positions[:-1], ch.positions[1:]):
                N[lo, hi] = 1.0
        self.nilpotent = _frozen(N)
        self.alphas = _frozen(np.array([ix.alpha for ix in index_of]))
        self.max_size = max(max(s) for _, s in spec.blocks)

        powers = [np.eye(n)]
        for _ in range(1, self.max_size):
            powers.append(powers[-1] @ N)
        self._npowers = tuple(_frozen(Pm) for Pm in powers)

        asc = []
        slices = {}
        for i, ix in enumerate(index_of):
            lev = ix.level
            if not asc or asc[-1] != lev:
                asc.append(lev)
                slices[lev] = [i, i + 1]
            else:
                slices[lev][1] = i + 1
        self.ascending = tuple(asc)
        self.levels = tuple(reversed(asc))
        self._slices = {lev: slice(a, b) for lev, (a, b) in slices.items()}
        self._rank = {lev: r for r, lev in enumerate(asc)}
        self.level_sizes = tuple(slices[lev][1] - slices[lev][0] for lev in asc)

    # -- level bookkeeping ---------------------------------------------------

    def resolve_level(self, level) -> Level:
        """Return the stored level matching ``level``; ``IndexError`` if none."""
        try:
            a, ell = level
        except (TypeError, ValueError):
            raise IndexError(f"not a level: {level!r}") from None
        for lev in self.ascending:
            if lev[1] == ell and abs(lev[0] - float(a)) <= LEVEL_ATOL:
                return lev
        raise IndexError(f"level {level!r} does not occur in {self.spec.blocks!r}")

    def rank(self, level) -> int:
        """0-based position of ``level`` in the ascending order."""
        return self._rank[self.resolve_level(level)]

    def level_number(self, level) -> int:
        """1-based index ``i`` of ``level`` in the ``(x_1, ..., x_r)`` numbering."""
        return self.rank(level) + 1

    def level_slice(self, level) -> slice:
        return self._slices[self.resolve_level(level)]

    def below_mask(self, level) -> np.ndarray:
        """Boolean mask of the coordinates spanning ``U_{level}``."""
        start = self.level_slice(level).start
        mask = np.zeros(self.n, dtype=bool)
        mask[:start] = True
        return mask

    def level_of(self, i: int) -> Level:
        return self.index_of[i].level

    def depth(self, level) -> int:
        """Nilpotency depth ``ell - 1`` of a level."""
        return self.resolve_level(level)[1] - 1

    def nilpotent_power(self, m: int) -> np.ndarray:
        if m >= self.max_size:
            return np.zeros((self.n, self.n))
        return self._npowers[m]

    @property
    def A(self) -> np.ndarray:
        return np.diag(self.alphas) + self.nilpotent

    def __repr__(self):
        return f"OrderedBasis({self.spec.blocks!r})"


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def build_basis(spec: JordanSpec | Sequence) -> OrderedBasis:
    """Build the ordered basis of a spec (or of raw ``(alpha, sizes)`` blocks)."""
    if not isinstance(spec, JordanSpec):
        spec = JordanSpec(tuple(spec))
    return OrderedBasis(spec)


def compare_levels(basis: OrderedBasis, a, b) -> int:
    """Compare two levels by precedence.

    Returns -1 when ``a`` precedes ``b`` (larger eigenvalue, or same
    eigenvalue and larger ``ell``), 0 when equal and 1 otherwise.
    """
    ra, rb = basis.rank(a), basis.rank(b)
    return (ra < rb) - (ra > rb)


def exp_tA(basis: OrderedBasis, t: float) -> np.ndarray:
    """``exp(tA)`` in closed form, ``e^{t alpha} sum_m t^m N^m / m!`` per block."""
    t = float(t)
    out = np.zeros((basis.n, basis.n))
    coef = 1.0
    for m in range(basis.max_size):
        if m:
            coef *= t / m
        out += coef * basis.nilpotent_power(m)
    return np.exp(t * basis.alphas)[:, None] * out


def standard_dilation(basis: OrderedBasis, t: float, p) -> np.ndarray:
    """``delta_t(p) = M^{ln t} p``; scales ``D_M`` by exactly ``t``."""
    if not t > 0:
        raise DomainError(f"dilation factor must be positive, got {t}")
    return exp_tA(basis, math.log(t)) @ np.asarray(p, dtype=float)


def leaf_level_of_difference(basis: OrderedBasis, p, q, tol: float = 1e-12):
    """Highest level at which ``p`` and ``q`` differ by more than ``tol``.

    Returns ``None`` when every coordinate agrees within ``tol``.
    """
    d = np.abs(np.asarray(p, dtype=float) - np.asarray(q, dtype=float))
    idx = np.nonzero(d > tol)[0]
    if idx.size == 0:
        return None
    return basis.level_of(int(idx[-1]))
