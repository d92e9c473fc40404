"""Seeded samplers shared by the audits and verifiers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import JordanSpec


@dataclass(frozen=True)
class Sampler:
    """Base points uniform in ``[-R, R]^n``, seeded.

    Every call to :meth:`rng` returns a fresh generator seeded identically,
    so two runs of the same verifier with the same sampler see the same
    points.
    """

    R: float = 10.0
    seed: int = 0

    def rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    def points(self, rng: np.random.Generator, count: int, n: int) -> np.ndarray:
        return rng.uniform(-self.R, self.R, size=(count, n))


def as_sampler(sampler) -> Sampler:
    if sampler is None:
        return Sampler()
    if isinstance(sampler, Sampler):
        return sampler
    return Sampler(seed=int(sampler))


def sphere(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Uniform unit vector in R^dim."""
    while True:
        v = rng.standard_normal(dim)
        nv = np.linalg.norm(v)
        if nv > 1e-12:
            return v / nv


def random_spec(
    rng: np.random.Generator,
    max_n: int = 6,
    alpha_range: tuple = (0.5, 3.0),
    max_size: int = 3,
    max_alphas: int = 3,
) -> JordanSpec:
    """Random Jordan data with total dimension at most ``max_n``."""
    n_left = int(rng.integers(1, max_n + 1))
    k = int(rng.integers(1, min(max_alphas, n_left) + 1))
    alphas = rng.uniform(*alpha_range, size=k)
    blocks = []
    for i, a in enumerate(alphas):
        reserve = k - i - 1
        sizes = []
        budget = n_left - reserve
        while budget > 0 and (not sizes or rng.random() < 0.4):
            s = int(rng.integers(1, min(max_size, budget) + 1))
            sizes.append(s)
            budget -= s
        n_left -= sum(sizes)
        blocks.append((float(a), sizes))
    return JordanSpec(tuple(blocks))
