"""Experiment configuration and the batch runner behind ``suite run``.

Seeding
-------
Each registered check has a fixed index in :data:`REGISTRY`.  Its seed is
``SeedSequence([root_seed, index]).generate_state(1)[0]``, so adding a
check at the end of the registry never changes the randomness of the
existing ones.  Checks run in registry order and report assembly follows
that order.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .boundary import dm_batch, dm_value, euclid_cygan, quasi_triangle_audit
from .errors import SpecError
from .length import DEFAULT_LOG_SCHEDULE, classify_triangle
from .maps import (Pass, dilation, foliation_check, map_from_json, random_poly_shear,
                   random_triangular, cocycle_iterate_check)
from .oracles import dense_scan_t0
from .report import CheckResult, SuiteReport
from .sampling import Sampler
from .space import first_contact_height
from .spectral import JordanSpec, OrderedBasis, build_basis, exp_tA, standard_dilation

DEFAULT_TRIALS = {
    "oracle_equivalence": 500,
    "scalar_law": 1000,
    "similarity_law": 1000,
    "trichotomy": 3,
    "foliation_fuzz": 1000,
    "cocycle": 100,
    "euclid_cygan": 100,
    "quasi_triangle": 10000,
}

DEFAULT_TOL = {
    "oracle_equivalence": 1e-6,
    "scalar_law": 1e-9,
    "similarity_law": 1e-9,
    "group_law": 1e-12,
    "trichotomy": 0.05,
    "foliation": 1e-9,
    "cocycle": 1e-12,
    "euclid_cygan": 1e-6,
    "quasi_triangle": 1e-9,
}


@dataclass
class ExperimentConfig:
    spec: JordanSpec
    seed: int
    R: float = 10.0
    log_schedule: tuple = DEFAULT_LOG_SCHEDULE
    checks: Optional[list] = None
    trials: dict = field(default_factory=dict)
    tol: dict = field(default_factory=dict)
    levels: list = field(default_factory=list)
    foliation_maps: list = field(default_factory=list)
    timings: bool = False

    @classmethod
    def from_dict(cls, doc: dict, spec: Optional[JordanSpec] = None,
                  seed: Optional[int] = None) -> "ExperimentConfig":
        """Validate and build a config; problems raise :class:`SpecError`."""
        if not isinstance(doc, dict):
            raise SpecError("config must be a JSON object")
        known = {"spec", "seed", "R", "log_schedule", "checks", "trials", "tol",
                 "levels", "foliation_maps", "timings"}
        extra = set(doc) - known
        if extra:
            raise SpecError(f"unknown config keys: {sorted(extra)}")
        if spec is None:
            if "spec" not in doc:
                raise SpecError("config needs a spec")
            spec = JordanSpec.from_dict(doc["spec"])
        if seed is None:
            seed = doc.get("seed")
        if seed is None or isinstance(seed, bool) or int(seed) != seed or seed < 0:
            raise SpecError("a nonnegative integer seed is mandatory")
        cfg = cls(spec=spec, seed=int(seed), R=float(doc.get("R", 10.0)),
                  log_schedule=tuple(float(x) for x in doc.get("log_schedule", DEFAULT_LOG_SCHEDULE)),
                  checks=doc.get("checks"), trials=dict(doc.get("trials", {})),
                  tol=dict(doc.get("tol", {})), levels=[tuple(l) for l in doc.get("levels", [])],
                  foliation_maps=list(doc.get("foliation_maps", [])),
                  timings=bool(doc.get("timings", False)))
        cfg.validate()
        return cfg

    def validate(self):
        basis = self.basis
        names = [name for name, _ in REGISTRY]
        for c in self.checks or []:
            if c not in names:
                raise SpecError(f"unknown check {c!r}")
        for key in self.trials:
            if key not in DEFAULT_TRIALS:
                raise SpecError(f"unknown trials key {key!r}")
            if int(self.trials[key]) < 1:
                raise SpecError(f"trials for {key} must be >= 1")
        for key in self.tol:
            if key not in DEFAULT_TOL:
                raise SpecError(f"unknown tolerance key {key!r}")
        for lev in self.levels:
            try:
                basis.resolve_level(lev)
            except IndexError as exc:
                raise SpecError(str(exc)) from None
        if not self.R > 0:
            raise SpecError("R must be positive")
        ls = self.log_schedule
        if len(ls) < 3 or any(b <= a for a, b in zip(ls, ls[1:])) or ls[0] < math.log(3):
            raise SpecError("log_schedule must be increasing, length >= 3, entries >= ln 3")
        for doc in self.foliation_maps:
            map_from_json(basis, doc.get("map", doc))
            if "level" in doc:
                try:
                    basis.resolve_level(doc["level"])
                except IndexError as exc:
                    raise SpecError(str(exc)) from None

    @property
    def basis(self) -> OrderedBasis:
        return build_basis(self.spec)

    def n_trials(self, name: str) -> int:
        return int(self.trials.get(name, DEFAULT_TRIALS[name]))

    def tolerance(self, name: str) -> float:
        return float(self.tol.get(name, DEFAULT_TOL[name]))


def check_seed(root: int, index: int) -> int:
    return int(np.random.SeedSequence([root, index]).generate_state(1)[0])


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# -- checks -------------------------------------------------------------------
# each takes (config, basis, rng seed) and returns (status, value, witness)


def _oracle_equivalence(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    worst, wit = 0.0, None
    for _ in range(cfg.n_trials("oracle_equivalence")):
        p, q = rng.uniform(-cfg.R, cfg.R, (2, basis.n))
        a = first_contact_height(basis, p, q)
        b = dense_scan_t0(basis, p - q)
        if abs(a - b) > worst:
            worst, wit = abs(a - b), {"p": p, "q": q, "solver": a, "oracle": b}
    return _status(worst <= cfg.tolerance("oracle_equivalence")), worst, wit


def _scalar_law(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    worst, wit = 0.0, None
    for _ in range(cfg.n_trials("scalar_law")):
        alpha = float(rng.uniform(0.5, 3.0))
        d = float(rng.uniform(-cfg.R, cfg.R))
        b1 = build_basis([(alpha, [1])])
        got = dm_value(b1, [d], [0.0])
        err = abs(got - abs(d) ** (1 / alpha)) / abs(d) ** (1 / alpha)
        if err > worst:
            worst, wit = err, {"alpha": alpha, "delta": d}
    return _status(worst <= cfg.tolerance("scalar_law")), worst, wit


def _similarity_law(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    worst, wit = 0.0, None
    for _ in range(cfg.n_trials("similarity_law")):
        s = float(rng.uniform(0.1, 10.0))
        p, q = rng.uniform(-cfg.R, cfg.R, (2, basis.n))
        d0 = dm_value(basis, p, q)
        d1 = dm_value(basis, standard_dilation(basis, s, p), standard_dilation(basis, s, q))
        err = abs(d1 - s * d0) / (s * d0)
        if err > worst:
            worst, wit = err, {"s": s, "p": p, "q": q}
    group = 0.0
    for _ in range(20):
        a, b = rng.uniform(0.1, 10.0, 2)
        lhs = exp_tA(basis, math.log(a)) @ exp_tA(basis, math.log(b))
        rhs = exp_tA(basis, math.log(a * b))
        group = max(group, float(np.max(np.abs(lhs - rhs)) / max(1.0, np.max(np.abs(rhs)))))
    ok = worst <= cfg.tolerance("similarity_law") and group <= cfg.tolerance("group_law")
    return _status(ok), worst, {"group_law_residual": group, "worst": wit}


def trichotomy_cases(basis: OrderedBasis, rng, reps: int, R: float = 10.0):
    """Constructed pairs ``(p, q, D)`` whose leading difference level is ``D``."""
    for D in basis.ascending:
        sl = basis.level_slice(D)
        for _ in range(reps):
            p = rng.uniform(-R, R, basis.n)
            q = p.copy()
            size = sl.stop - sl.start
            q[sl] += rng.uniform(0.5, R, size) * rng.choice([-1.0, 1.0], size)
            q[:sl.start] += rng.uniform(-R, R, sl.start)
            yield p, q, D


def expected_kind(basis, D, Q) -> str:
    c = basis.rank(D) - basis.rank(Q)
    return "infinite" if c > 0 else "finite" if c == 0 else "zero"


def _trichotomy(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance("trichotomy")
    total, wrong, wit = 0, 0, None
    for p, q, D in trichotomy_cases(basis, rng, cfg.n_trials("trichotomy"), cfg.R):
        amount = float(np.max(np.abs((p - q)[basis.level_slice(D)])))
        for Q in basis.ascending:
            c = classify_triangle(basis, p, q, Q, log_schedule=cfg.log_schedule)
            exp = expected_kind(basis, D, Q)
            ok = c.kind == exp and (exp != "finite" or abs(c.value - amount) <= tol * amount)
            total += 1
            if not ok:
                wrong += 1
                if wit is None:
                    wit = {"p": p, "q": q, "difference_level": D, "query": Q, "got": c.kind}
    return _status(wrong == 0), float(wrong) / total, wit


def _foliation_fuzz(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    tol = cfg.tolerance("foliation")
    n_maps = cfg.n_trials("foliation_fuzz")
    for k in range(n_maps):
        F = random_triangular(basis, rng)
        lev = basis.ascending[k % len(basis.ascending)]
        res = foliation_check(basis, F, lev, Sampler(cfg.R, int(rng.integers(2**32))), 1, tol)
        if not isinstance(res, Pass):
            return "fail", float(k), {"map": "triangular", "p": res.p, "q": res.q}
    for j, doc in enumerate(cfg.foliation_maps):
        F = map_from_json(basis, doc.get("map", doc))
        levels = [basis.resolve_level(doc["level"])] if "level" in doc else basis.ascending
        for lev in levels:
            res = foliation_check(basis, F, lev, Sampler(cfg.R, check_seed(seed, j)), 100, tol)
            if not isinstance(res, Pass):
                return "fail", float(n_maps), {"map": j, "level": lev, "p": res.p, "q": res.q,
                                               "image_level": res.image_level, "trial": res.trial}
    return "pass", float(n_maps), None


def _cocycle(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    worst, wit = 0.0, None
    for k in range(cfg.n_trials("cocycle")):
        g = random_poly_shear(basis, rng)
        y = rng.uniform(-1.0, 1.0, basis.n)
        n = int(rng.integers(1, 33))
        r = cocycle_iterate_check(basis, g, y, n)
        if r > worst:
            worst, wit = r, {"trial": k, "n": n, "y": y}
    return _status(worst <= cfg.tolerance("cocycle")), worst, wit


def _euclid_cygan(cfg, basis, seed):
    rng = np.random.default_rng(seed)
    worst, wit = 0.0, None
    for _ in range(cfg.n_trials("euclid_cygan")):
        p, q = rng.uniform(-cfg.R, cfg.R, (2, basis.n))
        t0 = first_contact_height(basis, p, q)
        ratio = euclid_cygan(basis, p, q, t0 - 10.0) / dm_value(basis, p, q)
        err = abs(ratio - math.exp(0.5)) / math.exp(0.5)
        if err > worst:
            worst, wit = err, {"p": p, "q": q}
    return _status(worst <= cfg.tolerance("euclid_cygan")), worst, wit


def _quasi_triangle(cfg, basis, seed):
    audit = quasi_triangle_audit(basis, Sampler(cfg.R, seed), cfg.n_trials("quasi_triangle"))
    wit = {"trial": audit["trial"], "worst_triple": audit["worst_triple"]}
    metric_expected = basis.spec.is_diagonal and float(np.min(basis.alphas)) >= 1.0
    if metric_expected:
        return _status(audit["maxC"] <= 1 + cfg.tolerance("quasi_triangle")), audit["maxC"], wit
    return "pass", audit["maxC"], wit


REGISTRY: list[tuple[str, Callable]] = [
    ("oracle_equivalence", _oracle_equivalence),
    ("scalar_law", _scalar_law),
    ("similarity_law", _similarity_law),
    ("trichotomy", _trichotomy),
    ("foliation_fuzz", _foliation_fuzz),
    ("cocycle", _cocycle),
    ("euclid_cygan", _euclid_cygan),
    ("quasi_triangle", _quasi_triangle),
]


def run_suite(cfg: ExperimentConfig) -> SuiteReport:
    basis = cfg.basis
    report = SuiteReport()
    for index, (name, fn) in enumerate(REGISTRY):
        if cfg.checks is not None and name not in cfg.checks:
            continue
        start = time.perf_counter()
        status, value, witness = fn(cfg, basis, check_seed(cfg.seed, index))
        secs = time.perf_counter() - start if cfg.timings else None
        report.add(CheckResult(name, status, value, witness, secs))
    return report


def load_config(path: str, spec: Optional[JordanSpec] = None,
                seed: Optional[int] = None) -> ExperimentConfig:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise SpecError(f"cannot read config {path}: {exc}") from None
    return ExperimentConfig.from_dict(doc, spec, seed)
