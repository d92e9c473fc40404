"""Command-line front end.

Every leaf command builds a :class:`~heintze.report.SuiteReport` and writes
it as canonical JSON (default) or CSV.  Exit codes: 0 success, 1 a check
failed, 2 invalid input.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .action import HeightRespectingMap, first_contact_consistency, induced_boundary_constants
from .boundary import dM, dM_coordinate, dm_batch, quasi_triangle_audit
from .errors import ContractViolation, DomainError, PrecisionError, SpecError
from .length import classify_triangle
from .maps import (LeafwiseAffine, Pass, Witness, bilip_constant_estimate,
                   cocycle_iterate_check, foliation_check, map_from_json,
                   nonbilip_witness_via_triangle, rotation_blowup_experiment,
                   UnipotentShear, xi_modulus_curve)
from .report import CheckResult, SuiteReport, emit
from .sampling import Sampler
from .spectral import JordanSpec, build_basis
from .suite import ExperimentConfig, load_config, run_suite


class InputError(Exception):
    pass


def _vector(text: str) -> np.ndarray:
    try:
        return np.array([float(x) for x in text.split(",")], dtype=float)
    except ValueError:
        raise InputError(f"not a comma-separated vector: {text!r}") from None


def _level(text: str) -> tuple:
    try:
        a, l = text.split(",")
        return (float(a), int(l))
    except ValueError:
        raise InputError(f"level must be 'alpha,ell', got {text!r}") from None


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


def _spec(args) -> JordanSpec:
    if not args.spec:
        raise InputError("--spec is required")
    return JordanSpec.from_dict(_load_json(args.spec))


def _basis(args):
    return build_basis(_spec(args))


def _point(args, name, basis):
    v = _vector(getattr(args, name))
    if v.shape != (basis.n,):
        raise InputError(f"--{name} needs {basis.n} coordinates")
    return v


def _sampler(args) -> Sampler:
    return Sampler(args.R, args.seed)


def _map(args, basis):
    if not args.map:
        raise InputError("--map is required")
    return map_from_json(basis, _load_json(args.map))


def _tol(args, default):
    return default if args.tol is None else args.tol


def _single(name, status, value, witness=None) -> SuiteReport:
    return SuiteReport([CheckResult(name, status, value, witness)])


# -- handlers -----------------------------------------------------------------


def cmd_dm_eval(args):
    basis = _basis(args)
    p, q = _point(args, "p", basis), _point(args, "q", basis)
    r = dM_coordinate(basis, p, q) if args.method == "coordinate" else dM(basis, p, q)
    return _single("dm", "pass", r.value, {"t0": r.t0, "witness_level": r.witness_level})


def cmd_dm_table(args):
    basis = _basis(args)
    rng = _sampler(args).rng()
    P = rng.uniform(-args.R, args.R, (args.count, basis.n))
    Q = rng.uniform(-args.R, args.R, (args.count, basis.n))
    t0, val = dm_batch(basis, P - Q)
    return SuiteReport([CheckResult(f"dm[{k}]", "pass", float(val[k]),
                                    {"p": P[k], "q": Q[k], "t0": float(t0[k])})
                        for k in range(args.count)])


def cmd_dm_audit(args):
    basis = _basis(args)
    a = quasi_triangle_audit(basis, _sampler(args), args.trials)
    status = "pass"
    if args.bound is not None and a["maxC"] > args.bound:
        status = "fail"
    return _single("quasi_triangle", status, a["maxC"],
                   {"trial": a["trial"], "worst_triple": a["worst_triple"]})


def cmd_triangle(args):
    basis = _basis(args)
    p, q = _point(args, "p", basis), _point(args, "q", basis)
    level = _level(args.level)
    kw = {}
    if args.schedule:
        kw["schedule"] = [float(k) for k in args.schedule.split(",")]
    if args.log_schedule:
        kw["log_schedule"] = [float(k) for k in args.log_schedule.split(",")]
    c = classify_triangle(basis, p, q, level, **kw)
    status = "inconclusive" if c.kind == "inconclusive" else "pass"
    return _single("triangle", status, c.value, c.to_dict())


def cmd_check_bilip(args):
    basis = _basis(args)
    r = bilip_constant_estimate(basis, _map(args, basis), _sampler(args), args.trials)
    return _single("bilip", "pass", r["K"], {k: v for k, v in r.items() if k != "K"})


def cmd_check_foliation(args):
    basis = _basis(args)
    F = _map(args, basis)
    levels = [_level(args.level)] if args.level else list(basis.ascending)
    report = SuiteReport()
    for lev in levels:
        res = foliation_check(basis, F, lev, _sampler(args), args.trials, _tol(args, 1e-9))
        name = f"foliation[{lev[0]:g},{lev[1]}]"
        if isinstance(res, Pass):
            report.add(CheckResult(name, "pass", float(res.trials)))
        else:
            report.add(CheckResult(name, "fail", float(res.trial),
                                   {"p": res.p, "q": res.q, "image_level": res.image_level}))
    if args.triangle:
        res = nonbilip_witness_via_triangle(basis, F, None, _sampler(args), args.trials)
        if isinstance(res, Witness):
            report.add(CheckResult("triangle_witness", "fail", float(res.trial),
                                   {"p": res.p, "q": res.q, "level": res.image_level,
                                    "ratios": res.evidence["ratios"]}))
        else:
            report.add(CheckResult("triangle_witness", "pass", float(res.trials)))
    return report


def cmd_xi_curve(args):
    basis = _basis(args)
    grid = _vector(args.grid)
    c = xi_modulus_curve(basis, _map(args, basis), _level(args.source), _level(args.target),
                         grid, _sampler(args), args.trials)
    return SuiteReport([CheckResult(f"xi[{w:.6g}]", "pass", float(e), {"sup": float(s)})
                        for w, s, e in zip(c.w, c.sup, c.envelope)])


def cmd_rotation(args):
    basis = _basis(args)
    doc = _load_json(args.map)
    try:
        x_levels = [tuple(l) for l in doc["x_levels"]]
        y, yp = np.array(doc["y"], float), np.array(doc["y_prime"], float)
        Ry, Ryp = np.array(doc["R_y"], float), np.array(doc["R_y_prime"], float)
        By = np.array(doc.get("B_y", np.zeros(len(Ry))), float)
        Byp = np.array(doc.get("B_y_prime", np.zeros(len(Ry))), float)
        s = float(doc.get("s", 0.0))
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"malformed leafwise rotation descriptor: {exc!r}") from None

    def pick(a, b):
        return lambda v: a if np.allclose(v, y) else b

    G = LeafwiseAffine(basis, x_levels, pick(Ry, Ryp), pick(By, Byp), s)
    radii = [float(r) for r in args.radii.split(",")]
    r = rotation_blowup_experiment(basis, G, y, yp, radii, _tol(args, 1e-9))
    status = "fail" if r["status"] == "violation" else "pass"
    return _single("rotation_blowup", status, r["sigma"], {"status": r["status"], "rows": r["rows"]})


def cmd_cocycle(args):
    basis = _basis(args)
    g = _map(args, basis)
    if not isinstance(g, UnipotentShear):
        raise InputError("cocycle needs a unipotent_shear map")
    y = _point(args, "y", basis)
    res = cocycle_iterate_check(basis, g, y, args.n)
    tol = _tol(args, 1e-12)
    return _single("cocycle", "pass" if res <= tol else "fail", res, {"n": args.n})


def cmd_action(args):
    basis = _basis(args)
    phi = HeightRespectingMap(_map(args, basis), args.shift, args.fuzz)
    try:
        r = induced_boundary_constants(basis, phi, _sampler(args), args.trials)
    except ContractViolation as exc:
        p, q = exc.witness
        return _single("action_constants", "fail", None, {"message": str(exc), "p": p, "q": q})
    rng = _sampler(args).rng()
    worst = 0.0
    for _ in range(min(args.trials, 100)):
        p, q = rng.uniform(-args.R, args.R, (2, basis.n))
        worst = max(worst, abs(first_contact_consistency(basis, phi, p, q)))
    r["first_contact_residual"] = worst
    ok = worst <= args.fuzz + 1e-9
    return _single("action_constants", "pass" if ok else "fail", r["factor"], r)


def cmd_suite(args):
    spec = _spec(args) if args.spec else None
    cfg = load_config(args.config, spec, args.seed_given)
    if args.timings:
        cfg.timings = True
    return run_suite(cfg)


# -- parser -------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--spec", help="Jordan spec JSON file")
    p.add_argument("--seed", type=int, default=None, help="root seed (default 0)")
    p.add_argument("--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--tol", type=float, default=None, help="override the check tolerance")
    p.add_argument("--R", type=float, default=10.0, help="sampling box half-width")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="heintze", description=__doc__.splitlines()[0])
    top = parser.add_subparsers(dest="group", required=True)

    def leaf(sub, name, func, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=func)
        return p

    dm = top.add_parser("dm", help="boundary quasimetric").add_subparsers(dest="cmd", required=True)
    p = leaf(dm, "eval", cmd_dm_eval, "evaluate D_M(p, q)")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--method", choices=("solver", "coordinate"), default="solver")
    p = leaf(dm, "table", cmd_dm_table, "D_M on random pairs")
    p.add_argument("--count", type=int, default=10)
    p = leaf(dm, "audit-triangle", cmd_dm_audit, "quasi-triangle constant audit")
    p.add_argument("--trials", type=int, default=10000)
    p.add_argument("--bound", type=float, default=None, help="fail if maxC exceeds this")

    tri = top.add_parser("triangle", help="chain functional").add_subparsers(dest="cmd", required=True)
    p = leaf(tri, "classify", cmd_triangle, "zero / finite / infinite classification")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--level", required=True)
    p.add_argument("--schedule", help="comma-separated k values")
    p.add_argument("--log-schedule", help="comma-separated ln k values")

    mp = top.add_parser("map", help="map verifiers").add_subparsers(dest="cmd", required=True)
    p = leaf(mp, "check-bilip", cmd_check_bilip, "sampled bilipschitz constant")
    p.add_argument("--map", required=True)
    p.add_argument("--trials", type=int, default=1000)
    p = leaf(mp, "check-foliation", cmd_check_foliation, "foliation preservation")
    p.add_argument("--map", required=True)
    p.add_argument("--level")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--triangle", action="store_true", help="also search for a chain-functional witness")
    p = leaf(mp, "xi-curve", cmd_xi_curve, "leafwise modulus curve")
    p.add_argument("--map", required=True)
    p.add_argument("--source", required=True)
    p.add_argument("--target", required=True)
    p.add_argument("--grid", default="0.001,0.01,0.1,1")
    p.add_argument("--trials", type=int, default=50)
    p = leaf(mp, "rotation-blowup", cmd_rotation, "leafwise rotation blowup")
    p.add_argument("--map", required=True, help="leafwise rotation descriptor JSON")
    p.add_argument("--radii", default="1,10,100,1000")
    p = leaf(mp, "cocycle", cmd_cocycle, "shear cocycle identity")
    p.add_argument("--map", required=True)
    p.add_argument("--y", required=True)
    p.add_argument("--n", type=int, default=5)

    act = top.add_parser("action", help="height-respecting maps").add_subparsers(dest="cmd", required=True)
    p = leaf(act, "constants", cmd_action, "induced similarity constants")
    p.add_argument("--map", required=True)
    p.add_argument("--shift", type=float, default=0.0)
    p.add_argument("--fuzz", type=float, default=0.0)
    p.add_argument("--trials", type=int, default=1000)

    st = top.add_parser("suite", help="batch checks").add_subparsers(dest="cmd", required=True)
    p = leaf(st, "run", cmd_suite, "run the configured checks")
    p.add_argument("--config", required=True)
    p.add_argument("--timings", action="store_true", help="record wall-clock seconds")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.seed_given = args.seed
    if args.seed is None:
        args.seed = 0
    try:
        report = args.func(args)
    except (InputError, SpecError, DomainError, PrecisionError, IndexError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    data = emit(report, args.format)
    if args.out:
        with open(args.out, "wb") as fh:
            fh.write(data)
    else:
        sys.stdout.buffer.write(data)
    return report.exit_code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
