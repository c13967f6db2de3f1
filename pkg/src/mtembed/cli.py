"""Command-line entry point.

Usage:
    mtembed verify [--seed N] [--samples N] [--quadric-tol X]
    mtembed certify --epsilon 0.01 --bound tau2 [--threads N] [--report out.json]
    mtembed scan --nx 2000 --ny 1000 --margin 0 [--out grid.csv]
    mtembed fibers --point "(1,1,1,0)" | --t 1.05 --samples 5 --seed 0
    mtembed degeneracy --t 1.2
    mtembed armap --spec parts.json

Exit codes: 0 success/certified, 1 failure, 2 refuted, 3 inconclusive,
64 malformed input.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import armaps, certify, fiber, quadric_core as qc, suites
from .formats import InputError, dumps, parse_point, point_to_json

EXIT_OK, EXIT_FAIL, EXIT_REFUTED, EXIT_INCONCLUSIVE, EXIT_USAGE = 0, 1, 2, 3, 64


@dataclass
class RunConfig:
    """What a run depends on. Identical configs give byte-identical reports."""

    subcommand: str
    seed: int = 0
    threads: int = 1
    tolerances: dict = field(default_factory=dict)
    report: str | None = None

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        tols = {k: getattr(args, k) for k in ("quadric_tol", "min_width") if hasattr(args, k)}
        return cls(
            subcommand=args.command,
            seed=getattr(args, "seed", 0),
            threads=_threads(args) if hasattr(args, "threads") else 1,
            tolerances=tols,
            report=args.report,
        )


def _emit(payload, report: str | None) -> None:
    text = dumps(payload)
    if report:
        Path(report).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _threads(args) -> int:
    if args.threads is not None:
        return args.threads
    env = os.environ.get("QC_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise InputError(f"QC_THREADS: expected an integer, got {env!r}")
    return 1


def _seed(value: str) -> int:
    s = int(value)
    if not 0 <= s < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return s


def _bound(value: str) -> float:
    if value.lower() in ("tau2", "tau_sq"):
        return qc.TAU_SQ
    return float(value)


# --------------------------------------------------------------------------
# subcommands
# --------------------------------------------------------------------------

def cmd_verify(args) -> int:
    cfg = args.run
    results = suites.run_all(cfg.seed, args.samples, cfg.tolerances["quadric_tol"])
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{r.name:<{width}}  {'PASS' if r.passed else 'FAIL'}", file=sys.stderr)
    payload = {
        "seed": cfg.seed,
        "samples": args.samples,
        "quadric_tol": cfg.tolerances["quadric_tol"],
        "fingerprint": suites.fingerprint(cfg.seed),
        "suites": [{"name": r.name, "passed": r.passed, "metrics": r.metrics} for r in results],
        "passed": all(r.passed for r in results),
    }
    _emit(payload, args.run.report)
    return EXIT_OK if payload["passed"] else EXIT_FAIL


def cmd_certify(args) -> int:
    cfg = certify.CertifyConfig(
        max_depth=args.max_depth,
        min_box_width=args.min_width,
        queue_order=args.queue_order,
        semantics=args.semantics,
    )
    dom = certify.EllipseDomain(margin=args.epsilon)
    rep = certify.certify_lower_bound(dom, args.bound, cfg, threads=args.run.threads)
    _emit(rep.to_dict(include_timing=args.record_timing), args.run.report)
    print(f"{rep.status}: {rep.boxes_processed} boxes, depth {rep.max_depth_reached}, "
          f"{rep.wall_time:.2f}s", file=sys.stderr)
    return {"certified": EXIT_OK, "refuted": EXIT_REFUTED}.get(rep.status, EXIT_INCONCLUSIVE)


def cmd_scan(args) -> int:
    dom = certify.EllipseDomain(margin=args.margin)
    res = certify.grid_scan(dom, args.nx, args.ny, args.semantics)
    if args.out:
        res.write_csv(args.out)
    payload = {
        "nx": args.nx, "ny": args.ny, "margin": args.margin, "semantics": args.semantics,
        "points": int(len(res.values)),
        "missing": int(np.isnan(res.values).sum()),
        "min_ab": None if math.isnan(res.min_ab) else res.min_ab,
        "argmin": None if math.isnan(res.min_ab) else [res.argmin.real, res.argmin.imag],
        "tau_sq": qc.TAU_SQ,
    }
    _emit(payload, args.run.report)
    return EXIT_OK


def fiber_record(W: qc.QuadricPoint) -> dict:
    fr = fiber.fiber_of(W)
    rec = {
        "base": point_to_json(W),
        "base_t_level": qc.t_level(W),
        "image": list(qc.eval_map(W)),
        "companions": [point_to_json(c) for c in fr.companions],
        "residuals": fr.residuals,
        "t_levels": fr.t_levels,
        "branches": fr.branches,
        "reason": fr.reason,
        "ill_conditioned": fr.ill_conditioned,
    }
    try:
        rec["chart"] = qc.eval_jacobian(W).chart
    except qc.QuadricError:
        rec["chart"] = None
    return rec


def cmd_fibers(args) -> int:
    if args.point is not None:
        W = parse_point(args.point)
        if args.t is not None and abs(qc.t_level(W) - args.t) > 1e-9:
            raise InputError(f"t: point lies on level {qc.t_level(W)!r}, not {args.t!r}")
        points = [W]
    else:
        if args.t is None:
            raise InputError("t: give --point or --t with --samples")
        if not 1 < args.t:
            raise InputError("t: must exceed 1")
        rng = np.random.default_rng(args.seed)
        points = qc.random_mt_points(args.t, args.samples, rng)
    _emit([fiber_record(W) for W in points], args.run.report)
    return EXIT_OK


def cmd_degeneracy(args) -> int:
    try:
        W0 = qc.degeneracy_witness(args.t)
    except qc.QuadricError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    J = qc.eval_jacobian(W0)
    _emit({"t": args.t, "point": point_to_json(W0), "t_level": qc.t_level(W0),
           "jacobian": J.value, "chart": J.chart, "tau": qc.TAU}, args.run.report)
    return EXIT_OK


def _load_parts(path: str):
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise InputError(f"spec: file not found: {path}")
    except json.JSONDecodeError as exc:
        raise InputError(f"spec: invalid JSON ({exc.msg})")
    if isinstance(data, dict) and "terms" in data:
        try:
            Q = armaps.SparseHermitianPolynomial.from_json(data)
        except ValueError as exc:
            raise InputError(f"spec: {exc}")
        bd = Q.bidegree()
        if bd is None:
            raise InputError("spec.terms: polynomial is not bihomogeneous")
        return [(Q, bd[0], bd[1])]
    if not isinstance(data, dict) or not isinstance(data.get("parts"), list):
        raise InputError("spec: expected {'parts': [...]} or a polynomial {'terms': [...]}")
    parts = []
    for k, item in enumerate(data["parts"]):
        if not isinstance(item, dict) or not all(key in item for key in ("Q", "p", "q")):
            raise InputError(f"spec.parts[{k}]: expected keys Q, p, q")
        try:
            Q = armaps.SparseHermitianPolynomial.from_json(item["Q"])
        except ValueError as exc:
            raise InputError(f"spec.parts[{k}].Q: {exc}")
        if not isinstance(item["p"], int) or not isinstance(item["q"], int):
            raise InputError(f"spec.parts[{k}]: p and q must be integers")
        parts.append((Q, item["p"], item["q"]))
    return parts


def cmd_armap(args) -> int:
    parts = _load_parts(args.spec)
    checks = [{"index": k, "bidegree_ok": Q.has_bidegree(p, q),
               "harmonic": armaps.laplacian(Q).is_zero(), "p": p, "q": q}
              for k, (Q, p, q) in enumerate(parts)]
    Qsum = armaps.SparseHermitianPolynomial()
    for Q, _, _ in parts:
        Qsum = Qsum + Q
    sphere = armaps.nonvanishing_on_sphere(Qsum, args.samples, args.seed)
    payload = {"parts": checks, "Q_nonvanishing_on_S3": sphere}
    ok = all(c["bidegree_ok"] and c["harmonic"] for c in checks)
    if ok:
        try:
            P = armaps.build_P(parts)
        except armaps.ArmapError as exc:
            payload["error"] = str(exc)
            _emit(payload, args.run.report)
            return EXIT_FAIL
        payload["P"] = P.to_json()
        payload["extension"] = armaps.extend(P).to_json()
        payload["divisible_by_zb_wb"] = armaps.divisible_by_conj(P)
        payload["collision"] = {str(t): armaps.collision_test(P, t) for t in (1.5, 2.0)}
    _emit(payload, args.run.report)
    return EXIT_OK if ok and not sphere.vanishes else EXIT_FAIL


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mtembed", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", help="run the randomised identity suites")
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--quadric-tol", type=float, default=qc.QUADRIC_TOL)
    p.add_argument("--report")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("certify", help="branch-and-bound lower bound for AB on the shrunken ellipse")
    p.add_argument("--epsilon", type=float, default=1e-2, help="margin removed from the ellipse")
    p.add_argument("--bound", type=_bound, default=qc.TAU_SQ, help='real number or "tau2"')
    p.add_argument("--max-depth", type=int, default=60)
    p.add_argument("--min-width", type=float, default=1e-12)
    p.add_argument("--queue-order", choices=("widest", "fifo"), default="widest")
    p.add_argument("--semantics", choices=certify.SEMANTICS, default="admissible")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--record-timing", action="store_true",
                   help="store wall time in the report (breaks byte-identity between runs)")
    p.add_argument("--report")
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("scan", help="non-rigorous grid evaluation of min-branch AB")
    p.add_argument("--nx", type=int, default=2000)
    p.add_argument("--ny", type=int, default=1000)
    p.add_argument("--margin", type=float, default=0.0)
    p.add_argument("--semantics", choices=certify.SEMANTICS, default="admissible")
    p.add_argument("--out", help="CSV path (columns re,im,ab_min_branch)")
    p.add_argument("--report")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("fibers", help="fibers of the map through given or sampled points")
    p.add_argument("--point", help='JSON {"w": [[re,im],...]}, CSV re1,im1,...,re4,im4, or "(w1,w2,w3,w4)"')
    p.add_argument("--t", type=float)
    p.add_argument("--samples", type=int, default=1)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_fibers)

    p = sub.add_parser("degeneracy", help="point of M_t where the Jacobian vanishes")
    p.add_argument("--t", type=float, required=True)
    p.add_argument("--report")
    p.set_defaults(func=cmd_degeneracy)

    p = sub.add_parser("armap", help="check and build a generalised Ahern-Rudin map")
    p.add_argument("--spec", required=True)
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--seed", type=_seed, default=0)
    p.add_argument("--report")
    p.set_defaults(func=cmd_armap)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        args.run = RunConfig.from_args(args)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
