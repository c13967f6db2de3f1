"""Acceptance criteria, one test each, at the stated tolerances.

Each test records a PASS/FAIL line; run with ``-s`` to see them inline, or
read the "acceptance criteria" section of the terminal summary.
"""

import json
import math
import time
from pathlib import Path

import numpy as np
import pytest
import sympy

from mtembed import armaps as am
from mtembed import certify as ce
from mtembed import fiber as fb
from mtembed import quadric_core as qc
from mtembed.cli import main
from mtembed.quadric_core import QuadricPoint

ARTIFACTS = Path(__file__).resolve().parents[1] / "artifacts"
N = 10_000
DEG_PLUS = (3 + math.sqrt(2) - 1j) / 6
DEG_MINUS = (3 - math.sqrt(2) - 1j) / 6


def test_1_threshold_constants(acceptance):
    tau = sympy.sqrt((2 + sympy.sqrt(2)) / 3)
    errs = {
        "tau": abs(qc.TAU - float(tau.evalf(40))),
        "tau^2": abs(qc.TAU_SQ - float((tau ** 2).evalf(40))),
        "2/sqrt3": abs(qc.TWO_OVER_SQRT3 - float((2 / sympy.sqrt(3)).evalf(40))),
    }
    digits = (f"{qc.TAU_SQ:.7f}" == "1.1380712", f"{qc.TWO_OVER_SQRT3:.7f}" == "1.1547005")
    ok = max(errs.values()) <= 1e-12 and all(digits) and qc.TWO_OVER_SQRT3 > qc.TAU
    acceptance(1, "threshold constants", ok,
               f"tau={qc.TAU!r} tau^2={qc.TAU_SQ!r} 2/sqrt3={qc.TWO_OVER_SQRT3!r} max err={max(errs.values()):.1e}")
    assert ok


def test_2_degeneracy(acceptance):
    start = time.perf_counter()
    wit = []
    for t in (qc.TAU, 1.10, 1.20):
        W0 = qc.degeneracy_witness(t)
        wit.append((abs(qc.t_level(W0) - t), abs(qc.eval_jacobian(W0).value)))
    rng = np.random.default_rng(2)
    min_j = math.inf
    for _ in range(N):
        t = rng.uniform(1.0 + 1e-6, qc.TAU - 0.01)
        W = qc.random_mt_points(t, 1, rng)[0]
        min_j = min(min_j, abs(qc.eval_jacobian(W).value))
    elapsed = time.perf_counter() - start
    ok = (all(le <= 1e-10 and j <= 1e-9 for le, j in wit) and min_j > 0 and elapsed <= 10)
    acceptance(2, "degeneracy witness above tau, none below", ok,
               f"witness max |J|={max(j for _, j in wit):.1e}, min |J| over {N} samples={min_j:.3e}, {elapsed:.1f}s")
    assert ok


def test_3_fiber_exactness(acceptance):
    start = time.perf_counter()
    rng = np.random.default_rng(3)
    worst = 0.0
    for _ in range(N):
        W = qc.random_quadric_point(rng)
        worst = max(worst, fb.hausdorff([W.w4, *fb.companion_w4(W)], fb.cubic_oracle(W)))
    sizes_ok = distinct_ok = True
    for _ in range(N):
        t = rng.uniform(1.0 + 1e-6, qc.TAU - 0.01)
        W = qc.random_mt_points(t, 1, rng)[0]
        fr = fb.fiber_of(W)
        pts = fr.points
        sizes_ok &= len(pts) == 3 and min(p.distance(q) for i, p in enumerate(pts) for q in pts[i + 1:]) > 1e-8
        distinct_ok &= all(abs(c.w4 - W.w4) > 1e-9 for c in fr.companions)
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-8 and sizes_ok and distinct_ok and elapsed <= 30
    acceptance(3, "closed-form fiber vs cubic oracle; three-point fibers below tau", ok,
               f"max Hausdorff={worst:.1e}, {elapsed:.1f}s")
    assert ok


def test_4_golden_fiber(acceptance):
    fr = fb.fiber_of(QuadricPoint(1, 1, 1, 0))
    want = [QuadricPoint(1, 1, 1, 0), QuadricPoint(1, 0, 1, 1), QuadricPoint(1, (1 + 1j) / 2, 1, (1 - 1j) / 2)]
    got = fr.points
    gap = max(min(w.distance(g) for g in got) for w in want) if len(got) == 3 else math.inf
    ok = gap <= 1e-10
    acceptance(4, "fiber over (1,1,0) at t=1.5", ok, f"max gap={gap:.1e}")
    assert ok


def test_5_companion_levels(acceptance):
    rng = np.random.default_rng(5)
    lo = math.inf
    for _ in range(N):
        t = rng.uniform(1.0 + 1e-6, qc.TAU - 0.01)
        W = qc.random_mt_points(t, 1, rng)[0]
        lo = min(lo, *fb.companion_levels(W))
    ok = lo >= qc.TAU - 1e-9
    acceptance(5, "companion levels never below tau", ok, f"min companion level={lo:.9f}")
    assert ok


def test_6a_ab_at_centre(acceptance):
    vals = [ce.ab_product(0.5, br).AB for br in ce.BRANCHES]
    ok = all(abs(v - 1.5) <= 1e-5 for v in vals)
    acceptance("6a", "AB(0.5) = 1.5 on both branches", ok, f"{vals}")
    assert ok


@pytest.mark.xfail(strict=True, reason="along the ray from 0.5 AB tends to 4/3, not tau^2")
def test_6b_ab_limit_along_ray_from_centre(acceptance):
    u = (DEG_PLUS - 0.5) / abs(DEG_PLUS - 0.5)
    v = float(ce.ab_min_branch(DEG_PLUS - 1e-4 * u))
    ok = abs(v - qc.TAU_SQ) <= 1e-3
    acceptance("6b", "AB -> tau^2 along the ray from 0.5 at distance 1e-4", ok,
               f"AB={v:.6f}, tau^2={qc.TAU_SQ:.6f}; limit along this ray is 4/3")
    assert ok


def test_6c_ab_limit_infimum_over_directions(acceptance):
    th = np.linspace(0, 2 * np.pi, 7201)
    ring = DEG_PLUS + 1e-4 * np.exp(1j * th)
    inside = np.abs(1 - ring) + np.abs(ring) < qc.TAU
    vals = np.where(inside, ce.ab_min_branch(ring), np.nan)
    k = int(np.nanargmin(vals))
    ok = abs(vals[k] - qc.TAU_SQ) <= 1e-3
    acceptance("6c", "min AB over directions at distance 1e-4 from (3+sqrt2-i)/6 within 1e-3 of tau^2", ok,
               f"AB={vals[k]:.7f} at angle {th[k]:.3f} rad")
    assert ok


def test_7_flagship_certificate(acceptance):
    start = time.perf_counter()
    rep = ce.certify_lower_bound(ce.EllipseDomain(margin=0.01), qc.TAU_SQ)
    elapsed = time.perf_counter() - start
    ARTIFACTS.mkdir(exist_ok=True)
    d = rep.to_dict()
    (ARTIFACTS / "certificate_eps0.01_tau2.json").write_text(json.dumps(d, indent=2, sort_keys=True) + "\n")
    bad = ce.certify_lower_bound(ce.EllipseDomain(margin=0.01), 1.6)
    ok = (rep.certified and rep.unresolved_boxes == [] and elapsed <= 600
          and bad.status == "refuted" and abs(bad.violation.a - 0.5) < 1e-12)
    acceptance(7, "AB >= tau^2 certified on E shrunk by 0.01 (admissible pairs); bound 1.6 refuted", ok,
               f"{rep.boxes_processed} boxes, depth {rep.max_depth_reached}, {elapsed:.1f}s; "
               f"refuted at a={bad.violation.a} with AB <= {bad.violation.ab_upper:.6f}")
    assert ok


def test_8_grid_evidence(acceptance):
    start = time.perf_counter()
    g = ce.grid_scan(ce.EllipseDomain(margin=0.0), 2000, 1000)
    elapsed = time.perf_counter() - start
    dist = min(abs(g.argmin - DEG_PLUS), abs(g.argmin - DEG_MINUS))
    ok = g.min_ab >= qc.TAU_SQ - 1e-6 and dist <= 0.02 and elapsed <= 120
    acceptance(8, "2000x1000 grid over E", ok,
               f"min AB={g.min_ab:.7f} at {g.argmin:.6f}, {dist:.4f} from a degeneracy product, {elapsed:.1f}s")
    assert ok


def test_9_root_check(acceptance):
    rng = np.random.default_rng(9)
    dom = ce.EllipseDomain(margin=0.01)
    x0, x1, y0, y1 = dom.bounding_box()
    done = found = 0
    while done < N:
        a = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if not ce.ellipse_contains(a, dom):
            continue
        found += ce.root_check(rng.uniform(1.0 + 1e-6, qc.TAU - 0.01), a).verdict != "none"
        done += 1
    ok = found == 0
    acceptance(9, "no same-level companion for t <= tau-0.01", ok, f"{done} cases, {found} with a root")
    assert ok


def test_10_armaps(acceptance):
    R1 = am.Z() * am.ZB() - am.W() * am.WB()
    P = am.build_P([(R1, 1, 1)])
    g1 = am.eval_G(P, (1, 1, 1, 0))
    g2 = am.eval_G(P, (1, 0, 1, 1))
    third = am.HolomorphicPolynomial4({(0, 1, 1, 2): 1, (1, 2, 0, 1): am.I})
    sums = [am.weighted_sum([(R1, 1, 1)]),
            am.weighted_sum([(R1, 1, 1), (am.radial_harmonic(2, am.I), 2, 2)]),
            am.weighted_sum([(am.radial_harmonic(k), k, k) for k in range(1, 6)])]
    ok = (P == -(am.ZB() * am.WB()) and am.divisible_by_conj(P)
          and g1 == g2 == (1, 1, 0)
          and am.extend(am.P_AR()) == third
          and all(am.laplacian(s).is_zero() for s in sums))
    acceptance(10, "exact generalised-map algebra", ok, f"P={P!r}, G(W_u)={g1}, G(W_u')={g2}")
    assert ok


def test_11_determinism(acceptance, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("QC_THREADS", raising=False)
    blobs = []
    for k in (1, 4, 8):
        assert main(["certify", "--epsilon", "0.01", "--bound", "tau2", "--threads", str(k),
                     "--report", f"cert{k}.json"]) == 0
        blobs.append(Path(f"cert{k}.json").read_bytes())
    for k in (1, 2):
        assert main(["verify", "--samples", "200", "--report", f"verify{k}.json"]) == 0
    ok = blobs[0] == blobs[1] == blobs[2] and Path("verify1.json").read_bytes() == Path("verify2.json").read_bytes()
    acceptance(11, "byte-identical reports across 1, 4 and 8 workers", ok, f"{len(blobs[0])} bytes each")
    assert ok
