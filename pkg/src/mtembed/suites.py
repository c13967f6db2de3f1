"""Randomised identity suites run by ``mtembed verify``."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import certify as cert
from .fiber import companion_w4, cubic_oracle, fiber_of, hausdorff
from .quadric_core import (
    TAU,
    QuadricPoint,
    ar_map,
    degeneracy_witness,
    eval_jacobian,
    eval_map,
    from_w_coords,
    phi_component,
    psi_component,
    random_mt_points,
    random_quadric_point,
    sphere_point,
    t_level,
    to_w_coords,
)


@dataclass
class SuiteResult:
    name: str
    passed: bool
    metrics: dict = field(default_factory=dict)


def _rng(seed: int, salt: int):
    return np.random.default_rng([seed, salt])


def suite_coordinates(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 1)
    worst_rt = worst_form = 0.0
    for _ in range(n):
        W = random_quadric_point(rng)
        z = from_w_coords(*W.coords)
        back = to_w_coords(*z)
        scale = max(abs(w) for w in W.coords)
        worst_rt = max(worst_rt, max(abs(a - b) for a, b in zip(back, W.coords)) / scale)
        form_z = sum(zk * zk for zk in z)
        form_w = back[0] * back[1] + back[2] * back[3]
        worst_form = max(worst_form, abs(form_z - form_w) / max(1.0, scale * scale))
    return SuiteResult("coordinates", worst_rt <= 1e-14 and worst_form <= 1e-12,
                       {"max_roundtrip_rel": worst_rt, "max_form_gap": worst_form})


def suite_membership(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 2)
    pts = random_mt_points(1.05, n, rng) + [random_quadric_point(rng) for _ in range(n)]
    worst = max(W.residual for W in pts)
    return SuiteResult("membership", worst <= quadric_tol, {"max_residual": worst, "tol": quadric_tol})


def suite_map_vs_f(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 3)
    worst_map = worst_level = 0.0
    for _ in range(n):
        v = rng.normal(size=4)
        v /= np.linalg.norm(v)
        z, w = complex(v[0], v[1]), complex(v[2], v[3])
        W = sphere_point(z, w)
        worst_map = max(worst_map, eval_map(W).distance(ar_map(z, w)))
        worst_level = max(worst_level, abs(t_level(W) - 1.0))
    return SuiteResult("map_vs_f", worst_map <= 1e-12 and worst_level <= 1e-12,
                       {"max_map_gap": worst_map, "max_level_gap": worst_level})


def fd_jacobian(W: QuadricPoint, chart: str, h: float = 1e-6) -> complex:
    """Central difference of the chart expression of the third component."""
    w1, w2, w3, w4 = W.coords
    if chart == "phi":
        return (phi_component(w1, w3, w4 + h) - phi_component(w1, w3, w4 - h)) / (2 * h)
    return -(psi_component(w1, w2 + h, w3) - psi_component(w1, w2 - h, w3)) / (2 * h)


def suite_jacobian_fd(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 4)
    worst = 0.0
    for _ in range(n):
        W = random_quadric_point(rng, 0.3, 1.5)
        J = eval_jacobian(W)
        fd = fd_jacobian(W, J.chart)
        worst = max(worst, abs(fd - J.value) / max(abs(J.value), 1e-3))
    return SuiteResult("jacobian_fd", worst <= 1e-5, {"max_rel_err": worst})


def suite_degeneracy(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 5)
    worst_j = worst_level = 0.0
    for t in (TAU, 1.10, 1.20):
        W0 = degeneracy_witness(t)
        worst_j = max(worst_j, abs(eval_jacobian(W0).value))
        worst_level = max(worst_level, abs(t_level(W0) - t))
    min_j = math.inf
    for _ in range(n):
        t = rng.uniform(1.0 + 1e-3, TAU - 0.01)
        W = random_mt_points(t, 1, rng)[0]
        min_j = min(min_j, abs(eval_jacobian(W).value))
    ok = worst_j <= 1e-9 and worst_level <= 1e-10 and min_j > 0
    return SuiteResult("degeneracy", ok, {"witness_max_abs_J": worst_j,
                                          "witness_max_level_err": worst_level,
                                          "min_abs_J_below_tau": min_j})


def suite_fiber_oracle(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 6)
    worst = 0.0
    for _ in range(n):
        W = random_quadric_point(rng)
        closed = [W.w4, *companion_w4(W)]
        worst = max(worst, hausdorff(closed, cubic_oracle(W)))
    return SuiteResult("fiber_oracle", worst <= 1e-8, {"max_hausdorff": worst})


def suite_companion_levels(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 7)
    min_level = math.inf
    min_count = 3
    for _ in range(n):
        t = rng.uniform(1.0 + 1e-3, TAU - 0.01)
        W = random_mt_points(t, 1, rng)[0]
        fr = fiber_of(W)
        min_count = min(min_count, 1 + len(fr.companions))
        min_level = min(min_level, *fr.t_levels)
    return SuiteResult("companion_levels", min_level >= TAU - 1e-9 and min_count == 3,
                       {"min_companion_level": min_level, "min_fiber_size": min_count})


def suite_golden_fiber(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    fr = fiber_of(QuadricPoint(1, 1, 1, 0))
    expected = [QuadricPoint(1, 0, 1, 1), QuadricPoint(1, (1 + 1j) / 2, 1, (1 - 1j) / 2)]
    gap = max(min(e.distance(c) for c in fr.companions) for e in expected) if len(fr.companions) == 2 else math.inf
    return SuiteResult("golden_fiber", gap <= 1e-10, {"max_gap": gap})


def suite_root_check(seed: int, n: int, quadric_tol: float) -> SuiteResult:
    rng = _rng(seed, 8)
    dom = cert.EllipseDomain(margin=0.01)
    x0, x1, y0, y1 = dom.bounding_box()
    exists = 0
    done = 0
    while done < n:
        a = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if not cert.ellipse_contains(a, dom):
            continue
        t = rng.uniform(1.0 + 1e-6, TAU - 0.01)
        exists += cert.root_check(t, a).verdict != "none"
        done += 1
    return SuiteResult("root_check", exists == 0, {"cases": done, "with_root": exists})


SUITES = (
    suite_coordinates,
    suite_membership,
    suite_map_vs_f,
    suite_jacobian_fd,
    suite_degeneracy,
    suite_fiber_oracle,
    suite_companion_levels,
    suite_golden_fiber,
    suite_root_check,
)


def run_all(seed: int = 0, n: int = 500, quadric_tol: float = 1e-9) -> list[SuiteResult]:
    return [s(seed, n, quadric_tol) for s in SUITES]


def fingerprint(seed: int) -> list[float]:
    """First sampled quadric point for ``seed``; differs between seeds."""
    W = random_quadric_point(_rng(seed, 1))
    return [x for w in W.coords for x in (w.real, w.imag)]


__all__ = ["SuiteResult", "SUITES", "run_all", "fingerprint", "fd_jacobian"]
