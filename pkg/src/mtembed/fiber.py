"""Fibers of the extended map restricted to the quadric.

Two points of the quadric with the same image share ``w1`` and ``w3``. When
both are nonzero, the companions ``W_hat = (w1, (1 - w3 w4_hat)/w1, w3, w4_hat)``
are given by the roots ``w4_hat`` of a quadratic, so a fiber has at most three
points. :func:`cubic_oracle` recomputes the same set from the unfactored cubic
with a companion-matrix root finder and serves as an independent check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .quadric_core import (
    QuadricError,
    QuadricPoint,
    eval_map,
    t_level,
)

FIBER_TOL = 1e-9
DEDUPE_TOL = 1e-8
CHART_EPS = 1e-12
ILL_CONDITIONED_RADICAND = 1e-12


class TrivialFiber(QuadricError):
    """w1 or w3 vanishes, so the fiber is the point itself."""


def radicand(a: complex) -> complex:
    """``6i a^2 - (2+6i) a + 1``, zero exactly where the two companions merge."""
    return 6j * a * a - (2 + 6j) * a + 1


def companion_quadratic(w3: complex, w4: complex) -> tuple[complex, complex, complex]:
    """Coefficients (A, B, C) of ``A x^2 + B x + C = 0`` satisfied by companion w4 values."""
    a = w3 * w4
    return (
        (1j - 1) * w3 * w3,
        (1 - 2j) * w3 + (1j - 1) * w3 * w3 * w4,
        1j + (1 - 2j) * a + (1j - 1) * a * a,
    )


def _require_chart(W: QuadricPoint) -> None:
    if abs(W.w1) <= CHART_EPS or abs(W.w3) <= CHART_EPS:
        raise TrivialFiber("w1 or w3 vanishes; the fiber is trivial")


def companion_w4(W: QuadricPoint) -> tuple[complex, complex]:
    """Both companion values of w4, principal square-root branch first."""
    _require_chart(W)
    w3, w4 = W.w3, W.w4
    a = w3 * w4
    s = cmath.sqrt(radicand(a))
    num = 2j - 1 + (1 - 1j) * a
    den = (2j - 2) * w3
    return ((num + s) / den, (num - s) / den)


def cubic_coefficients(W: QuadricPoint) -> list[complex]:
    """Cubic in ``x = w4_hat`` from the fiber identity after eliminating ``w2_hat``.

    Multiplying ``w2h w3 x^2 + i w1 w2h^2 x = c3`` by ``w1`` with
    ``w2h = (1 - w3 x)/w1`` gives
    ``(i-1) w3^2 x^3 + (1-2i) w3 x^2 + i x - w1 c3 = 0``.
    """
    _require_chart(W)
    w1, w3 = W.w1, W.w3
    c3 = eval_map(W).c3
    return [(1j - 1) * w3 * w3, (1 - 2j) * w3, 1j, -w1 * c3]


def _polish(coeffs, root: complex, steps: int = 3) -> complex:
    d = np.polyder(coeffs)
    for _ in range(steps):
        fp = np.polyval(d, root)
        if fp == 0:
            break
        step = np.polyval(coeffs, root) / fp
        nxt = root - step
        if not np.isfinite(nxt):
            break
        if abs(np.polyval(coeffs, nxt)) > abs(np.polyval(coeffs, root)):
            break
        root = nxt
    return complex(root)


def cubic_oracle(W: QuadricPoint) -> list[complex]:
    """All roots of the fiber cubic via ``numpy.roots`` plus Newton polishing."""
    coeffs = np.array(cubic_coefficients(W), dtype=np.complex128)
    return [_polish(coeffs, r) for r in np.roots(coeffs)]


def root_multiplicities(roots: list[complex], tol: float = 1e-6) -> list[int]:
    """Cluster sizes when roots closer than ``tol`` are merged, ascending."""
    clusters: list[list[complex]] = []
    for r in roots:
        for c in clusters:
            if abs(c[0] - r) <= tol:
                c.append(r)
                break
        else:
            clusters.append([r])
    return sorted(len(c) for c in clusters)


def hausdorff(xs, ys) -> float:
    xs, ys = list(xs), list(ys)
    d1 = max(min(abs(x - y) for y in ys) for x in xs)
    d2 = max(min(abs(x - y) for x in xs) for y in ys)
    return max(d1, d2)


@dataclass
class FiberResult:
    base: QuadricPoint
    companions: list[QuadricPoint] = field(default_factory=list)
    residuals: list[float] = field(default_factory=list)
    t_levels: list[float] = field(default_factory=list)
    reason: str = "ok"
    branches: list[str] = field(default_factory=list)
    ill_conditioned: bool = False
    cubic_residual: float = 0.0

    @property
    def points(self) -> list[QuadricPoint]:
        return [self.base, *self.companions]


def fiber_of(W: QuadricPoint, fiber_tol: float = FIBER_TOL,
             dedupe_tol: float = DEDUPE_TOL) -> FiberResult:
    """The fiber through ``W``: the base point plus up to two companions.

    Companions equal to the base (relative distance below ``dedupe_tol``) and
    repeated companions are dropped. A trivial fiber (w1 or w3 zero) is
    reported through ``reason`` rather than an exception.
    """
    try:
        roots = companion_w4(W)
    except TrivialFiber:
        return FiberResult(W, reason="trivial: w1 or w3 vanishes")

    w1, w3 = W.w1, W.w3
    image = eval_map(W)
    scale = max(1.0, max(abs(w) for w in W.coords))
    coeffs = cubic_coefficients(W)
    result = FiberResult(W)
    result.ill_conditioned = abs(radicand(w3 * W.w4)) < ILL_CONDITIONED_RADICAND
    for label, w4h in zip(("+", "-"), roots):
        if abs(w4h - W.w4) <= dedupe_tol * scale:
            continue
        cand = QuadricPoint(w1, (1 - w3 * w4h) / w1, w3, w4h, tol=max(W.tol, 1e-9))
        if any(cand.distance(c) <= dedupe_tol * scale for c in result.companions):
            continue
        res = eval_map(cand).distance(image)
        if res > fiber_tol * scale ** 4:
            raise QuadricError(f"companion fails the fiber identity: residual {res:.3e}")
        result.companions.append(cand)
        result.residuals.append(res)
        result.t_levels.append(t_level(cand))
        result.branches.append(label)
        cub = abs(np.polyval(coeffs, w4h))
        result.cubic_residual = max(result.cubic_residual, float(cub))
    return result


def companion_levels(W: QuadricPoint) -> list[float]:
    """t-levels of the companions of ``W``."""
    _require_chart(W)
    return fiber_of(W).t_levels


def three_point_witness(t: float) -> tuple[QuadricPoint, QuadricPoint, QuadricPoint]:
    """Three distinct points of M_t sharing the image ``(u, u, 0)``, for ``t >= sqrt 2``.

    ``u > 0`` solves ``2u^2 + 1/u^2 = 2t`` with ``u^2 = (t + sqrt(t^2 - 2))/2``.
    """
    if t < math.sqrt(2.0):
        raise QuadricError(f"three-point witness needs t >= sqrt(2), got {t}")
    u = math.sqrt(0.5 * (t + math.sqrt(max(t * t - 2.0, 0.0))))
    return (
        QuadricPoint(u, 1 / u, u, 0),
        QuadricPoint(u, 0, u, 1 / u),
        QuadricPoint(u, (1 + 1j) / (2 * u), u, (1 - 1j) / (2 * u)),
    )
