"""Coordinates on the quadric, the extended Ahern-Rudin map, its Jacobian,
degeneracy witnesses and point sampling on the level sets M_t.

Points live in the w-coordinates ``w1 = z1 + i z2``, ``w2 = z1 - i z2``,
``w3 = z3 + i z4``, ``w4 = z3 - i z4`` in which the quadric reads
``w1*w2 + w3*w4 = 1`` and M_t is ``|w1|^2 + |w2|^2 + |w3|^2 + |w4|^2 = 2t``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

QUADRIC_TOL = 1e-9
CHART_EPS = 1e-12

SQRT2 = math.sqrt(2.0)
TAU_SQ = (2.0 + SQRT2) / 3.0
TAU = math.sqrt(TAU_SQ)
TWO_OVER_SQRT3 = 2.0 / math.sqrt(3.0)

# w3*w4 values where the Jacobian vanishes; conjugate-partner w1*w2 = 1 - value
DEGENERACY_PRODUCTS = ((3.0 + SQRT2 - 1j) / 6.0, (3.0 - SQRT2 - 1j) / 6.0)
# constants p, q of the degeneracy level: |w1 w2|^2 and |w3 w4|^2 at W0
DEGENERACY_P = (2.0 + SQRT2) / 6.0
DEGENERACY_Q = (2.0 - SQRT2) / 6.0


@dataclass(frozen=True)
class DomainConstants:
    tau: float = TAU
    tau_sq: float = TAU_SQ
    two_over_sqrt3: float = TWO_OVER_SQRT3
    sqrt2: float = SQRT2


CONSTANTS = DomainConstants()


class QuadricError(ValueError):
    """Raised when an input violates a precondition of a quadric operation."""


def _check_finite(*values: complex) -> None:
    for v in values:
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise QuadricError(f"non-finite coordinate {v!r}")


@dataclass(frozen=True)
class QuadricPoint:
    """A point ``(w1, w2, w3, w4)`` of the quadric ``w1 w2 + w3 w4 = 1``."""

    w1: complex
    w2: complex
    w3: complex
    w4: complex
    tol: float = QUADRIC_TOL

    def __post_init__(self):
        for name in ("w1", "w2", "w3", "w4"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        _check_finite(self.w1, self.w2, self.w3, self.w4)
        res = self.residual
        if not res <= self.tol:
            raise QuadricError(f"point is off the quadric: |w1w2+w3w4-1| = {res:.3e} > {self.tol:.1e}")
        if abs(self.w1) + abs(self.w3) == 0.0:
            raise QuadricError("w1 and w3 both vanish")

    @classmethod
    def from_chart(cls, w1: complex, w3: complex, w4: complex, **kw) -> "QuadricPoint":
        """Build the point with ``w2`` solved from the quadric (requires w1 != 0)."""
        w1 = complex(w1)
        if w1 == 0:
            raise QuadricError("w1 = 0: w2 is not determined by the chart")
        return cls(w1, (1.0 - w3 * w4) / w1, w3, w4, **kw)

    @property
    def residual(self) -> float:
        return abs(self.w1 * self.w2 + self.w3 * self.w4 - 1.0)

    @property
    def coords(self) -> tuple[complex, complex, complex, complex]:
        return (self.w1, self.w2, self.w3, self.w4)

    def __iter__(self):
        return iter(self.coords)

    def distance(self, other: "QuadricPoint") -> float:
        return max(abs(a - b) for a, b in zip(self.coords, other.coords))

    def on_sphere(self, tol: float = 1e-12) -> bool:
        return (abs(self.w2 - self.w1.conjugate()) <= tol
                and abs(self.w4 - self.w3.conjugate()) <= tol)


class MapImage(NamedTuple):
    c1: complex
    c2: complex
    c3: complex

    def distance(self, other) -> float:
        return max(abs(a - b) for a, b in zip(self, other))


class Jacobian(NamedTuple):
    value: complex
    chart: str  # "phi" (coordinates w1, w3, w4) or "psi" (coordinates w1, w2, w3)


def to_w_coords(z1, z2, z3, z4) -> tuple[complex, complex, complex, complex]:
    return (z1 + 1j * z2, z1 - 1j * z2, z3 + 1j * z4, z3 - 1j * z4)


def from_w_coords(w1, w2, w3, w4) -> tuple[complex, complex, complex, complex]:
    return ((w1 + w2) / 2, (w1 - w2) / 2j, (w3 + w4) / 2, (w3 - w4) / 2j)


def t_level(W: QuadricPoint) -> float:
    """Half the squared norm; equals t for W on M_t and 1 exactly on the sphere."""
    return 0.5 * sum(abs(w) ** 2 for w in W.coords)


def eval_map(W) -> MapImage:
    """The extended map ``(w1, w3, w2 w3 w4^2 + i w1 w2^2 w4)``; defined on all of C^4."""
    w1, w2, w3, w4 = W
    return MapImage(complex(w1), complex(w3), w2 * w3 * w4 * w4 + 1j * w1 * w2 * w2 * w4)


def ar_map(z: complex, w: complex) -> tuple[complex, complex, complex]:
    """The Ahern-Rudin map on C^2: ``(z, w, w zb wb^2 + i z zb^2 wb)``."""
    zb, wb = z.conjugate(), w.conjugate()
    return (z, w, w * zb * wb * wb + 1j * z * zb * zb * wb)


def sphere_point(z: complex, w: complex) -> QuadricPoint:
    """Image of ``(z, w)`` with ``|z|^2 + |w|^2 = 1`` in the w-coordinates."""
    return QuadricPoint(z, z.conjugate(), w, w.conjugate())


def jacobian_phi(w1: complex, a: complex) -> complex:
    """d(phi)/d(w4) in the chart (w1, w3, w4); ``a = w3*w4``."""
    return ((3j - 3) * a * a + (2 - 4j) * a + 1j) / w1


def jacobian_psi(w3: complex, b: complex) -> complex:
    """-d(psi)/d(w2) in the chart (w1, w2, w3); ``b = w1*w2``."""
    return -((3 - 3j) * b * b + (2j - 4) * b + 1) / w3


def eval_jacobian(W: QuadricPoint) -> Jacobian:
    """Jacobian of the restricted map in the chart with the larger of |w1|, |w3|."""
    w1, w2, w3, w4 = W.coords
    if max(abs(w1), abs(w3)) < CHART_EPS:
        raise QuadricError("both |w1| and |w3| are below 1e-12; no chart applies")
    if abs(w1) >= abs(w3):
        return Jacobian(jacobian_phi(w1, w3 * w4), "phi")
    return Jacobian(jacobian_psi(w3, w1 * w2), "psi")


def phi_component(w1: complex, w3: complex, w4: complex) -> complex:
    """Third map component written in the chart (w1, w3, w4)."""
    a = w3 * w4
    return (1 - a) / w1 * (1j * w4 + (1 - 1j) * w3 * w4 * w4)


def psi_component(w1: complex, w2: complex, w3: complex) -> complex:
    """Third map component written in the chart (w1, w2, w3)."""
    b = w1 * w2
    return (1 - b) / w3 * (w2 + (1j - 1) * w1 * w2 * w2)


def g_function(x: float, y: float, p: float, q: float) -> float:
    return x + p / x + y + q / y


def min_g(p: float, q: float) -> tuple[float, tuple[float, float]]:
    """Minimum of ``x + p/x + y + q/y`` over x, y > 0 and where it is attained."""
    if not (p > 0 and q > 0):
        raise QuadricError(f"min_g needs p > 0 and q > 0, got p={p}, q={q}")
    sp, sq = math.sqrt(p), math.sqrt(q)
    return 2.0 * (sp + sq), (sp, sq)


class RootChoice(NamedTuple):
    value: float
    other: float
    larger: bool


def solve_x_plus_p_over_x(p: float, c: float) -> RootChoice:
    """Solve ``x + p/x = c`` for x > 0, returning the larger root.

    With p = 0 the only positive solution is ``x = c``. Requires
    ``c >= 2 sqrt(p)`` up to rounding; tiny negative discriminants are
    clamped to a double root.
    """
    if p < 0:
        raise QuadricError("p must be nonnegative")
    if p == 0:
        if c <= 0:
            raise QuadricError("x + 0/x = c needs c > 0")
        return RootChoice(c, c, True)
    disc = c * c - 4.0 * p
    if disc < 0:
        if disc < -1e-12 * max(1.0, c * c):
            raise QuadricError(f"x + {p}/x = {c} has no positive root")
        disc = 0.0
    r = math.sqrt(disc)
    big = 0.5 * (c + r)
    return RootChoice(big, p / big, True)


def degeneracy_witness(t: float) -> QuadricPoint:
    """A point of M_t where the Jacobian vanishes; exists only for ``t >= tau``.

    Keeps ``y0 = sqrt(q)`` at its minimiser and solves ``x + p/x = 2t - 2 sqrt(q)``
    for ``x0`` (larger root), so ``g(x0, y0) = 2t``.
    """
    if t < TAU:
        raise QuadricError(
            f"no degeneracy below threshold: t = {t} < tau = sqrt((2+sqrt2)/3) = {TAU:.15f}")
    p, q = DEGENERACY_P, DEGENERACY_Q
    y0 = math.sqrt(q)
    if t == TAU:
        x0 = math.sqrt(p)
    else:
        x0 = solve_x_plus_p_over_x(p, 2.0 * t - 2.0 * y0).value
    sx, sy = math.sqrt(x0), math.sqrt(y0)
    return QuadricPoint(
        sx,
        (3.0 + SQRT2 + 1j) / (6.0 * sx),
        sy,
        (3.0 - SQRT2 - 1j) / (6.0 * sy),
    )


@dataclass(frozen=True)
class SampleInfo:
    point: QuadricPoint
    x: float
    y: float
    x_root_larger: bool
    y_root_larger: bool


def sample_mt_info(t: float, a: complex, phase1: float = 0.0, phase3: float = 0.0,
                   split: float = 0.5) -> SampleInfo:
    """Like :func:`sample_mt` but also returns the solved squared moduli."""
    a = complex(a)
    _check_finite(a)
    if not t > 1.0:
        raise QuadricError(f"t must exceed 1, got {t}")
    if not 0.0 <= split <= 1.0:
        raise QuadricError(f"split must lie in [0, 1], got {split}")
    p = abs(1 - a) ** 2
    q = abs(a) ** 2
    base = abs(1 - a) + abs(a)
    if base > t * (1 + 1e-15):
        raise QuadricError(f"infeasible level: |1-a| + |a| = {base:.15g} > t = {t:.15g}")
    excess = max(2.0 * t - 2.0 * base, 0.0)
    rx = solve_x_plus_p_over_x(p, 2.0 * math.sqrt(p) + split * excess)
    ry = solve_x_plus_p_over_x(q, 2.0 * math.sqrt(q) + (1.0 - split) * excess)
    x, y = rx.value, ry.value
    if x <= 0 or y <= 0:
        raise QuadricError("split leaves a vanishing modulus (w1 or w3 would be 0)")
    sx, sy = math.sqrt(x), math.sqrt(y)
    e1, e3 = cmath.exp(1j * phase1), cmath.exp(1j * phase3)
    w1 = e1 * sx
    w3 = e3 * sy
    w2 = 0j if a == 1 else (1 - a) / (e1 * sx)
    w4 = 0j if a == 0 else a / (e3 * sy)
    return SampleInfo(QuadricPoint(w1, w2, w3, w4), x, y, rx.larger, ry.larger)


def sample_mt(t: float, a: complex, phase1: float = 0.0, phase3: float = 0.0,
              split: float = 0.5) -> QuadricPoint:
    """Point of M_t with ``w3*w4 = a``.

    The moduli ``x = |w1|^2`` and ``y = |w3|^2`` solve
    ``x + |1-a|^2/x + y + |a|^2/y = 2t``; the excess ``2t - 2(|1-a| + |a|)``
    goes to the x-equation in proportion ``split`` and the rest to the
    y-equation.
    """
    return sample_mt_info(t, a, phase1, phase3, split).point


def random_mt_points(t: float, n: int, rng) -> list[QuadricPoint]:
    """``n`` points of M_t with w3*w4 drawn uniformly from the feasible ellipse."""
    pts: list[QuadricPoint] = []
    semi_major = t / 2.0
    semi_minor = math.sqrt(max(semi_major ** 2 - 0.25, 0.0))
    while len(pts) < n:
        u, v = rng.uniform(-1.0, 1.0, size=2)
        if u * u + v * v > 1.0:
            continue
        a = complex(0.5 + semi_major * u, semi_minor * v)
        if abs(1 - a) + abs(a) >= t or a == 0 or a == 1:
            continue
        th1, th3 = rng.uniform(0.0, 2 * math.pi, size=2)
        split = rng.uniform(0.05, 0.95)
        pts.append(sample_mt(t, a, th1, th3, split))
    return pts


def random_quadric_point(rng, mod_lo: float = 0.2, mod_hi: float = 2.0) -> QuadricPoint:
    """Quadric point with |w1|, |w3| uniform in [mod_lo, mod_hi] and random phases."""
    r1, r3 = rng.uniform(mod_lo, mod_hi, size=2)
    th1, th3 = rng.uniform(0.0, 2 * math.pi, size=2)
    w1 = r1 * cmath.exp(1j * th1)
    w3 = r3 * cmath.exp(1j * th3)
    w4 = complex(*rng.normal(size=2))
    return QuadricPoint.from_chart(w1, w3, w4)
