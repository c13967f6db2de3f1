"""The ellipse E, the invariants A, B and AB of a companion pair, and a
rigorous branch-and-bound certifier for lower bounds on AB.

For ``a = w3 w4`` and a companion ``a_hat = w3 w4_hat`` put
``D1 = |a_hat|^2 - |a|^2`` and ``D2 = |1-a|^2 - |1-a_hat|^2``. A companion can
lie on the same level as the base point only when ``|w1|^2/|w3|^2 = D2/D1``
is positive; such pairs are called *admissible*. On admissible pairs

    AB - b = G_b / (D1 D2),  G_b = P D1^2 + Q D2^2 + (P + Q - b) D1 D2,

with ``P = |1-a|^2`` and ``Q = |a|^2``, so ``G_b >= 0`` is a division-free
certificate for ``AB >= b``. Inadmissible pairs carry no geometric meaning,
and AB takes arbitrary values there (including poles inside E).

Two semantics are offered everywhere a bound on AB is checked:

``"admissible"`` (default)
    AB >= b is required on admissible pairs only.
``"literal"``
    AB >= b is required for both branches at every point, regardless of
    admissibility. This statement is false on E (see ``LITERAL_COUNTEREXAMPLE``)
    and the certifier refutes it.
"""

from __future__ import annotations

import cmath
import heapq
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .intervals import ComplexBox, RealInterval, _up, interval_sqrt
from .quadric_core import TAU, TAU_SQ

SEMANTICS = ("admissible", "literal")
DEGENERATE_EPS = 1e-13
BRANCHES = (1, -1)
# a = 0.7 lies in E, its "-" branch gives AB ~ 0.0072 with D2/D1 < 0
LITERAL_COUNTEREXAMPLE = 0.7 + 0j


class DegeneratePair(ValueError):
    """A denominator of A or B vanishes (happens on the boundary of E)."""


def _check_semantics(semantics: str) -> None:
    if semantics not in SEMANTICS:
        raise ValueError(f"unknown semantics {semantics!r}; expected one of {SEMANTICS}")


# --------------------------------------------------------------------------
# the domain
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class EllipseDomain:
    """``{z : |1-z| + |z| <= threshold - margin}``, foci at 0 and 1."""

    threshold: float = TAU
    margin: float = 0.0

    def __post_init__(self):
        if self.margin < 0:
            raise ValueError("margin must be nonnegative")

    @property
    def empty(self) -> bool:
        """The focal sum is at least 1, so a limit below 1 leaves nothing."""
        return self.limit < 1.0

    @property
    def limit(self) -> float:
        return self.threshold - self.margin

    def bounding_box(self) -> tuple[float, float, float, float]:
        """(re_lo, re_hi, im_lo, im_hi), padded outward by a few ulps."""
        half_major = 0.5 * self.limit
        half_minor = math.sqrt(max(half_major * half_major - 0.25, 0.0))
        pad = 1e-12
        return (0.5 - half_major - pad, 0.5 + half_major + pad,
                -half_minor - pad, half_minor + pad)

    def focal_sum(self, z):
        return np.abs(1 - z) + np.abs(z)


def ellipse_contains(z: complex, dom: EllipseDomain = EllipseDomain(), strict: bool | None = None) -> bool:
    """Membership test. The unshrunk domain (margin 0) is open, so the test is
    strict by default there; shrunken domains are closed."""
    if strict is None:
        strict = dom.margin == 0
    h = abs(1 - z) + abs(z)
    return bool(h < dom.limit) if strict else bool(h <= dom.limit)


# --------------------------------------------------------------------------
# point evaluation
# --------------------------------------------------------------------------

def radicand(a):
    return 6j * a * a - (2 + 6j) * a + 1


def companion_a(a: complex, branch: int = 1) -> complex:
    """``a_hat = (2i - 1 + (1-i) a + branch*sqrt(R(a))) / (2i - 2)`` (principal sqrt)."""
    if branch not in BRANCHES:
        raise ValueError("branch must be +1 or -1")
    return (2j - 1 + (1 - 1j) * a + branch * cmath.sqrt(radicand(a))) / (2j - 2)


def companion_relation(a: complex, a_hat: complex) -> complex:
    """Left side of the quadratic relation tying ``a_hat`` to ``a``; zero for companions."""
    return ((1j - 1) * a_hat * a_hat + (1 - 2j) * a_hat + (1j - 1) * a_hat * a
            + (1j - 1) * a * a + (1 - 2j) * a + 1j)


@dataclass(frozen=True)
class ABValue:
    a: complex
    a_hat: complex
    A: float
    B: float
    AB: float
    branch: int
    D1: float
    D2: float

    @property
    def admissible(self) -> bool:
        """True when ``|w1|^2/|w3|^2 = D2/D1`` can be positive."""
        return self.D1 * self.D2 > 0

    @property
    def modulus_ratio(self) -> float:
        return self.D2 / self.D1


def ab_product(a: complex, branch: int = 1) -> ABValue:
    a = complex(a)
    ah = companion_a(a, branch)
    D1 = abs(ah) ** 2 - abs(a) ** 2
    D2 = abs(1 - a) ** 2 - abs(1 - ah) ** 2
    if abs(D1) < DEGENERATE_EPS or abs(D2) < DEGENERATE_EPS:
        raise DegeneratePair(f"degenerate pair at a={a!r}, branch {branch:+d}: D1={D1:.3e}, D2={D2:.3e}")
    A = 2.0 * (ah.real - a.real) / D1
    B = ((1 - 2 * a.real) * abs(ah) ** 2 - (1 - 2 * ah.real) * abs(a) ** 2) / D2
    return ABValue(a, ah, A, B, A * B, branch, D1, D2)


def discriminant(t: float, a: complex, branch: int = 1) -> float:
    """``4 (t^2 - AB)``: discriminant of ``A s^2 - 2 t s + B`` in ``s = |w3|^2``."""
    if not t > 1:
        raise ValueError("t must exceed 1")
    return 4.0 * (t * t - ab_product(a, branch).AB)


@dataclass(frozen=True)
class BranchCheck:
    branch: int
    ab: ABValue
    positive_roots: tuple[float, ...]
    realizable: bool


@dataclass(frozen=True)
class RootCheck:
    t: float
    a: complex
    verdict: str  # "none" or "exists"
    branches: tuple[BranchCheck, ...]


def root_check(t: float, a: complex, semantics: str = "admissible") -> RootCheck:
    """Does ``A s^2 - 2t s + B = 0`` have a positive root that yields a companion
    on the level t?

    A positive root ``s = |w3|^2`` is realizable only if ``|w1|^2 = (D2/D1) s``
    is positive too, i.e. on admissible pairs. With ``semantics="literal"``
    any positive real root counts.
    """
    _check_semantics(semantics)
    if not t > 1:
        raise ValueError("t must exceed 1")
    checks = []
    for br in BRANCHES:
        v = ab_product(a, br)
        disc = 4.0 * (t * t - v.AB)
        roots: tuple[float, ...] = ()
        if disc >= 0:
            r = math.sqrt(disc)
            cand = [(2 * t + r) / (2 * v.A), (2 * t - r) / (2 * v.A)] if v.A != 0 else [v.B / (2 * t)]
            roots = tuple(sorted(s for s in cand if s > 0))
        ok = bool(roots) and (semantics == "literal" or v.admissible)
        checks.append(BranchCheck(br, v, roots, ok))
    verdict = "exists" if any(c.realizable for c in checks) else "none"
    return RootCheck(t, complex(a), verdict, tuple(checks))


def ab_min_branch(a, semantics: str = "admissible"):
    """Vectorised min over branches of AB; NaN where no branch qualifies.

    Branches with a near-vanishing denominator are skipped; under the
    admissible semantics so are inadmissible ones.
    """
    _check_semantics(semantics)
    a = np.asarray(a, dtype=np.complex128)
    best = np.full(a.shape, np.inf)
    sq = np.sqrt(radicand(a))
    with np.errstate(divide="ignore", invalid="ignore"):
        for br in BRANCHES:
            ah = (2j - 1 + (1 - 1j) * a + br * sq) / (2j - 2)
            D1 = np.abs(ah) ** 2 - np.abs(a) ** 2
            D2 = np.abs(1 - a) ** 2 - np.abs(1 - ah) ** 2
            A = 2 * (ah.real - a.real) / D1
            B = ((1 - 2 * a.real) * np.abs(ah) ** 2 - (1 - 2 * ah.real) * np.abs(a) ** 2) / D2
            ok = (np.abs(D1) >= DEGENERATE_EPS) & (np.abs(D2) >= DEGENERATE_EPS)
            if semantics == "admissible":
                ok &= D1 * D2 > 0
            best = np.where(ok, np.minimum(best, A * B), best)
    return np.where(np.isinf(best), np.nan, best)


# --------------------------------------------------------------------------
# interval enclosures
# --------------------------------------------------------------------------

class BranchEnclosure(NamedTuple):
    D1: RealInterval
    D2: RealInterval
    AB: RealInterval
    G: RealInterval


def _branch_enclosure(a: ComplexBox, s: ComplexBox, bound: float) -> BranchEnclosure:
    """Enclosures for one square-root branch; ``s`` encloses that root of R(a).

    Works with ``d = a_hat - a``, written out componentwise so that ``a`` and
    ``s`` each enter the real and imaginary parts once:
    ``Re d = (3 - 6 Re a + Im s - Re s)/4``, ``Im d = (-1 - 6 Im a - Re s - Im s)/4``.
    """
    ar, ai = a.re, a.im
    sr, si = s.re, s.im
    dr = (3.0 - 6.0 * ar + (si - sr)) * 0.25
    di = (-1.0 - 6.0 * ai - (sr + si)) * 0.25
    dd = dr.sqr() + di.sqr()
    D1 = 2.0 * (ar * dr + ai * di) + dd
    D2 = 2.0 * ((1.0 - ar) * dr - ai * di) - dd
    P = (1.0 - ar).sqr() + ai.sqr()
    Q = ar.sqr() + ai.sqr()
    num_b = (1.0 - 2.0 * ar) * D1 + 2.0 * (Q * dr)
    num = 2.0 * dr * num_b
    den = D1 * D2
    AB = num / den
    g1 = P * D1.sqr() + Q * D2.sqr() + (P + Q - bound) * den
    g2 = num - bound * den
    G = RealInterval._raw(np.maximum(g1.lo, g2.lo), np.minimum(g1.hi, g2.hi))
    return BranchEnclosure(D1, D2, AB, G)


def _radicand_box(a: ComplexBox) -> ComplexBox:
    # 6i a^2 - (2+6i) a + 1 with a^2 = (x^2 - y^2) + 2ixy
    sq = a.square()
    re = -6.0 * sq.im - 2.0 * a.re + 6.0 * a.im + 1.0
    im = 6.0 * sq.re - 6.0 * a.re - 2.0 * a.im
    return ComplexBox(re, im)


def branch_enclosures(a: ComplexBox, bound: float = TAU_SQ) -> tuple[BranchEnclosure, BranchEnclosure]:
    s_plus, s_minus = interval_sqrt(_radicand_box(a))
    return _branch_enclosure(a, s_plus, bound), _branch_enclosure(a, s_minus, bound)


def _strictly_inadmissible(e: BranchEnclosure):
    return ((e.D1.hi < 0) & (e.D2.lo > 0)) | ((e.D1.lo > 0) & (e.D2.hi < 0))


def _split_box(b: ComplexBox, n: int) -> ComplexBox:
    """Cover ``b`` (scalar bounds) by an ``n`` x ``n`` grid of sub-boxes."""
    xs = np.linspace(float(b.re.lo), float(b.re.hi), n + 1)
    ys = np.linspace(float(b.im.lo), float(b.im.hi), n + 1)
    xs[0], xs[-1], ys[0], ys[-1] = b.re.lo, b.re.hi, b.im.lo, b.im.hi
    X0, Y0 = np.meshgrid(xs[:-1], ys[:-1])
    X1, Y1 = np.meshgrid(xs[1:], ys[1:])
    return ComplexBox.from_bounds(X0.ravel(), X1.ravel(), Y0.ravel(), Y1.ravel())


def ab_enclosure(b: ComplexBox, semantics: str = "admissible", splits: int = 32) -> RealInterval | None:
    """Interval containing AB over every ``a`` in ``b`` and every qualifying branch.

    The lower end is therefore a lower bound for the minimum over branches.
    ``b`` is cut into ``splits`` x ``splits`` pieces to curb the dependency
    effect. A denominator enclosure touching zero gives the whole line.
    Under the admissible semantics branches that are inadmissible on a whole
    piece are left out there; ``None`` means no branch qualifies anywhere.
    """
    _check_semantics(semantics)
    if splits < 1:
        raise ValueError("splits must be positive")
    pieces = _split_box(b, splits)
    lo, hi = np.inf, -np.inf
    for e in branch_enclosures(pieces):
        use = np.ones(np.shape(e.AB.lo), dtype=bool)
        if semantics == "admissible":
            use &= ~_strictly_inadmissible(e)
        if use.any():
            lo = min(lo, float(e.AB.lo[use].min()))
            hi = max(hi, float(e.AB.hi[use].max()))
    return None if lo > hi else RealInterval(lo, hi)


# --------------------------------------------------------------------------
# branch and bound
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CertifyConfig:
    max_depth: int = 60
    min_box_width: float = 1e-12
    queue_order: str = "widest"
    semantics: str = "admissible"
    batch_size: int = 2048

    def __post_init__(self):
        _check_semantics(self.semantics)
        if self.queue_order not in ("widest", "fifo"):
            raise ValueError("queue_order must be 'widest' or 'fifo'")
        if self.batch_size < 1:
            raise ValueError("batch_size must be positive")


@dataclass
class Violation:
    a: complex
    branch: int
    ab_upper: float  # rigorous upper bound on AB at ``a`` for ``branch``


@dataclass
class CertificateReport:
    region: EllipseDomain
    bound: float
    certified: bool
    status: str  # "certified" | "refuted" | "inconclusive"
    boxes_processed: int
    max_depth_reached: int
    unresolved_boxes: list[tuple[float, float, float, float]]
    boxes_accepted: int
    boxes_outside: int
    violation: Violation | None
    config: CertifyConfig
    wall_time: float | None = None

    def to_dict(self, include_timing: bool = False) -> dict:
        d = {
            "region": asdict(self.region),
            "bound": self.bound,
            "certified": self.certified,
            "status": self.status,
            "boxes_processed": self.boxes_processed,
            "max_depth_reached": self.max_depth_reached,
            "unresolved_boxes": [list(b) for b in self.unresolved_boxes],
            "boxes_accepted": self.boxes_accepted,
            "boxes_outside": self.boxes_outside,
            "violation": None if self.violation is None else {
                "a": [self.violation.a.real, self.violation.a.imag],
                "branch": self.violation.branch,
                "ab_upper": self.violation.ab_upper,
            },
            "config": asdict(self.config),
            "wall_time": self.wall_time if include_timing else None,
        }
        return d


# box outcomes
OUTSIDE, ACCEPT, SPLIT = 0, 1, 2


def _classify(bounds: np.ndarray, limit: float, bound: float, semantics: str):
    """Vectorised per-box verdicts plus a rigorous violation probe at box centres.

    ``bounds`` has shape (n, 4): re_lo, re_hi, im_lo, im_hi.
    Returns (outcome array, violation-branch array with 0 meaning none).
    """
    box = ComplexBox.from_bounds(bounds[:, 0], bounds[:, 1], bounds[:, 2], bounds[:, 3])
    h = (1.0 - box).abs() + box.abs()
    outside = h.lo > limit

    ok = np.ones(len(bounds), dtype=bool)
    for e in branch_enclosures(box, bound):
        if semantics == "admissible":
            ok &= _strictly_inadmissible(e) | (e.G.lo >= 0.0)
        else:
            ok &= ~e.D1.contains_zero() & ~e.D2.contains_zero() & (e.AB.lo >= bound)

    outcome = np.where(outside, OUTSIDE, np.where(ok, ACCEPT, SPLIT))

    # centre probe, only for boxes that need splitting
    viol = np.zeros(len(bounds), dtype=np.int8)
    idx = np.nonzero(outcome == SPLIT)[0]
    if len(idx):
        c = 0.5 * (bounds[idx, 0] + bounds[idx, 1]) + 0.5j * (bounds[idx, 2] + bounds[idx, 3])
        pb = ComplexBox.point(c)
        inside = ((1.0 - pb).abs() + pb.abs()).hi <= limit
        for br, e in zip(BRANCHES, branch_enclosures(pb, bound)):
            if semantics == "admissible":
                bad = (e.D1 * e.D2).lo > 0.0
                bad &= e.G.hi < 0.0
            else:
                bad = ~e.D1.contains_zero() & ~e.D2.contains_zero() & (e.AB.hi < bound)
            hit = inside & bad & (viol[idx] == 0)
            viol[idx[hit]] = br
    return outcome, viol


def _point_ab_upper(a: complex, branch: int, bound: float) -> float:
    pb = ComplexBox.point(np.array([a]))
    e = branch_enclosures(pb, bound)[0 if branch == 1 else 1]
    return float(e.AB.hi[0])


def certify_lower_bound(dom: EllipseDomain, bound: float,
                        cfg: CertifyConfig = CertifyConfig(), threads: int = 1) -> CertificateReport:
    """Prove ``AB >= bound`` on ``dom`` (both branches) by adaptive bisection.

    Boxes whose focal-sum enclosure lies above the domain limit are dropped,
    boxes whose enclosures settle the bound are accepted and the rest are
    bisected along the wider side. A box centre that provably lies in ``dom``
    and provably violates the bound stops the run with status "refuted".
    Boxes still open at ``max_depth`` or below ``min_box_width`` make the run
    "inconclusive". The verdict never depends on ``threads``: batches are
    formed before they are handed to workers and merged in order.
    """
    if not dom.margin > 0:
        raise ValueError("certification needs margin > 0: the bound is attained on the boundary of E")
    start = time.perf_counter()
    limit = float(_up(dom.limit))
    x0, x1, y0, y1 = dom.bounding_box()

    counter = 0
    heap: list = []

    def push(b, depth):
        nonlocal counter
        w = max(b[1] - b[0], b[3] - b[2])
        key = (-w, b[0], b[2]) if cfg.queue_order == "widest" else (counter,)
        heapq.heappush(heap, (key, counter, depth, b))
        counter += 1

    push((x0, x1, y0, y1), 0)
    processed = accepted = outside = 0
    max_depth_seen = 0
    unresolved: list[tuple[float, float, float, float]] = []
    violation: Violation | None = None
    pool = ThreadPoolExecutor(max_workers=threads) if threads > 1 else None

    try:
        while heap and violation is None:
            batch = [heapq.heappop(heap) for _ in range(min(cfg.batch_size, len(heap)))]
            arr = np.array([item[3] for item in batch], dtype=np.float64)
            if pool is None:
                outcome, viol = _classify(arr, limit, bound, cfg.semantics)
            else:
                chunks = np.array_split(arr, threads)
                parts = list(pool.map(lambda c: _classify(c, limit, bound, cfg.semantics),
                                      [c for c in chunks if len(c)]))
                outcome = np.concatenate([p[0] for p in parts])
                viol = np.concatenate([p[1] for p in parts])
            processed += len(batch)
            for (key, _, depth, b), oc, vb in zip(batch, outcome, viol):
                max_depth_seen = max(max_depth_seen, depth)
                if oc == OUTSIDE:
                    outside += 1
                elif oc == ACCEPT:
                    accepted += 1
                elif vb != 0:
                    if violation is None:
                        c = complex(0.5 * (b[0] + b[1]), 0.5 * (b[2] + b[3]))
                        violation = Violation(c, int(vb), _point_ab_upper(c, int(vb), bound))
                elif depth >= cfg.max_depth or max(b[1] - b[0], b[3] - b[2]) <= cfg.min_box_width:
                    unresolved.append(b)
                else:
                    if b[1] - b[0] >= b[3] - b[2]:
                        m = 0.5 * (b[0] + b[1])
                        push((b[0], m, b[2], b[3]), depth + 1)
                        push((m, b[1], b[2], b[3]), depth + 1)
                    else:
                        m = 0.5 * (b[2] + b[3])
                        push((b[0], b[1], b[2], m), depth + 1)
                        push((b[0], b[1], m, b[3]), depth + 1)
    finally:
        if pool is not None:
            pool.shutdown()

    if violation is not None:
        status = "refuted"
    elif unresolved:
        status = "inconclusive"
    else:
        status = "certified"
    unresolved.sort()
    return CertificateReport(
        region=dom,
        bound=bound,
        certified=status == "certified",
        status=status,
        boxes_processed=processed,
        max_depth_reached=max_depth_seen,
        unresolved_boxes=unresolved,
        boxes_accepted=accepted,
        boxes_outside=outside,
        violation=violation,
        config=cfg,
        wall_time=time.perf_counter() - start,
    )


# --------------------------------------------------------------------------
# grid evidence
# --------------------------------------------------------------------------

@dataclass
class GridScan:
    min_ab: float
    argmin: complex
    re: np.ndarray = field(repr=False)
    im: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)  # NaN marks missing entries

    def rows(self):
        for x, y, v in zip(self.re, self.im, self.values):
            yield float(x), float(y), (None if np.isnan(v) else float(v))

    def write_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("re,im,ab_min_branch\n")
            for x, y, v in self.rows():
                fh.write(f"{x!r},{y!r},{'' if v is None else repr(v)}\n")


def grid_scan(dom: EllipseDomain, nx: int, ny: int, semantics: str = "admissible") -> GridScan:
    """Min over branches of AB on an ``nx`` x ``ny`` grid over the bounding box,
    kept to grid points inside ``dom``. Non-rigorous evidence."""
    if nx < 2 or ny < 2:
        raise ValueError("nx and ny must be at least 2")
    x0, x1, y0, y1 = dom.bounding_box()
    X, Y = np.meshgrid(np.linspace(x0, x1, nx), np.linspace(y0, y1, ny))
    a = (X + 1j * Y).ravel()
    h = np.abs(1 - a) + np.abs(a)
    member = h < dom.limit if dom.margin == 0 else h <= dom.limit
    a = a[member]
    vals = ab_min_branch(a, semantics)
    if np.all(np.isnan(vals)):
        return GridScan(math.nan, complex(math.nan, math.nan), a.real, a.imag, vals)
    k = int(np.nanargmin(vals))
    return GridScan(float(vals[k]), complex(a[k]), a.real, a.imag, vals)
