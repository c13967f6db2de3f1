"""Outward-rounded real intervals and complex boxes.

Every primitive widens its result by one ulp on each side with
``np.nextafter``, which is enough because IEEE round-to-nearest is off by at
most half an ulp. Bounds may be Python floats or numpy arrays of equal shape;
the array form lets the certifier evaluate thousands of boxes per call.
"""

from __future__ import annotations

import numpy as np

_INF = np.inf


def _down(x):
    return np.nextafter(x, -_INF)


def _up(x):
    return np.nextafter(x, _INF)


def _f64(x):
    return np.asarray(x, dtype=np.float64)


class RealInterval:
    """Closed interval ``[lo, hi]`` (elementwise when the bounds are arrays)."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        lo = _f64(lo)
        hi = lo if hi is None else _f64(hi)
        if np.any(lo > hi):
            raise ValueError(f"empty interval: lo={lo} > hi={hi}")
        self.lo = lo
        self.hi = hi

    @classmethod
    def whole(cls, shape=()):
        return cls(np.full(shape, -_INF), np.full(shape, _INF))

    @classmethod
    def _raw(cls, lo, hi):
        obj = cls.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    def __repr__(self):
        if np.ndim(self.lo) == 0:
            return f"RealInterval({float(self.lo)!r}, {float(self.hi)!r})"
        return f"RealInterval(shape={np.shape(self.lo)})"

    # -- predicates ---------------------------------------------------------
    def contains(self, x):
        return (self.lo <= x) & (x <= self.hi)

    def contains_zero(self):
        return (self.lo <= 0.0) & (self.hi >= 0.0)

    def is_whole(self):
        return np.isneginf(self.lo) & np.isposinf(self.hi)

    @property
    def width(self):
        return self.hi - self.lo

    @property
    def mid(self):
        return 0.5 * self.lo + 0.5 * self.hi

    def hull(self, other: "RealInterval") -> "RealInterval":
        return RealInterval._raw(np.minimum(self.lo, other.lo), np.maximum(self.hi, other.hi))

    # -- arithmetic ---------------------------------------------------------
    @staticmethod
    def _coerce(x) -> "RealInterval":
        if isinstance(x, RealInterval):
            return x
        v = _f64(x)
        return RealInterval._raw(v, v)

    def __neg__(self):
        return RealInterval._raw(-self.hi, -self.lo)

    def __add__(self, other):
        o = self._coerce(other)
        return RealInterval._raw(_down(self.lo + o.lo), _up(self.hi + o.hi))

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return RealInterval._raw(_down(self.lo - o.hi), _up(self.hi - o.lo))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        with np.errstate(invalid="ignore"):
            p = np.stack(
                np.broadcast_arrays(self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
            )
        # 0 * inf is 0 under interval conventions
        p = np.where(np.isnan(p), 0.0, p)
        return RealInterval._raw(_down(p.min(axis=0)), _up(p.max(axis=0)))

    __rmul__ = __mul__

    def reciprocal(self) -> "RealInterval":
        """``1/x``; the whole line wherever the interval touches zero."""
        zero = self.contains_zero()
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            lo = _down(1.0 / self.hi)
            hi = _up(1.0 / self.lo)
        return RealInterval._raw(np.where(zero, -_INF, lo), np.where(zero, _INF, hi))

    def __truediv__(self, other):
        o = self._coerce(other)
        q = self * o.reciprocal()
        zero = o.contains_zero()
        return RealInterval._raw(np.where(zero, -_INF, q.lo), np.where(zero, _INF, q.hi))

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def sqr(self) -> "RealInterval":
        """Square with the dependency handled (never negative)."""
        lo2 = self.lo * self.lo
        hi2 = self.hi * self.hi
        pos = self.lo >= 0.0
        neg = self.hi <= 0.0
        lo = np.where(pos, lo2, np.where(neg, hi2, 0.0))
        hi = np.where(pos, hi2, np.where(neg, lo2, np.maximum(lo2, hi2)))
        return RealInterval._raw(np.maximum(_down(lo), 0.0), _up(hi))

    def sqrt(self) -> "RealInterval":
        """Square root of the nonnegative part; negative parts are clipped to 0."""
        lo = np.maximum(self.lo, 0.0)
        hi = np.maximum(self.hi, 0.0)
        return RealInterval._raw(np.maximum(_down(np.sqrt(lo)), 0.0), _up(np.sqrt(hi)))


class ComplexBox:
    """Rectangle ``re + i*im`` in the complex plane."""

    __slots__ = ("re", "im")

    def __init__(self, re: RealInterval, im: RealInterval):
        self.re = re
        self.im = im

    @classmethod
    def point(cls, z) -> "ComplexBox":
        z = np.asarray(z, dtype=np.complex128)
        return cls(RealInterval(z.real.copy()), RealInterval(z.imag.copy()))

    @classmethod
    def from_bounds(cls, re_lo, re_hi, im_lo, im_hi) -> "ComplexBox":
        return cls(RealInterval(re_lo, re_hi), RealInterval(im_lo, im_hi))

    def __repr__(self):
        return f"ComplexBox(re={self.re!r}, im={self.im!r})"

    def contains(self, z) -> np.ndarray:
        z = np.asarray(z, dtype=np.complex128)
        return self.re.contains(z.real) & self.im.contains(z.imag)

    @property
    def mid(self):
        return self.re.mid + 1j * self.im.mid

    @staticmethod
    def _coerce(x) -> "ComplexBox":
        if isinstance(x, ComplexBox):
            return x
        if isinstance(x, RealInterval):
            return ComplexBox(x, RealInterval(0.0))
        return ComplexBox.point(x)

    def conj(self) -> "ComplexBox":
        return ComplexBox(self.re, -self.im)

    def __neg__(self):
        return ComplexBox(-self.re, -self.im)

    def __add__(self, other):
        o = self._coerce(other)
        return ComplexBox(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        return ComplexBox(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        o = self._coerce(other)
        return ComplexBox(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        den = o.abs2()
        num = self * o.conj()
        return ComplexBox(num.re / den, num.im / den)

    def square(self) -> "ComplexBox":
        """``z**2`` using ``x**2 - y**2`` so the real part avoids the dependency."""
        return ComplexBox(self.re.sqr() - self.im.sqr(), 2.0 * (self.re * self.im))

    def abs2(self) -> RealInterval:
        return self.re.sqr() + self.im.sqr()

    def abs(self) -> RealInterval:
        return self.abs2().sqrt()


def _sqrt_corner(x, yabs):
    """Rigorous enclosures of Re sqrt(z) and |Im sqrt(z)| at z = x + i*yabs, yabs >= 0."""
    X = RealInterval._raw(x, x)
    Y = RealInterval._raw(yabs, yabs)
    m = (X.sqr() + Y.sqr()).sqrt()
    half = 0.5
    # stable pairing: compute the large part by the sqrt formula, the small one by y/(2*large)
    re_direct = ((m + X) * half).sqrt()
    im_direct = ((m - X) * half).sqrt()
    with np.errstate(divide="ignore", invalid="ignore"):
        im_from_re = Y / (2.0 * re_direct)
        re_from_im = Y / (2.0 * im_direct)
    use_re = x >= 0.0
    ok_re = re_direct.lo > 0.0
    ok_im = im_direct.lo > 0.0
    im_lo = np.where(use_re & ok_re, np.maximum(im_from_re.lo, 0.0), im_direct.lo)
    im_hi = np.where(use_re & ok_re, im_from_re.hi, im_direct.hi)
    re_lo = np.where(~use_re & ok_im, np.maximum(re_from_im.lo, 0.0), re_direct.lo)
    re_hi = np.where(~use_re & ok_im, re_from_im.hi, re_direct.hi)
    return re_lo, re_hi, im_lo, im_hi


def interval_sqrt(b: ComplexBox) -> tuple[ComplexBox, ComplexBox]:
    """Enclose both square roots of every member of ``b``.

    Returns ``(S, -S)``. The box is cut along the real axis; on each half
    the principal root is monotone in each coordinate so corner values bound
    it. The two half enclosures are paired either directly or with one half
    negated (the latter follows the root continuously across the negative
    real axis); whichever hull is smaller is kept. Both pairings are sound
    because every member's roots are ``+s`` and ``-s``.
    """
    xlo, xhi = b.re.lo, b.re.hi
    ylo, yhi = b.im.lo, b.im.hi
    has_up = yhi >= 0.0
    has_dn = ylo <= 0.0

    # upper half: y in [max(ylo,0), yhi]
    u0 = np.maximum(ylo, 0.0)
    u1 = np.maximum(yhi, 0.0)
    r_lo, _, _, _ = _sqrt_corner(xlo, u0)
    _, r_hi, _, _ = _sqrt_corner(xhi, u1)
    _, _, i_lo, _ = _sqrt_corner(xhi, u0)
    _, _, _, i_hi = _sqrt_corner(xlo, u1)
    up = (r_lo, r_hi, i_lo, i_hi)

    # lower half: y in [ylo, min(yhi,0)], |y| in [|min(yhi,0)|, |ylo|]
    l0 = -np.minimum(yhi, 0.0)
    l1 = -np.minimum(ylo, 0.0)
    r_lo, _, _, _ = _sqrt_corner(xlo, l0)
    _, r_hi, _, _ = _sqrt_corner(xhi, l1)
    _, _, _, g_hi = _sqrt_corner(xlo, l1)
    _, _, g_lo, _ = _sqrt_corner(xhi, l0)
    dn = (r_lo, r_hi, -g_hi, -g_lo)

    def hull(p, q):
        return (np.minimum(p[0], q[0]), np.maximum(p[1], q[1]),
                np.minimum(p[2], q[2]), np.maximum(p[3], q[3]))

    direct = hull(up, dn)
    flipped = hull(up, (-dn[1], -dn[0], -dn[3], -dn[2]))
    size_d = (direct[1] - direct[0]) + (direct[3] - direct[2])
    size_f = (flipped[1] - flipped[0]) + (flipped[3] - flipped[2])
    both = has_up & has_dn
    pick_f = both & (size_f < size_d)

    out = []
    for k in range(4):
        v = np.where(pick_f, flipped[k], direct[k])
        v = np.where(both, v, np.where(has_up, up[k], dn[k]))
        out.append(v)
    s = ComplexBox(RealInterval._raw(out[0], out[1]), RealInterval._raw(out[2], out[3]))
    return s, -s
