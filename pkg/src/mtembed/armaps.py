"""Exact algebra for generalised Ahern-Rudin maps ``g(z, w) = (z, w, P)``.

Polynomials are sparse dicts from exponent 4-tuples to Gaussian rationals.
For a :class:`SparseHermitianPolynomial` the exponents refer to
``(z, zb, w, wb)``; for a :class:`HolomorphicPolynomial4` to
``(w1, w2, w3, w4)``. The holomorphic extension substitutes
``z -> w1, zb -> w2, w -> w3, wb -> w4``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping

import numpy as np

Exp = tuple[int, int, int, int]


@dataclass(frozen=True)
class GaussianRational:
    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", Fraction(self.re))
        object.__setattr__(self, "im", Fraction(self.im))

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(Fraction(x))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        if not self.im:
            return str(self.re)
        return f"({self.re}+{self.im}i)"


I = GaussianRational(0, 1)


class _SparsePoly4:
    """Shared sparse arithmetic; subclasses fix the variable names."""

    names: tuple[str, str, str, str] = ("x1", "x2", "x3", "x4")

    def __init__(self, terms: Mapping[Exp, object] | Iterable[tuple[Exp, object]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[Exp, GaussianRational] = {}
        for e, c in items:
            e = tuple(int(k) for k in e)
            if len(e) != 4 or any(k < 0 for k in e):
                raise ValueError(f"bad exponent tuple {e}")
            acc[e] = acc.get(e, GaussianRational()) + GaussianRational.coerce(c)
        self.terms: dict[Exp, GaussianRational] = {e: c for e, c in sorted(acc.items()) if c}

    @classmethod
    def monomial(cls, e: Exp, c=1):
        return cls({e: c})

    def __eq__(self, other):
        return type(self) is type(other) and self.terms == other.terms

    def __hash__(self):
        return hash(tuple(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other):
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, GaussianRational()) + c
        return type(self)(out)

    def __neg__(self):
        return type(self)({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = GaussianRational.coerce(c)
        return type(self)({e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        if not isinstance(other, _SparsePoly4):
            return self.scale(other)
        out: dict[Exp, GaussianRational] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, GaussianRational()) + c1 * c2
        return type(self)(out)

    def __rmul__(self, other):
        return self.scale(other)

    def diff(self, k: int):
        """Partial derivative in variable ``k`` (treated as independent)."""
        out = {}
        for e, c in self.terms.items():
            if e[k]:
                ne = list(e)
                ne[k] -= 1
                out[tuple(ne)] = c * e[k]
        return type(self)(out)

    def evaluate(self, x1, x2, x3, x4) -> complex:
        vals = (x1, x2, x3, x4)
        total = 0j
        for e, c in self.terms.items():
            m = complex(c)
            for v, k in zip(vals, e):
                if k:
                    m *= v ** k
            total += m
        return total

    def evaluate_exact(self, *vals) -> GaussianRational:
        """Exact value at Gaussian-rational arguments."""
        vals = [GaussianRational.coerce(v) for v in vals]
        total = GaussianRational()
        for e, c in self.terms.items():
            m = c
            for v, k in zip(vals, e):
                for _ in range(k):
                    m = m * v
            total = total + m
        return total

    # -- serialisation ------------------------------------------------------
    def to_json(self) -> dict:
        return {"terms": [
            {"e": list(e), "c": [c.re.numerator, c.re.denominator, c.im.numerator, c.im.denominator]}
            for e, c in self.terms.items()
        ]}

    @classmethod
    def from_json(cls, data: Mapping):
        if "terms" not in data or not isinstance(data["terms"], list):
            raise ValueError("polynomial JSON needs a 'terms' list")
        terms = []
        for k, t in enumerate(data["terms"]):
            try:
                e = t["e"]
                rn, rd, inum, idn = t["c"]
            except (KeyError, TypeError, ValueError) as exc:
                raise ValueError(f"terms[{k}]: expected {{'e': [4 ints], 'c': [4 ints]}}") from exc
            if len(e) != 4 or not all(isinstance(x, int) and x >= 0 for x in e):
                raise ValueError(f"terms[{k}].e must hold 4 nonnegative integers")
            if not all(isinstance(x, int) for x in (rn, rd, inum, idn)) or rd == 0 or idn == 0:
                raise ValueError(f"terms[{k}].c must hold integers with nonzero denominators")
            terms.append((tuple(e), GaussianRational(Fraction(rn, rd), Fraction(inum, idn))))
        return cls(terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms.items():
            mono = "*".join(f"{n}^{k}" if k > 1 else n for n, k in zip(self.names, e) if k)
            parts.append(f"{c!r}*{mono}" if mono else repr(c))
        return " + ".join(parts)


class SparseHermitianPolynomial(_SparsePoly4):
    """Polynomial in ``z, zb, w, wb`` (exponents ``(alpha, beta, gamma, delta)``)."""

    names = ("z", "zb", "w", "wb")

    def bidegree(self) -> tuple[int, int] | None:
        """``(p, q)`` if every term has holomorphic degree p and antiholomorphic q."""
        degs = {(e[0] + e[2], e[1] + e[3]) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def has_bidegree(self, p: int, q: int) -> bool:
        return all(e[0] + e[2] == p and e[1] + e[3] == q for e in self.terms)

    def is_radial(self) -> bool:
        """Depends only on ``|z|^2`` and ``|w|^2``."""
        return all(e[0] == e[1] and e[2] == e[3] for e in self.terms)

    def evaluate_zw(self, z: complex, w: complex) -> complex:
        return self.evaluate(z, z.conjugate(), w, w.conjugate())


class HolomorphicPolynomial4(_SparsePoly4):
    """Polynomial in ``w1, w2, w3, w4``."""

    names = ("w1", "w2", "w3", "w4")


def Z(c=1):
    return SparseHermitianPolynomial.monomial((1, 0, 0, 0), c)


def ZB(c=1):
    return SparseHermitianPolynomial.monomial((0, 1, 0, 0), c)


def W(c=1):
    return SparseHermitianPolynomial.monomial((0, 0, 1, 0), c)


def WB(c=1):
    return SparseHermitianPolynomial.monomial((0, 0, 0, 1), c)


def P_AR() -> SparseHermitianPolynomial:
    """Third component of the Ahern-Rudin map: ``w zb wb^2 + i z zb^2 wb``."""
    return SparseHermitianPolynomial({(0, 1, 1, 2): 1, (1, 2, 0, 1): I})


# --------------------------------------------------------------------------
# operations
# --------------------------------------------------------------------------

def laplacian(Q: SparseHermitianPolynomial) -> SparseHermitianPolynomial:
    """``d^2Q/dz dzb + d^2Q/dw dwb``."""
    return Q.diff(0).diff(1) + Q.diff(2).diff(3)


def apply_operator(Q: SparseHermitianPolynomial) -> SparseHermitianPolynomial:
    """``zb dQ/dw - wb dQ/dz``."""
    return ZB() * Q.diff(2) - WB() * Q.diff(0)


class ArmapError(ValueError):
    pass


def weighted_sum(parts) -> SparseHermitianPolynomial:
    """``sum Q_j / (p_j (q_j + 1))`` after validating each part."""
    total = SparseHermitianPolynomial()
    for k, (Q, p, q) in enumerate(parts):
        if p < 1 or q < 0:
            raise ArmapError(f"part {k}: need p >= 1 and q >= 0, got ({p}, {q})")
        if not Q.has_bidegree(p, q):
            raise ArmapError(f"part {k}: polynomial does not have bidegree ({p}, {q})")
        if not laplacian(Q).is_zero():
            raise ArmapError(f"part {k}: polynomial is not harmonic")
        total = total + Q.scale(Fraction(1, p * (q + 1)))
    return total


def build_P(parts) -> SparseHermitianPolynomial:
    """Apply ``zb d/dw - wb d/dz`` to the weighted sum of harmonic parts."""
    return apply_operator(weighted_sum(parts))


def extend(P: SparseHermitianPolynomial) -> HolomorphicPolynomial4:
    return HolomorphicPolynomial4(P.terms)


def divisible_by_conj(P: SparseHermitianPolynomial) -> bool:
    """True iff ``zb * wb`` divides P (the zero polynomial counts as divisible)."""
    return all(e[1] >= 1 and e[3] >= 1 for e in P.terms)


def eval_G(P: SparseHermitianPolynomial, Wpt) -> tuple[complex, complex, complex]:
    w1, w2, w3, w4 = Wpt
    return (complex(w1), complex(w3), extend(P).evaluate(w1, w2, w3, w4))


@dataclass(frozen=True)
class SphereVerdict:
    vanishes: bool
    exact: bool
    method: str
    min_abs: float | None = None
    samples: int = 0
    detail: str = ""


def _radial_restriction(Q: SparseHermitianPolynomial):
    """Real and imaginary parts of Q on S^3 as polynomials in x = |z|^2."""
    import sympy

    x = sympy.Symbol("x")
    re = sympy.Integer(0)
    im = sympy.Integer(0)
    for e, c in Q.terms.items():
        mono = x ** e[0] * (1 - x) ** e[2]
        re += sympy.Rational(c.re.numerator, c.re.denominator) * mono
        im += sympy.Rational(c.im.numerator, c.im.denominator) * mono
    return x, sympy.Poly(sympy.expand(re), x), sympy.Poly(sympy.expand(im), x)


def nonvanishing_on_sphere(Q: SparseHermitianPolynomial, n_samples: int = 100_000,
                           seed: int = 0) -> SphereVerdict:
    """Does Q vanish somewhere on the unit sphere of C^2?

    Radial Q restricts to ``r(x) + i s(x)`` on ``x in [0, 1]``; it vanishes iff
    ``gcd(r, s)`` has a real root there, which Sturm counting decides exactly.
    Other Q are sampled and the verdict is probabilistic.
    """
    if Q.is_zero():
        return SphereVerdict(True, True, "exact", 0.0, detail="Q is identically zero")
    if Q.is_radial():
        import sympy

        x, r, s = _radial_restriction(Q)
        if r.is_zero and s.is_zero:
            return SphereVerdict(True, True, "exact", 0.0, detail="restriction is identically zero")
        g = s if r.is_zero else (r if s.is_zero else sympy.gcd(r, s))
        if g.degree() == 0:
            return SphereVerdict(False, True, "exact", detail="gcd of real and imaginary parts is constant")
        n = int(g.count_roots(0, 1))
        return SphereVerdict(n > 0, True, "exact", detail=f"common factor {g.as_expr()} has {n} root(s) in [0,1]")

    rng = np.random.default_rng(seed)
    v = rng.normal(size=(n_samples, 4))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    z = v[:, 0] + 1j * v[:, 1]
    w = v[:, 2] + 1j * v[:, 3]
    vals = np.zeros(n_samples, dtype=np.complex128)
    for e, c in Q.terms.items():
        vals += complex(c) * z ** e[0] * np.conj(z) ** e[1] * w ** e[2] * np.conj(w) ** e[3]
    m = float(np.min(np.abs(vals)))
    return SphereVerdict(m == 0.0, False, "sampled", m, n_samples,
                         detail="probabilistic: minimum |Q| over random sphere points")


def radial_harmonic(k: int, scale=1) -> SparseHermitianPolynomial:
    """The (unique up to scale) harmonic polynomial of bidegree (k, k) in ``|z|^2, |w|^2``.

    Coefficients of ``|z|^{2j} |w|^{2(k-j)}`` follow
    ``c_j j^2 + c_{j-1} (k - j + 1)^2 = 0`` with ``c_0 = 1``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    coeffs = [Fraction(1)]
    for j in range(1, k + 1):
        coeffs.append(-coeffs[-1] * (k - j + 1) ** 2 / (j * j))
    return SparseHermitianPolynomial(
        {(j, j, k - j, k - j): GaussianRational.coerce(scale) * c for j, c in enumerate(coeffs)})


def collision_test(P: SparseHermitianPolynomial, t: float) -> dict:
    """Evaluate G at the two witnesses ``(u, 1/u, u, 0)`` and ``(u, 0, u, 1/u)`` of M_t."""
    u = math.sqrt(0.5 * (t + math.sqrt(max(t * t - 2.0, 0.0))))
    g1 = eval_G(P, (u, 1 / u, u, 0))
    g2 = eval_G(P, (u, 0, u, 1 / u))
    dist = max(abs(a - b) for a, b in zip(g1, g2))
    return {"u": u, "G_Wu": g1, "G_Wu_prime": g2, "distance": dist, "collide": dist <= 1e-12}
