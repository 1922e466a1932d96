"""Functions of the form A(r) + B(r) p(r) with p^2 rational in r.

``MomentumField`` holds the data shared by every term of one orbit: the factor
basis of denominators, p^2 itself and the logarithmic derivative p'/p.  All
WKB quantities y_k live in this quadratic extension, so sums, products,
derivatives and division by p never leave it.
"""

from __future__ import annotations

from numbers import Number

import numpy as np

from ..atomic import OrbitGeometry, momentum
from .rational import FactorBasis, RationalFn
from .series import InsufficientOrderError, Point, PuiseuxSeries

DEFAULT_NTERMS = 40


class MomentumField:
    """p^2 = 2(E + 1/r - L^2/2r^2) for one orbit, in exact rational form."""

    def __init__(self, orbit: OrbitGeometry):
        self.orbit = orbit
        E, L = orbit.E, orbit.L
        if L == 0.0:
            # p^2 = 2E (r - r2) / r; the inner turning point sits at the origin
            basis = FactorBasis([[0.0, 1.0], [-orbit.r2, 1.0]], scale=orbit.a, names=("r", "r - r2"))
            self.p2 = RationalFn([2.0 * E * -orbit.r2, 2.0 * E], (1, 0), basis)
        else:
            qm = [-L * L / (2.0 * E), 1.0 / E, 1.0]
            basis = FactorBasis([[0.0, 1.0], qm], scale=orbit.a, names=("r", "(r - r1)(r - r2)"))
            self.p2 = RationalFn(np.multiply(2.0 * E, qm), (2, 0), basis)
        self.basis = basis
        self.inv_p2 = self.p2.reciprocal()
        # p'/p = (p^2)' / (2 p^2)
        self.dlogp = self.p2.derivative() * self.inv_p2 * 0.5
        self._series_cache: dict[tuple[Point, int], PuiseuxSeries] = {}
        self._inverse_cache: dict[tuple[int, int, Point, int], PuiseuxSeries] = {}

    def rational(self, num, r_power: int = 0) -> RationalFn:
        """num(r) / r**r_power as a RationalFn over this field's basis."""
        powers = (r_power,) + (0,) * (len(self.basis) - 1)
        return RationalFn(num, powers, self.basis)

    def zero(self) -> "WkbTerm":
        z = RationalFn.zero(self.basis)
        return WkbTerm(z, z, self)

    def constant(self, c) -> "WkbTerm":
        return WkbTerm(RationalFn.constant(c, self.basis), RationalFn.zero(self.basis), self)

    def p(self) -> "WkbTerm":
        return WkbTerm(RationalFn.zero(self.basis), RationalFn.constant(1.0, self.basis), self)

    # series of p
    def momentum_series(self, at: Point, nterms: int = DEFAULT_NTERMS) -> PuiseuxSeries:
        key = (at, nterms)
        if key not in self._series_cache:
            self._series_cache[key] = self._momentum_series(at, nterms)
        return self._series_cache[key]

    def _momentum_series(self, at: Point, nterms: int) -> PuiseuxSeries:
        p2 = self.rational_series(self.p2, at, nterms)
        candidates = [p2.sqrt(+1), p2.sqrt(-1)]
        r_test = self._test_point(at)
        target = complex(momentum(r_test, self.orbit))
        errs = [abs(c(np.array([r_test]))[0] - target) for c in candidates]
        return candidates[int(np.argmin(errs))]

    def rational_series(self, f: RationalFn, at: Point, nterms: int) -> PuiseuxSeries:
        """Series of f at ``at``, reusing the inverted denominator factors."""
        s = self.ramification(at)
        out = PuiseuxSeries.from_polynomial(f.num, at, s, nterms)
        for i, k in enumerate(f.powers):
            if k:
                key = (i, k, at, nterms)
                if key not in self._inverse_cache:
                    den = PuiseuxSeries.from_polynomial(self.basis.factors[i], at, s, nterms)
                    self._inverse_cache[key] = den.inverse() ** k
                out = out * self._inverse_cache[key]
        return out

    def ramification(self, at: Point) -> int:
        return 2 if (at is Point.ORIGIN and self.orbit.L == 0.0) else 1

    def _test_point(self, at: Point) -> float:
        o = self.orbit
        if at is Point.INFINITY:
            return 4.0 * o.r2
        if o.L == 0.0:
            return 1e-3 * o.r2  # on the upper lip, p > 0 there
        return 0.5 * o.r1


def rational_series(f: RationalFn, at: Point, s: int, nterms: int) -> PuiseuxSeries:
    out = PuiseuxSeries.from_polynomial(f.num, at, s, nterms)
    for factor, k in zip(f.basis.factors, f.powers):
        if k:
            den = PuiseuxSeries.from_polynomial(factor, at, s, nterms)
            out = out * den.inverse() ** k
    return out


class WkbTerm:
    """Exact representation of A(r) + B(r) * p(r)."""

    __slots__ = ("A", "B", "field")

    def __init__(self, A: RationalFn, B: RationalFn, field: MomentumField):
        self.A = A
        self.B = B
        self.field = field

    def __repr__(self):
        return f"WkbTerm(A={self.A.to_string()}, B={self.B.to_string()})"

    def to_string(self) -> str:
        return f"{self.A.to_string()} + {self.B.to_string()} * p"

    def _coerce(self, other):
        if isinstance(other, WkbTerm):
            return other
        if isinstance(other, Number):
            return self.field.constant(other)
        if isinstance(other, RationalFn):
            return WkbTerm(other, RationalFn.zero(self.field.basis), self.field)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return WkbTerm(self.A + other.A, self.B + other.B, self.field)

    __radd__ = __add__

    def __neg__(self):
        return WkbTerm(-self.A, -self.B, self.field)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return WkbTerm(self.A * other, self.B * other, self.field)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        p2 = self.field.p2
        A = self.A * other.A + self.B * other.B * p2
        B = self.A * other.B + self.B * other.A
        return WkbTerm(A, B, self.field)

    __rmul__ = __mul__

    def conjugate_p(self) -> "WkbTerm":
        """A - B p, the image under p -> -p."""
        return WkbTerm(self.A, -self.B, self.field)

    def norm(self) -> RationalFn:
        """(A + Bp)(A - Bp) = A^2 - B^2 p^2."""
        return self.A * self.A - self.B * self.B * self.field.p2

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1.0 / other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        inv_norm = other.norm().reciprocal()
        num = self * other.conjugate_p()
        return WkbTerm(num.A * inv_norm, num.B * inv_norm, self.field)

    def divide_by_p(self) -> "WkbTerm":
        """(A + Bp)/p = B + (A/p^2) p."""
        return WkbTerm(self.B, self.A * self.field.inv_p2, self.field)

    def derivative(self) -> "WkbTerm":
        """d/dr (A + Bp) = A' + (B' + B p'/p) p."""
        B = self.B.derivative() + self.B * self.field.dlogp
        return WkbTerm(self.A.derivative(), B, self.field)

    def __call__(self, r, p=None):
        r = np.asarray(r, dtype=complex)
        if p is None:
            p = momentum(r, self.field.orbit)
        return self.A(r) + self.B(r) * p

    def degrees(self) -> tuple[int, int]:
        return self.A.degree, self.B.degree

    def expand(self, at: Point, nterms: int = DEFAULT_NTERMS) -> PuiseuxSeries:
        fld = self.field
        out = fld.rational_series(self.A, at, nterms)
        if not self.B.is_zero():
            out = out + fld.rational_series(self.B, at, nterms) * fld.momentum_series(at, nterms)
        return out


def wkb_differentiate(term: WkbTerm) -> WkbTerm:
    return term.derivative()


def expand(term: WkbTerm, at: Point, order: int = DEFAULT_NTERMS, max_order: int = 640) -> PuiseuxSeries:
    """Series of ``term`` at ``at`` that resolves the r^-1 coefficient.

    The term count starts at ``order`` and doubles until the exponent of
    1/r is inside the known window.
    """
    nterms = order
    while True:
        ser = term.expand(at, nterms)
        needed = -ser.s if at is Point.ORIGIN else 1
        if ser.precision > needed:
            return ser
        if nterms >= max_order:
            raise InsufficientOrderError(
                f"series at {at.value} known only below exponent {ser.precision} with {nterms} terms"
            )
        nterms *= 2
