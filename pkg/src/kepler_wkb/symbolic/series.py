"""Truncated Laurent/Puiseux series at the origin or at infinity.

A series stores ``coeffs[j]`` as the coefficient of ``x**(valuation + j)``
where the series variable x is

* ``t = r**(1/s)`` at the origin (ramification s >= 1),
* ``u = 1/r`` at infinity (s = 1).

Every series carries a fixed number of significant terms; an operation keeps
the smaller term count of its operands, so absolute precision follows the
valuation the way it does for power series over a valued field.
"""

from __future__ import annotations

import enum
from numbers import Number

import numpy as np
from scipy.linalg import solve_triangular, toeplitz

LEADING_TOL = 1e-14


class Point(enum.Enum):
    ORIGIN = "origin"
    INFINITY = "infinity"


class SingularSeriesError(ArithmeticError):
    pass


class InsufficientOrderError(ArithmeticError):
    pass


class PuiseuxSeries:
    __slots__ = ("coeffs", "valuation", "s", "point")

    def __init__(self, coeffs, valuation: int = 0, s: int = 1, point: Point = Point.ORIGIN):
        self.coeffs = np.asarray(coeffs, dtype=complex).copy()
        self.valuation = int(valuation)
        self.s = int(s)
        self.point = point
        if self.s < 1:
            raise ValueError("ramification must be >= 1")
        if point is Point.INFINITY and self.s != 1:
            raise ValueError("series at infinity use u = 1/r with s = 1")

    # construction helpers
    @classmethod
    def from_polynomial(cls, coeffs, point: Point, s: int, nterms: int) -> "PuiseuxSeries":
        """Series of the polynomial sum_j c_j r^j, exact up to ``nterms`` terms."""
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        if point is Point.ORIGIN:
            out = np.zeros(max(nterms, 1), dtype=complex)
            for j, cj in enumerate(c):
                if j * s < out.size:
                    out[j * s] = cj
            return cls(out, 0, s, point)._normalized()
        # r^j = u^-j; valuation is minus the degree
        deg = c.size - 1
        out = np.zeros(max(nterms, 1), dtype=complex)
        for j, cj in enumerate(c):
            k = deg - j
            if k < out.size:
                out[k] = cj
        return cls(out, -deg, 1, point)._normalized()

    def like(self, coeffs, valuation) -> "PuiseuxSeries":
        return PuiseuxSeries(coeffs, valuation, self.s, self.point)

    def _constant(self, c) -> "PuiseuxSeries":
        # exact constant padded to at least this series' precision
        out = np.zeros(max(self.precision, 1), dtype=complex)
        out[0] = c
        return self.like(out, 0)

    def _normalized(self) -> "PuiseuxSeries":
        """Strip exact leading zeros (the term count drops accordingly)."""
        nz = np.nonzero(self.coeffs)[0]
        if nz.size == 0 or nz[0] == 0:
            return self
        k = nz[0]
        return self.like(self.coeffs[k:], self.valuation + k)

    # basic properties
    @property
    def nterms(self) -> int:
        return self.coeffs.size

    @property
    def precision(self) -> int:
        """First exponent (in the series variable) that is not known."""
        return self.valuation + self.nterms

    @property
    def leading(self) -> complex:
        return self.coeffs[0]

    def coefficient(self, exponent: int) -> complex:
        if exponent >= self.precision:
            raise InsufficientOrderError(
                f"exponent {exponent} beyond known precision {self.precision}"
            )
        j = exponent - self.valuation
        return complex(self.coeffs[j]) if j >= 0 else 0j

    def truncate(self, precision: int) -> "PuiseuxSeries":
        keep = max(0, min(self.nterms, precision - self.valuation))
        return self.like(self.coeffs[:keep], self.valuation)

    def __repr__(self):
        var = "u" if self.point is Point.INFINITY else ("r" if self.s == 1 else f"r^(1/{self.s})")
        shown = ", ".join(f"{c:.4g}" for c in self.coeffs[:6])
        return f"PuiseuxSeries({var}^{self.valuation} * [{shown}, ...] + O({var}^{self.precision}))"

    def __call__(self, r):
        """Evaluate the truncated sum at r (principal branch of r^(1/s))."""
        r = np.asarray(r, dtype=complex)
        x = 1.0 / r if self.point is Point.INFINITY else r ** (1.0 / self.s)
        exps = self.valuation + np.arange(self.nterms)
        return np.sum(self.coeffs[:, None] * x.reshape(1, -1) ** exps[:, None], axis=0).reshape(r.shape)

    # arithmetic
    def _check(self, other: "PuiseuxSeries"):
        if other.s != self.s or other.point is not self.point:
            raise ValueError("series with different variables")

    def __add__(self, other):
        if isinstance(other, Number):
            other = self._constant(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check(other)
        v = min(self.valuation, other.valuation)
        prec = min(self.precision, other.precision)
        if prec <= v:
            return self.like(np.zeros(0), v)
        out = np.zeros(prec - v, dtype=complex)
        for ser in (self, other):
            take = max(0, min(ser.nterms, prec - ser.valuation))
            out[ser.valuation - v : ser.valuation - v + take] += ser.coeffs[:take]
        return self.like(out, v)._normalized()

    __radd__ = __add__

    def __neg__(self):
        return self.like(-self.coeffs, self.valuation)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return self.like(self.coeffs * other, self.valuation)._normalized()
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        self._check(other)
        n = min(self.nterms, other.nterms)
        prod = np.convolve(self.coeffs[:n], other.coeffs[:n])[:n]
        return self.like(prod, self.valuation + other.valuation)._normalized()

    __rmul__ = __mul__

    def inverse(self) -> "PuiseuxSeries":
        if self.nterms == 0 or abs(self.leading) < LEADING_TOL:
            raise SingularSeriesError("leading coefficient vanishes; cannot invert")
        # b solves the lower-triangular Toeplitz system a * b = 1
        n = self.nterms
        lower = toeplitz(self.coeffs, np.zeros(n, dtype=complex))
        rhs = np.zeros(n, dtype=complex)
        rhs[0] = 1.0
        b = solve_triangular(lower, rhs, lower=True, check_finite=False)
        return self.like(b, -self.valuation)

    def __truediv__(self, other):
        if isinstance(other, Number):
            return self * (1.0 / other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        result = self._constant(1.0).truncate(self.nterms) if k == 0 else None
        base = self
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def sqrt(self, branch: int = 1) -> "PuiseuxSeries":
        """Square root with leading coefficient ``branch * principal_sqrt(leading)``."""
        if branch not in (1, -1):
            raise ValueError("branch must be +1 or -1")
        if self.nterms == 0 or abs(self.leading) < LEADING_TOL:
            raise SingularSeriesError("leading coefficient vanishes; square root is singular")
        if self.valuation % 2:
            raise SingularSeriesError(
                f"odd valuation {self.valuation}: increase the ramification to take this root"
            )
        a = self.coeffs
        n = self.nterms
        b = np.zeros(n, dtype=complex)
        b[0] = branch * np.sqrt(a[0])
        for k in range(1, n):
            acc = np.dot(b[1:k], b[k - 1 : 0 : -1]) if k > 1 else 0.0
            b[k] = (a[k] - acc) / (2.0 * b[0])
        return self.like(b, self.valuation // 2)

    def derivative(self) -> "PuiseuxSeries":
        """d/dr of the series."""
        exps = self.valuation + np.arange(self.nterms)
        if self.point is Point.INFINITY:
            # d/dr u^j = -j u^(j+1)
            return self.like(-exps * self.coeffs, self.valuation + 1)._normalized()
        # d/dr t^j = (j/s) t^(j-s)
        return self.like(exps * self.coeffs / self.s, self.valuation - self.s)._normalized()

    # residues
    def residue_at_zero(self) -> complex:
        """Coefficient of r^-1 of a series at the origin."""
        if self.point is not Point.ORIGIN:
            raise ValueError("residue_at_zero needs an expansion at the origin")
        return self.coefficient(-self.s)

    def residue_at_infinity(self) -> complex:
        """Res_inf f = -[coefficient of 1/r]; the clockwise big circle gives 2 pi i times this."""
        if self.point is not Point.INFINITY:
            raise ValueError("residue_at_infinity needs an expansion at infinity")
        return -self.coefficient(1)


def series_sqrt(x: PuiseuxSeries, branch: int = 1) -> PuiseuxSeries:
    return x.sqrt(branch)


def residue_at_zero(x: PuiseuxSeries) -> complex:
    return x.residue_at_zero()
