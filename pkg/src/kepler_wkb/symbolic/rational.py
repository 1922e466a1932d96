"""Rational functions with complex coefficients over a fixed factor basis.

The denominator is kept factored as a product of powers of pairwise coprime
monic polynomials (the basis).  Sums then need no polynomial gcd: the common
denominator takes the larger power of each factor.  After each operation the
numerator is tested for divisibility by every factor still present in the
denominator and the common factor is removed.
"""

from __future__ import annotations

from numbers import Number

import numpy as np
from numpy.polynomial import polynomial as P

CANCEL_TOL = 1e-10


def _as_coeffs(c) -> np.ndarray:
    arr = np.atleast_1d(np.asarray(c, dtype=complex))
    return _trim(arr)


def _trim(c: np.ndarray) -> np.ndarray:
    # exact zeros only: tiny leading coefficients can dominate at large r
    nz = np.nonzero(c)[0]
    if nz.size == 0:
        return np.zeros(1, dtype=complex)
    return c[: nz[-1] + 1]


class FactorBasis:
    """Ordered collection of monic, pairwise coprime denominator factors.

    ``scale`` is a characteristic length used when judging whether a
    numerator vanishes at a factor's root (it matters for the root 0).
    """

    def __init__(self, factors, scale: float = 1.0, names=None):
        monic = []
        for f in factors:
            f = _as_coeffs(f)
            if f.size < 2:
                raise ValueError("basis factors must have degree >= 1")
            monic.append(f / f[-1])
        self.factors = tuple(monic)
        self.roots = tuple(P.polyroots(f) for f in self.factors)
        self.derivs = tuple(P.polyder(f) for f in self.factors)
        self.scale = float(scale)
        self.names = tuple(names) if names is not None else tuple(f"f{i}" for i in range(len(monic)))
        self._powers: dict[tuple[int, int], np.ndarray] = {}

    def __len__(self):
        return len(self.factors)

    def power(self, i: int, k: int) -> np.ndarray:
        key = (i, k)
        if key not in self._powers:
            self._powers[key] = P.polypow(self.factors[i], k) if k else np.ones(1, dtype=complex)
        return self._powers[key]

    def product(self, powers) -> np.ndarray:
        out = np.ones(1, dtype=complex)
        for i, k in enumerate(powers):
            if k:
                out = P.polymul(out, self.power(i, k))
        return out


class RationalFn:
    """``num(r) / prod_i basis[i](r) ** powers[i]`` with nonnegative powers."""

    __slots__ = ("num", "powers", "basis")

    def __init__(self, num, powers, basis: FactorBasis, normalize: bool = True):
        self.num = _as_coeffs(num)
        self.powers = tuple(int(k) for k in powers)
        self.basis = basis
        if len(self.powers) != len(basis):
            raise ValueError("powers must match the basis length")
        if any(k < 0 for k in self.powers):
            raise ValueError("denominator powers must be nonnegative")
        if normalize:
            self._cancel()

    # constructors
    @classmethod
    def constant(cls, c, basis: FactorBasis) -> "RationalFn":
        return cls([c], (0,) * len(basis), basis, normalize=False)

    @classmethod
    def polynomial(cls, coeffs, basis: FactorBasis) -> "RationalFn":
        return cls(coeffs, (0,) * len(basis), basis, normalize=False)

    @classmethod
    def zero(cls, basis: FactorBasis) -> "RationalFn":
        return cls.constant(0.0, basis)

    # introspection
    def is_zero(self) -> bool:
        return not np.any(self.num)

    @property
    def degree(self) -> int:
        return self.num.size - 1

    def denominator(self) -> np.ndarray:
        return self.basis.product(self.powers)

    def __repr__(self):
        return f"RationalFn({self.to_string()})"

    def to_string(self, var: str = "r", digits: int = 6) -> str:
        terms = []
        for j, c in enumerate(self.num):
            if c == 0:
                continue
            cs = _fmt_complex(c, digits)
            terms.append(cs if j == 0 else f"{cs}*{var}^{j}" if j > 1 else f"{cs}*{var}")
        num = " + ".join(terms) if terms else "0"
        den = [f"({name})^{k}" if k > 1 else f"({name})" for name, k in zip(self.basis.names, self.powers) if k]
        return f"[{num}]" + (" / " + "*".join(den) if den else "")

    # evaluation
    def __call__(self, r):
        r = np.asarray(r, dtype=complex)
        out = P.polyval(r, self.num)
        for f, k in zip(self.basis.factors, self.powers):
            if k:
                out = out / P.polyval(r, f) ** k
        return out

    # cancellation
    def _cancel(self):
        powers = list(self.powers)
        if not np.any(self.num):
            self.powers = (0,) * len(powers)
            self.num = np.zeros(1, dtype=complex)
            return
        for i in range(len(powers)):
            while powers[i] > 0 and _divides(self.basis, i, self.num):
                q, _ = P.polydiv(self.num, self.basis.factors[i])
                self.num = _as_coeffs(q)
                powers[i] -= 1
        self.powers = tuple(powers)

    # arithmetic
    def _coerce(self, other) -> "RationalFn":
        if isinstance(other, RationalFn):
            if other.basis is not self.basis:
                raise ValueError("rational functions over different factor bases")
            return other
        if isinstance(other, Number):
            return RationalFn.constant(other, self.basis)
        return NotImplemented

    def _lifted(self, target) -> np.ndarray:
        extra = [t - k for t, k in zip(target, self.powers)]
        return P.polymul(self.num, self.basis.product(extra))

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        target = tuple(max(a, b) for a, b in zip(self.powers, other.powers))
        num = P.polyadd(self._lifted(target), other._lifted(target))
        return RationalFn(num, target, self.basis)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.powers, self.basis, normalize=False)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Number):
            return RationalFn(self.num * other, self.powers, self.basis, normalize=False)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        powers = tuple(a + b for a, b in zip(self.powers, other.powers))
        return RationalFn(P.polymul(self.num, other.num), powers, self.basis)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Number):
            return RationalFn(self.num / other, self.powers, self.basis, normalize=False)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self * other.reciprocal()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.reciprocal()

    def reciprocal(self) -> "RationalFn":
        """1/self; the numerator must factor over the basis up to a constant."""
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of the zero rational function")
        num = self.num
        gained = [0] * len(self.basis)
        for i, f in enumerate(self.basis.factors):
            while _divides(self.basis, i, num):
                num = _as_coeffs(P.polydiv(num, f)[0])
                gained[i] += 1
        if num.size != 1:
            raise ValueError(
                f"cannot invert: numerator factor of degree {num.size - 1} lies outside the factor basis"
            )
        top = self.basis.product(self.powers)
        return RationalFn(top / num[0], gained, self.basis)

    def derivative(self) -> "RationalFn":
        """(N / prod f_i^k_i)' = [N' prod f_i - N sum_i k_i f_i' prod_{j != i} f_j] / (D prod f_i)."""
        active = [i for i, k in enumerate(self.powers) if k]
        dnum = P.polyder(self.num) if self.num.size > 1 else np.zeros(1, dtype=complex)
        if not active:
            return RationalFn(dnum, self.powers, self.basis, normalize=False)
        one_each = [1 if i in active else 0 for i in range(len(self.basis))]
        total = P.polymul(dnum, self.basis.product(one_each))
        for i in active:
            others = [1 if (j in active and j != i) else 0 for j in range(len(self.basis))]
            term = P.polymul(P.polymul(self.num, self.basis.derivs[i]), self.basis.product(others))
            total = P.polysub(total, self.powers[i] * term)
        powers = tuple(k + o for k, o in zip(self.powers, one_each))
        return RationalFn(total, powers, self.basis)


def _divides(basis: FactorBasis, i: int, num: np.ndarray) -> bool:
    """True when num vanishes at every root of factor i, relative to its size there."""
    if num.size < basis.factors[i].size or not np.any(num):
        return False
    for root in basis.roots[i]:
        radius = max(abs(root), basis.scale)
        scale = np.sum(np.abs(num) * radius ** np.arange(num.size))
        if abs(P.polyval(root, num)) > CANCEL_TOL * scale:
            return False
    return True


def _fmt_complex(c: complex, digits: int) -> str:
    if c.imag == 0:
        return f"{c.real:.{digits}g}"
    if c.real == 0:
        return f"{c.imag:.{digits}g}j"
    return f"({c.real:.{digits}g}{c.imag:+.{digits}g}j)"
