"""Hydrogen in Hartree atomic units: levels, centrifugal variants, Kepler orbits.

All numeric code uses m = e = hbar = a0 = 1.  Energies are in hartree and
lengths in Bohr radii.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np


class DomainError(ValueError):
    """Raised when an argument lies outside the physical domain of an operation."""


@dataclass(frozen=True)
class PhysicalUnits:
    mass: float = 1.0
    e2: float = 1.0
    hbar: float = 1.0
    bohr_radius: float = 1.0


UNITS = PhysicalUnits()


@dataclass(frozen=True)
class QuantumNumbers:
    """Bound-state labels; ``n_r`` is derived so ``n = n_r + l + 1`` always holds."""

    n: int
    l: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.l) != self.l:
            raise DomainError(f"quantum numbers must be integers, got n={self.n}, l={self.l}")
        if self.n < 1 or self.l < 0 or self.l > self.n - 1:
            raise DomainError(f"invalid state n={self.n}, l={self.l}")

    @classmethod
    def from_radial(cls, n_r: int, l: int) -> "QuantumNumbers":
        if n_r < 0:
            raise DomainError(f"n_r must be >= 0, got {n_r}")
        return cls(n_r + l + 1, l)

    @property
    def n_r(self) -> int:
        return self.n - self.l - 1

    def label(self) -> str:
        letters = "spdfghiklmnoqrtuv"
        return f"{self.n}{letters[self.l] if self.l < len(letters) else f'[l={self.l}]'}"


class Variant(enum.Enum):
    """Treatment of the centrifugal term hbar^2 l(l+1) / 2 m r^2.

    SE  classical term L^2/2mr^2 with L = hbar l at leading order, the
        remaining hbar L / 2mr^2 enters the first-order equation.
    LM  Langer modification, l(l+1) -> (l + 1/2)^2.
    PM  full l(l+1) kept in the leading-order momentum.
    """

    SE = "se"
    LM = "lm"
    PM = "pm"

    def effective_L(self, l: int) -> float:
        if self is Variant.SE:
            return float(l)
        if self is Variant.LM:
            return l + 0.5
        return math.sqrt(l * (l + 1))

    @property
    def has_linear_correction(self) -> bool:
        return self is Variant.SE

    @classmethod
    def parse(cls, value) -> "Variant":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise DomainError(f"unknown variant {value!r}; expected one of se, lm, pm") from None


@dataclass(frozen=True)
class OrbitGeometry:
    """Classical Kepler ellipse for energy E < 0 and angular momentum L >= 0."""

    E: float
    L: float
    a: float
    eps: float
    r1: float
    r2: float

    @property
    def kappa(self) -> float:
        """Decay constant sqrt(-2E); the momentum tends to -i*kappa at infinity."""
        return math.sqrt(-2.0 * self.E)

    @property
    def is_radial(self) -> bool:
        return self.L == 0.0


def energy_level(n: int) -> float:
    if n < 1:
        raise DomainError(f"principal quantum number must be >= 1, got {n}")
    return -0.5 / (n * n)


def eccentricity(n: int, l: int) -> float:
    if n < 1 or l < 0 or l > n:
        raise DomainError(f"eccentricity needs 0 <= l <= n, got n={n}, l={l}")
    return math.sqrt(1.0 - (l / n) ** 2)


def kepler_frequency(E: float) -> float:
    if E >= 0:
        raise DomainError(f"Kepler frequency needs a bound energy, got E={E}")
    return math.sqrt(-8.0 * E**3)


def orbit_from_energy(E: float, L: float) -> OrbitGeometry:
    """Turning points of E = -1/r + L^2/2r^2 in closed form.

    With a = -1/2E the roots are a(1 -+ eps), eps^2 = 1 + 2 E L^2.  The inner
    root is written as L^2/(1 + eps) to stay accurate for small L.
    """
    if E >= 0:
        raise DomainError(f"bound orbit needs E < 0, got E={E}")
    if L < 0:
        raise DomainError(f"angular momentum must be >= 0, got L={L}")
    a = -0.5 / E
    disc = 1.0 + 2.0 * E * L * L
    if disc < -1e-14:
        raise DomainError(f"no classically allowed region for E={E}, L={L}")
    eps = math.sqrt(max(disc, 0.0))
    r1 = L * L / (1.0 + eps)
    r2 = a * (1.0 + eps)
    return OrbitGeometry(E=E, L=float(L), a=a, eps=eps, r1=r1, r2=r2)


def orbit_from_state(q: QuantumNumbers, variant: Variant = Variant.SE, energy: float | None = None) -> OrbitGeometry:
    variant = Variant.parse(variant)
    E = energy_level(q.n) if energy is None else energy
    return orbit_from_energy(E, variant.effective_L(q.l))


def v_eff(r, orbit: OrbitGeometry):
    r = np.asarray(r, dtype=float)
    if np.any(r <= 0):
        raise DomainError("v_eff is defined for r > 0 only")
    out = -1.0 / r + orbit.L**2 / (2.0 * r * r)
    return float(out) if out.ndim == 0 else out


def momentum(r, orbit: OrbitGeometry):
    """Classical momentum continued analytically off the cut [r1, r2].

    Branch: positive real on the upper lip of the cut, ``i L / r`` near the
    origin and ``-i kappa`` at infinity.  Real r inside the cut returns the
    upper-lip value.
    """
    scalar = np.ndim(r) == 0
    r = np.atleast_1d(np.asarray(r, dtype=complex))
    r1, r2 = orbit.r1, orbit.r2
    with np.errstate(divide="ignore", invalid="ignore"):
        w = (r - r1) * np.sqrt((r - r2) / (r - r1))
        p = -1j * orbit.kappa * w / r
        on_cut = (r.imag == 0.0) & (r.real >= r1) & (r.real <= r2)
        if np.any(on_cut):
            x = r.real[on_cut]
            p[on_cut] = np.sqrt(np.maximum(2.0 * orbit.E + 2.0 / x - orbit.L**2 / (x * x), 0.0))
    return p[0] if scalar else p
