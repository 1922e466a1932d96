"""Bound-state energies from the WKB quantization condition.

The condition reads

    (1/2 pi) * loop integral of sum_{k <= order} (-i)^k y_k dr = n_r + 1

with the clockwise loop of :mod:`kepler_wkb.engine`.  At first order the
left-hand side has the closed form sqrt(-1/2E) - L for SE and
sqrt(-1/2E) - L + 1/2 for LM and PM, where the 1/2 comes from the pole of
p'/2p at the origin and, for SE, is cancelled by the iL/r^2 term.

Radial orbits (effective L = 0) are taken as the limit L -> 0+.  The loop
then encloses the origin and the pole of p'/2p is no longer picked up, so
:func:`radial_limit_offset` restores it for the variants without the linear
correction.  This keeps every variant continuous in L.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

from scipy.optimize import brentq

from .atomic import DomainError, QuantumNumbers, Variant, orbit_from_energy
from .engine import build_hierarchy, contour_integral

METHODS = ("closed_form", "residues", "quadrature")
SOLVER_XTOL = 1e-14
SOLVER_RTOL = 1e-15
CIRCULAR_MARGIN = 1e-6


class QuantizationError(RuntimeError):
    pass


@dataclass
class QuantizationResult:
    variant: Variant
    order: int
    n_r: int
    l: int
    energy: float
    per_order_contributions: list[complex] = field(default_factory=list)
    solver_residual: float = 0.0
    method: str = "residues"

    @property
    def n(self) -> int:
        return self.n_r + self.l + 1

    @property
    def exact_energy(self) -> float:
        return -0.5 / self.n**2

    def to_dict(self) -> dict:
        out = asdict(self)
        out["variant"] = self.variant.value
        out["per_order_contributions"] = [[c.real, c.imag] for c in self.per_order_contributions]
        return out


def radial_limit_offset(variant: Variant) -> float:
    """Maslov-type constant lost at L = 0 where the loop swallows the origin."""
    return 0.0 if variant.has_linear_correction else 0.5


def closed_form_condition(E: float, L: float, variant) -> float:
    """First-order left-hand side in closed form.

    Examples
    --------
    >>> closed_form_condition(-1 / 8, 1.0, "se")
    1.0
    """
    variant = Variant.parse(variant)
    if E >= 0:
        raise DomainError(f"bound states need E < 0, got {E}")
    value = math.sqrt(-0.5 / E) - L
    if not variant.has_linear_correction:
        value += 0.5
    return value


def order_contributions(E: float, L: float, variant: Variant, order: int, method: str) -> list[complex]:
    """Loop integrals of y_0 .. y_order at energy E."""
    orbit = orbit_from_energy(E, L)
    h = build_hierarchy(orbit, variant, order)
    return [contour_integral(h, k, method=method) for k in range(order + 1)]


def condition_value(contribs: list[complex], L: float, variant: Variant) -> complex:
    total = sum((-1j) ** k * c for k, c in enumerate(contribs)) / (2.0 * math.pi)
    if L == 0.0 and len(contribs) > 1:
        total += radial_limit_offset(variant)
    return total


def energy_bracket(n_eff: int, L: float = 0.0) -> tuple[float, float]:
    """[-4/n^2, -1/8n^2], raised above the circular-orbit energy -1/2L^2 if needed."""
    lo = -4.0 / n_eff**2
    if L > 0.0:
        lo = max(lo, -0.5 / (L * L) * (1.0 - CIRCULAR_MARGIN))
    return lo, -1.0 / (8.0 * n_eff**2)


def quantize(variant, n_r: int, l: int, order: int = 1, method: str = "residues") -> QuantizationResult:
    """Solve the quantization condition for E.

    Parameters
    ----------
    variant : Variant or str
    n_r, l : int
        Radial and angular quantum numbers.
    order : int
        Highest k kept in the sum over y_k.
    method : {"closed_form", "residues", "quadrature"}
        How the loop integrals are evaluated.  ``closed_form`` is first order only.

    Examples
    --------
    >>> round(quantize("pm", 0, 0).energy, 12)
    -2.0
    """
    variant = Variant.parse(variant)
    q = QuantumNumbers.from_radial(n_r, l)
    if order < 1:
        raise DomainError("order must be >= 1")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")
    if method == "closed_form" and order != 1:
        raise ValueError("the closed form covers order 1 only")
    L = variant.effective_L(l)
    target = n_r + 1

    if method == "closed_form":
        def f(E):
            return closed_form_condition(E, L, variant) - target
    else:
        def f(E):
            return condition_value(order_contributions(E, L, variant, order, method), L, variant).real - target

    lo, hi = energy_bracket(q.n, L)
    f_lo, f_hi = f(lo), f(hi)
    if f_lo * f_hi > 0:
        raise QuantizationError(
            f"no sign change on [{lo:.6g}, {hi:.6g}] for {variant.value} n_r={n_r} l={l}: "
            f"f={f_lo:.6g}, {f_hi:.6g}"
        )
    E = brentq(f, lo, hi, xtol=SOLVER_XTOL, rtol=SOLVER_RTOL)
    contribs_method = "residues" if method == "closed_form" else method
    contribs = order_contributions(E, L, variant, order, contribs_method)
    residual = abs(condition_value(contribs, L, variant) - target)
    return QuantizationResult(
        variant=variant,
        order=order,
        n_r=n_r,
        l=l,
        energy=E,
        per_order_contributions=contribs,
        solver_residual=float(residual),
        method=method,
    )


@dataclass(frozen=True)
class OrderRow:
    k: int
    residues: complex
    quadrature: complex

    @property
    def magnitude(self) -> float:
        return max(abs(self.residues), abs(self.quadrature))


def higher_order_report(variant, n_r: int, l: int, k_max: int) -> tuple[QuantizationResult, list[OrderRow]]:
    """Loop integrals of y_2 .. y_{k_max} at the first-order energy, by both methods."""
    variant = Variant.parse(variant)
    base = quantize(variant, n_r, l, order=1)
    orbit = orbit_from_energy(base.energy, variant.effective_L(l))
    h = build_hierarchy(orbit, variant, k_max)
    rows = [
        OrderRow(k, contour_integral(h, k, "residues"), contour_integral(h, k, "quadrature"))
        for k in range(2, k_max + 1)
    ]
    return base, rows
