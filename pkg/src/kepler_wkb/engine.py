"""The y_k hierarchy and its contour integrals around the branch cut.

Orientation: every loop integral here runs clockwise around the cut
[r1, r2] with p > 0 on the upper lip.  With this choice

    loop integral of y_0 = 2 * int_{r1}^{r2} p dr = 2 pi (sqrt(-1/2E) - L),

and the loop integral equals 2 pi i (Res_0 + Res_inf) whenever the origin
lies outside the loop.  For radial orbits (L = 0) the cut ends at the origin,
the loop encloses it and only the residue at infinity contributes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .atomic import OrbitGeometry, Variant
from .symbolic import MomentumField, Point, WkbTerm, expand

MAX_ORDER = 8
SERIES_NTERMS = 40


class HierarchyTooLargeError(RuntimeError):
    pass


class QuadratureAccuracyError(RuntimeError):
    pass


@dataclass(frozen=True)
class WkbHierarchy:
    orbit: OrbitGeometry
    variant: Variant
    terms: tuple[WkbTerm, ...]
    field: MomentumField = field(repr=False)

    @property
    def k_max(self) -> int:
        return len(self.terms) - 1

    def __getitem__(self, k: int) -> WkbTerm:
        return self.terms[k]

    def truncated_sum(self, r, order: int, hbar: float = 1.0):
        """sum_{k <= order} (-i hbar)^k y_k(r)."""
        p = None
        total = 0j
        for k in range(order + 1):
            total = total + (-1j * hbar) ** k * self.terms[k](r, p)
        return total


def build_hierarchy(orbit: OrbitGeometry, variant: Variant, k_max: int, recursion: str = "riccati") -> WkbHierarchy:
    """y_0 = p, y_1 = -(y_0' + i L/r^2)/(2 y_0) (SE) or -y_0'/(2 y_0), then

        y_j = -(1/2 y_0) [ y_{j-1}' + sum_{k=1}^{j-1} y_k y_{j-k} ],   j >= 2,

    the order-by-order form of y^2 - i hbar y' = p^2 - hbar L/r^2.
    ``recursion="printed"`` uses the even/odd split with the doubled sums
    running to 2m-2 and 2m-1; it coincides with the above for j <= 3.
    """
    variant = Variant.parse(variant)
    if k_max < 0:
        raise ValueError("k_max must be >= 0")
    if k_max > MAX_ORDER:
        raise HierarchyTooLargeError(
            f"k_max={k_max} exceeds the limit {MAX_ORDER}; numerator degrees grow by about 3 per order "
            f"(y_k numerators reach degree ~{3 * k_max + 2})"
        )
    if recursion not in ("riccati", "printed"):
        raise ValueError(f"unknown recursion {recursion!r}")
    fld = MomentumField(orbit)
    y = [fld.p()]
    if k_max >= 1:
        inner = y[0].derivative()
        if variant.has_linear_correction and orbit.L != 0.0:
            inner = inner + fld.rational([1j * orbit.L], r_power=2)
        y.append(inner.divide_by_p() * -0.5)
    for j in range(2, k_max + 1):
        bracket = y[j - 1].derivative()
        if recursion == "riccati":
            for k in range(1, j):
                bracket = bracket + y[k] * y[j - k]
        else:
            m, odd = divmod(j, 2)
            if odd:
                for k in range(1, 2 * m):
                    bracket = bracket + 2.0 * (y[j - k] * y[k])
            else:
                bracket = bracket + y[m] * y[m]
                for k in range(1, 2 * m - 1):
                    bracket = bracket + 2.0 * (y[j - k] * y[k])
        y.append(bracket.divide_by_p() * -0.5)
    return WkbHierarchy(orbit=orbit, variant=variant, terms=tuple(y), field=fld)


# residues


def residue_origin(h: WkbHierarchy, k: int, nterms: int = SERIES_NTERMS) -> complex:
    """Coefficient of 1/r in the expansion of y_k at r = 0.

    Radial orbits are expanded in t = sqrt(r); the r^-1 coefficient is then
    that of t^-2.
    """
    return expand(h.terms[k], Point.ORIGIN, nterms).residue_at_zero()


def residue_infinity(h: WkbHierarchy, k: int, nterms: int = SERIES_NTERMS) -> complex:
    """Res_inf y_k = -[coefficient of 1/r at infinity], from r = 1/u with dr = -du/u^2."""
    return expand(h.terms[k], Point.INFINITY, nterms).residue_at_infinity()


# contours


@dataclass(frozen=True)
class ContourSpec:
    """Ellipse with foci at the turning points, r = c + d (w + 1/w)/2, w = rho e^{i theta}.

    In the w-plane the square root of (r - r1)(r - r2) is d (w - 1/w)/2, so the
    integrand is a single-valued Laurent function of w and the trapezoid rule
    converges geometrically.  The origin maps to w = -w0; ``rho < w0`` keeps
    it outside the loop.
    """

    center: float
    half_focal: float
    rho: float
    node_count: int = 64

    def __post_init__(self):
        if self.node_count < 64 or self.node_count % 2:
            raise ValueError("node_count must be even and >= 64")
        if self.rho <= 1.0:
            raise ValueError("rho must exceed 1 for the ellipse to enclose the cut")

    @property
    def semi_axes(self) -> tuple[float, float]:
        d, rho = self.half_focal, self.rho
        return d * (rho + 1.0 / rho) / 2.0, d * (rho - 1.0 / rho) / 2.0

    @property
    def encloses_origin(self) -> bool:
        return self.semi_axes[0] >= self.center

    @classmethod
    def for_orbit(cls, orbit: OrbitGeometry, rho: float | None = None, node_count: int = 64) -> "ContourSpec":
        """Ellipse around the cut of ``orbit``; by default halfway (in log rho) to the origin."""
        c = 0.5 * (orbit.r1 + orbit.r2)
        d = 0.5 * (orbit.r2 - orbit.r1)
        if rho is None:
            rho = WIDE_RHO if orbit.L == 0.0 else math.sqrt(origin_rho(orbit))
        return cls(center=c, half_focal=d, rho=rho, node_count=node_count)

    def nodes(self, n: int):
        theta = 2.0 * np.pi * np.arange(n) / n
        w = self.rho * np.exp(1j * theta)
        r = self.center + self.half_focal * (w + 1.0 / w) / 2.0
        dr_dtheta = 1j * self.half_focal * (w - 1.0 / w) / 2.0
        return w, r, dr_dtheta


WIDE_RHO = 4.0


def origin_rho(orbit: OrbitGeometry) -> float:
    """|w| of the preimage of r = 0; infinite for radial orbits."""
    if orbit.L == 0.0:
        return math.inf
    x0 = (orbit.r1 + orbit.r2) / (orbit.r2 - orbit.r1)
    return x0 + math.sqrt(x0 * x0 - 1.0)


def regular_at_origin(term: WkbTerm) -> bool:
    """True when A + B p has no pole at r = 0 (p itself has a simple pole there)."""
    if term.A.powers[0]:
        return False
    return term.B.is_zero() or (term.B.powers[0] == 0 and term.B.num[0] == 0)


def choose_contour(term: WkbTerm, orbit: OrbitGeometry) -> ContourSpec:
    """Pick the ellipse with the smallest peak integrand.

    Near the turning points the high orders grow like a large inverse power of
    the distance, and roundoff in the trapezoid sum scales with that peak.  A
    term without a pole at the origin may be integrated on a wide ellipse that
    encloses the origin too; otherwise rho is scanned inside (1, w0).
    """
    w0 = origin_rho(orbit)
    if orbit.L == 0.0:
        return ContourSpec.for_orbit(orbit, rho=WIDE_RHO)
    if regular_at_origin(term):
        return ContourSpec.for_orbit(orbit, rho=max(WIDE_RHO, 2.0 * w0))
    best = None
    for frac in np.linspace(0.35, 0.95, 5):
        spec = ContourSpec.for_orbit(orbit, rho=w0**frac)
        w, r, dr = spec.nodes(128)
        peak = np.max(np.abs(term(r, _contour_momentum(orbit, spec, w)) * dr))
        if best is None or peak < best[0]:
            best = (peak, spec)
    return best[1]


def _contour_momentum(orbit: OrbitGeometry, spec: ContourSpec, w):
    r = spec.center + spec.half_focal * (w + 1.0 / w) / 2.0
    return -1j * orbit.kappa * spec.half_focal * (w - 1.0 / w) / (2.0 * r)


def _quadrature(term: WkbTerm, orbit: OrbitGeometry, spec: ContourSpec, n: int) -> tuple[complex, float]:
    w, r, dr = spec.nodes(n)
    vals = term(r, _contour_momentum(orbit, spec, w)) * dr
    step = 2.0 * np.pi / n
    # theta runs counterclockwise; the loop integral is clockwise
    return -complex(np.sum(vals) * step), float(np.sum(np.abs(vals)) * step)


def quadrature_integral(
    term: WkbTerm,
    orbit: OrbitGeometry,
    spec: ContourSpec | None = None,
    rtol: float = 1e-12,
    max_nodes: int = 1 << 16,
) -> complex:
    """Clockwise loop integral by the trapezoid rule, doubling nodes until two rounds agree.

    Agreement is judged against the integral of |integrand|, so integrals that
    vanish by cancellation still converge.
    """
    spec = spec or choose_contour(term, orbit)
    if spec.encloses_origin and orbit.L != 0.0 and not regular_at_origin(term):
        raise ValueError("this term has a pole at the origin; the contour must exclude it")
    n = spec.node_count
    prev, _ = _quadrature(term, orbit, spec, n)
    while n < max_nodes:
        n *= 2
        cur, scale = _quadrature(term, orbit, spec, n)
        if abs(cur - prev) <= rtol * max(scale, 1.0):
            return cur
        prev = cur
    raise QuadratureAccuracyError(
        f"trapezoid rule did not settle with {max_nodes} nodes (last change {abs(cur - prev):.3g})"
    )


def contour_integral(h: WkbHierarchy, k: int, method: str = "residues", spec: ContourSpec | None = None) -> complex:
    """Clockwise loop integral of y_k around the cut (see module docstring)."""
    if method == "residues":
        res = residue_infinity(h, k)
        if h.orbit.L != 0.0:
            res += residue_origin(h, k)
        return 2j * math.pi * res
    if method == "quadrature":
        return quadrature_integral(h.terms[k], h.orbit, spec)
    raise ValueError(f"unknown method {method!r}; use 'residues' or 'quadrature'")
