"""Radial dipole matrix elements: semiclassical closed forms and the exact integral.

The leading semiclassical term for a jump of Delta n in the principal number
and of +-1 in l is

    R0 = (n^2 / dn^2) d/deps J_dn(dn eps) +- (n^2 / dn) sqrt(1 - eps^2)/eps J_dn(dn eps)

with n and eps = sqrt(1 - (l/n)^2) taken from one state of the pair.  The two
terms are the Fourier amplitudes of x and y at the harmonic dn of a Kepler
ellipse with semi-major axis a = n^2, so both scale with a.  A variant whose
second term carries n / dn instead is kept as ``Coefficient.PRINTED`` for
comparison.  The first-order correction is

    R1 = (dn omega(E) / 2) dR0/dE + ((1 +- 1)/2) dR0/dL.

Which state supplies (n, eps), how the +- follows the l step and which sign
dn carries are not fixed by the formulas themselves.  ``EvalConvention``
spells these choices out and :func:`calibrate_convention` selects one against
a reference table.
"""

from __future__ import annotations

import enum
import itertools
import math
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
from scipy.integrate import quad

from .atomic import DomainError, QuantumNumbers, kepler_frequency, orbit_from_energy
from .special import bessel_j, bessel_j_prime
from .wavefunctions import WkbWave, action_S0, exact_radial, phase_phi

FD_REL_STEP = 1e-6
FD_CONSISTENCY = 1e-6
REF_TABLE_ENV = "KEPLER_WKB_REF_TABLE"


class SingularTransitionError(DomainError):
    pass


class DerivativeAccuracyError(RuntimeError):
    pass


@dataclass(frozen=True)
class TransitionSpec:
    """``state`` -> (n + delta_n, l + l_step)."""

    state: QuantumNumbers
    delta_n: int
    l_step: int

    def __post_init__(self):
        if self.l_step not in (1, -1):
            raise DomainError(f"l_step must be +1 or -1, got {self.l_step}")
        if self.delta_n == 0:
            raise DomainError("delta_n = 0 has no closed-form semiclassical element")
        self.target  # validates the partner state

    @property
    def target(self) -> QuantumNumbers:
        return QuantumNumbers(self.state.n + self.delta_n, self.state.l + self.l_step)

    @classmethod
    def between(cls, a: QuantumNumbers, b: QuantumNumbers) -> "TransitionSpec":
        return cls(a, b.n - a.n, b.l - a.l)

    def label(self) -> str:
        return f"{self.state.label()}-{self.target.label()}"


class Anchor(enum.Enum):
    INITIAL = "initial"
    FINAL = "final"
    LOWER_L = "lower-l"
    UPPER_L = "upper-l"
    MEAN = "mean"


class SignRule(enum.Enum):
    STEP = "step"          # + when the transition raises l
    ANCHORED = "anchored"  # + when the partner of the anchor state has the larger l
    PLUS = "plus"
    MINUS = "minus"


class Coefficient(enum.Enum):
    KEPLER = "kepler"    # second term scales with a = n^2
    PRINTED = "printed"  # second term scales with n


class DnSignRule(enum.Enum):
    SIGNED = "signed"      # n(partner) - n(anchor); the mean anchor uses the transition's sign
    TRANSITION = "transition"
    ABSOLUTE = "absolute"


@dataclass(frozen=True)
class EvalConvention:
    anchor: Anchor = Anchor.INITIAL
    sign_rule: SignRule = SignRule.STEP
    dn_sign_rule: DnSignRule = DnSignRule.SIGNED
    order: int = 1
    coefficient: Coefficient = Coefficient.KEPLER

    def label(self) -> str:
        return (
            f"anchor={self.anchor.value} sign={self.sign_rule.value} dn={self.dn_sign_rule.value} "
            f"order={self.order} coefficient={self.coefficient.value}"
        )

    @classmethod
    def parse(cls, text: str) -> "EvalConvention":
        """``"initial"`` or ``"anchor=final,sign=plus,dn=absolute,order=0,coefficient=printed"``."""
        fields = {}
        known = {"anchor", "sign", "dn", "order", "coefficient"}
        for part in filter(None, (s.strip() for s in text.split(","))):
            key, _, value = part.partition("=")
            if not value:
                key, value = "anchor", key
            fields[key.strip()] = value.strip()
        if unknown := set(fields) - known:
            raise DomainError(f"unknown convention keys {sorted(unknown)}")
        try:
            return cls(
                anchor=Anchor(fields.pop("anchor", Anchor.INITIAL.value)),
                sign_rule=SignRule(fields.pop("sign", SignRule.STEP.value)),
                dn_sign_rule=DnSignRule(fields.pop("dn", DnSignRule.SIGNED.value)),
                order=int(fields.pop("order", 1)),
                coefficient=Coefficient(fields.pop("coefficient", Coefficient.KEPLER.value)),
            )
        except ValueError as exc:
            raise DomainError(f"bad convention {text!r}: {exc}") from None


def all_conventions(orders=(1, 0)):
    for coef, order, anchor, sign, dn in itertools.product(Coefficient, orders, Anchor, SignRule, DnSignRule):
        yield EvalConvention(anchor, sign, dn, order, coef)


@dataclass(frozen=True)
class ClosedFormArgs:
    """(n, l, dn, branch) fed to the closed forms; n and l may be half-integers for the mean anchor."""

    n: float
    l: float
    dn: int
    branch: int
    coefficient: Coefficient = Coefficient.KEPLER


def resolve(t: TransitionSpec, conv: EvalConvention) -> ClosedFormArgs:
    a, b = t.state, t.target
    if conv.anchor is Anchor.INITIAL:
        anchor, partner = a, b
    elif conv.anchor is Anchor.FINAL:
        anchor, partner = b, a
    elif conv.anchor is Anchor.LOWER_L:
        anchor, partner = (a, b) if a.l < b.l else (b, a)
    elif conv.anchor is Anchor.UPPER_L:
        anchor, partner = (a, b) if a.l > b.l else (b, a)
    else:
        anchor = partner = None

    if anchor is None:
        n, l = 0.5 * (a.n + b.n), 0.5 * (a.l + b.l)
        signed_dn, anchored_step = t.delta_n, t.l_step
    else:
        n, l = anchor.n, anchor.l
        signed_dn, anchored_step = partner.n - anchor.n, partner.l - anchor.l

    dn = {
        DnSignRule.SIGNED: signed_dn,
        DnSignRule.TRANSITION: t.delta_n,
        DnSignRule.ABSOLUTE: abs(t.delta_n),
    }[conv.dn_sign_rule]
    branch = {
        SignRule.STEP: t.l_step,
        SignRule.ANCHORED: anchored_step,
        SignRule.PLUS: 1,
        SignRule.MINUS: -1,
    }[conv.sign_rule]
    return ClosedFormArgs(float(n), float(l), int(dn), int(branch), conv.coefficient)


# closed forms


def _bessel_pair(dn: int, eps: float) -> tuple[float, float]:
    """(J_dn(dn eps), d/deps J_dn(dn eps)) for signed dn.

    J_{-m}(-x) = J_m(x) and d/deps J_{-m}(-m eps) = m J'_m(m eps), so a negative
    dn leaves both unchanged.
    """
    m = abs(dn)
    return bessel_j(m, m * eps), m * bessel_j_prime(m, m * eps)


def r0_terms(n: float, l: float, dn: int, branch: int, coefficient: Coefficient = Coefficient.KEPLER) -> tuple[float, float]:
    """The derivative term and the signed Bessel term of R0 (lengths in Bohr radii).

    sqrt(1 - eps^2) is used in its exact form l/n, which keeps the second term
    accurate for small l where 1 - eps^2 would cancel.
    """
    ratio = l / n
    if not 0.0 <= ratio <= 1.0:
        raise DomainError(f"need 0 <= l <= n, got n={n}, l={l}")
    eps = math.sqrt((1.0 - ratio) * (1.0 + ratio))
    if eps == 0.0:
        raise SingularTransitionError("eps = 0 (circular orbit): the second term divides by eps")
    j, dj = _bessel_pair(dn, eps)
    first = n * n / (dn * dn) * dj
    scale = n * n if coefficient is Coefficient.KEPLER else n
    second = branch * (scale / dn) * ratio / eps * j
    return first, second


def r0_closed_form(n: float, l: float, dn: int, branch: int, coefficient: Coefficient = Coefficient.KEPLER) -> float:
    return sum(r0_terms(n, l, dn, branch, coefficient))


def r0_of_EL(E: float, L: float, dn: int, branch: int, coefficient: Coefficient = Coefficient.KEPLER) -> float:
    """R0 as a function of energy and angular momentum, n = 1/sqrt(-2E)."""
    return r0_closed_form(1.0 / math.sqrt(-2.0 * E), L, dn, branch, coefficient)


def _central(f, x: float, h: float) -> float:
    return (f(x + h) - f(x - h)) / (2.0 * h)


def _forward(f, x: float, h: float) -> float:
    return (-3.0 * f(x) + 4.0 * f(x + h) - f(x + 2.0 * h)) / (2.0 * h)


def checked_derivative(f, x: float, h: float, one_sided: bool = False) -> float:
    """Finite difference at step h, validated against the half-step estimate."""
    rule = _forward if one_sided else _central
    coarse, fine = rule(f, x, h), rule(f, x, 0.5 * h)
    scale = max(abs(fine), 1e-8)
    if abs(coarse - fine) > FD_CONSISTENCY * scale * 10.0:
        raise DerivativeAccuracyError(
            f"finite differences disagree: {coarse:.12g} (h) vs {fine:.12g} (h/2)"
        )
    # Richardson: both rules are second order
    return fine + (fine - coarse) / 3.0


def dipole_leading(t: TransitionSpec, conv: EvalConvention = EvalConvention()) -> float:
    args = resolve(t, conv)
    return r0_closed_form(args.n, args.l, args.dn, args.branch, args.coefficient)


def dipole_first_order(t: TransitionSpec, conv: EvalConvention = EvalConvention()) -> float:
    """R1 by differentiating R0(E, L) at the anchor's (E_n, l)."""
    args = resolve(t, conv)
    E = -0.5 / args.n**2
    L = args.l
    omega = kepler_frequency(E)
    dE = checked_derivative(lambda e: r0_of_EL(e, L, args.dn, args.branch, args.coefficient), E, FD_REL_STEP * abs(E))
    total = 0.5 * args.dn * omega * dE
    if args.branch > 0:
        h_L = FD_REL_STEP * max(L, 1.0)
        # sqrt(1 - eps^2) = L/n is not smooth through L = 0, so differentiate from the right there
        dL = checked_derivative(lambda x: r0_of_EL(E, x, args.dn, args.branch, args.coefficient), L, h_L, one_sided=L < 2.0 * h_L)
        total += dL
    return total


@dataclass(frozen=True)
class DipoleResult:
    transition: TransitionSpec
    r0: float
    r1_corr: float
    exact: float
    convention: EvalConvention

    @property
    def semiclassical_total(self) -> float:
        return self.r0 + (self.r1_corr if self.convention.order >= 1 else 0.0)


def evaluate(t: TransitionSpec, conv: EvalConvention = EvalConvention()) -> DipoleResult:
    return DipoleResult(
        transition=t,
        r0=dipole_leading(t, conv),
        r1_corr=dipole_first_order(t, conv),
        exact=dipole_exact(t.state, t.target),
        convention=conv,
    )


# exact oracle


def dipole_exact(a: QuantumNumbers, b: QuantumNumbers) -> float:
    """int_0^inf u_a r u_b dr with the normalized hydrogen functions.

    Examples
    --------
    >>> round(dipole_exact(QuantumNumbers(1, 0), QuantumNumbers(2, 1)), 4)
    1.2903
    """
    if abs(a.l - b.l) != 1:
        raise DomainError(f"dipole selection rule needs |l_a - l_b| = 1, got {a.l} and {b.l}")
    # symmetric order so that (a, b) and (b, a) run the identical quadrature
    a, b = sorted((a, b), key=lambda s: (s.n, s.l))
    r_max = 2.0 * max(2.0 * a.n**2, 2.0 * b.n**2) + 40.0
    breaks = sorted({float(x) for s in (a, b) for x in _node_estimates(s)} | {float(a.n**2), float(b.n**2)})
    breaks = [x for x in breaks if 0.0 < x < r_max]
    value, _ = quad(
        lambda r: exact_radial(a, r) * r * exact_radial(b, r),
        0.0,
        r_max,
        points=breaks or None,
        limit=400,
        epsabs=1e-12,
        epsrel=1e-12,
    )
    return value


def _node_estimates(q: QuantumNumbers):
    # evenly spaced break hints over the bulk of the state
    return np.linspace(0.0, 2.0 * q.n**2, q.n + 2)[1:-1]


# numeric restricted-interference integral

NUMERIC_DOMAINS = ("intersection", "orbit")


def dipole_integral_numeric(
    t: TransitionSpec, conv: EvalConvention = EvalConvention(), domain: str = "intersection"
) -> float:
    """Direct numerical evaluation of the two-wave overlap.

    ``domain="intersection"`` integrates

        (1/2) c_a c_b / sqrt(p_a p_b) r cos(theta_a - theta_b)

    over the part of both allowed intervals that lies outside either state's
    turning-point exclusion zones, with theta = S0 - phi/2 - pi/4 the SE phase.
    Keeping only the phase difference is the restricted interference
    approximation.  Everything outside the shared interval is missed, so the
    result stays well below the full matrix element even for large n.

    ``domain="orbit"`` puts both waves on the classical orbit of the
    convention's anchor and expands the partner's phase to first order in
    (dE, dL), so that theta_b - theta_a = dn omega t -+ phi.  The loop integral
    then becomes the time average of r cos(dn M -+ nu) over one period, with M
    the mean and nu the true anomaly, and is done in the eccentric anomaly.
    It reproduces the closed-form R0 at that anchor.
    """
    if domain == "orbit":
        args = resolve(t, conv)
        return _orbit_average(args.n, args.l, args.dn, args.branch)
    if domain != "intersection":
        raise ValueError(f"unknown domain {domain!r}; choose from {NUMERIC_DOMAINS}")

    wa, wb = WkbWave.build("se", t.state), WkbWave.build("se", t.target)
    lo = max(wa.orbit.r1 + wa.delta, wb.orbit.r1 + wb.delta)
    hi = min(wa.orbit.r2 - wa.delta, wb.orbit.r2 - wb.delta)
    if hi <= lo:
        raise SingularTransitionError(
            f"allowed regions of {t.state.label()} and {t.target.label()} do not overlap"
        )

    def theta(w: WkbWave, r: float) -> float:
        return action_S0(r, w.orbit) - 0.5 * phase_phi(r, w.orbit) - 0.25 * math.pi

    def integrand(r: float) -> float:
        pa, pb = float(wa._abs_p(r)), float(wb._abs_p(r))
        return 0.5 * wa.c * wb.c / math.sqrt(pa * pb) * r * math.cos(theta(wa, r) - theta(wb, r))

    value, _ = quad(integrand, lo, hi, limit=400, epsabs=1e-10, epsrel=1e-8)
    return value


def _orbit_average(n: float, l: float, dn: int, branch: int) -> float:
    """(1/pi) int_0^pi r cos(dn M - branch nu) dM on the ellipse a = n^2, eps = sqrt(1 - (l/n)^2)."""
    a = n * n
    ratio = l / n
    eps = math.sqrt((1.0 - ratio) * (1.0 + ratio))
    up, down = math.sqrt(1.0 + eps), math.sqrt(1.0 - eps)

    def integrand(psi: float) -> float:
        nu = 2.0 * math.atan2(up * math.sin(0.5 * psi), down * math.cos(0.5 * psi))
        mean_anomaly = psi - eps * math.sin(psi)
        # r dM = a (1 - eps cos psi)^2 dpsi
        return a * (1.0 - eps * math.cos(psi)) ** 2 * math.cos(dn * mean_anomaly - branch * nu)

    value, _ = quad(integrand, 0.0, math.pi, epsabs=1e-13, epsrel=1e-12, limit=200)
    return value / math.pi


# reference table


@dataclass(frozen=True)
class TableEntry:
    series: str
    n: int
    semiclassical: float
    exact: float
    transition: TransitionSpec


def _series_transition(series: str, n: int) -> TransitionSpec:
    left, right = series.split("-")
    letters = "spdfghik"
    a = QuantumNumbers(int(left[:-1]), letters.index(left[-1]))
    b = QuantumNumbers(n, letters.index(right[-1]))
    return TransitionSpec.between(a, b)


def parse_reference_table(text: str) -> list[TableEntry]:
    entries = []
    header_ns = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            words = line.lstrip("#").split()
            if words and words[0] == "series":
                header_ns = [int(w.split("=")[1]) for w in words[1:]]
            continue
        cells = line.split()
        series, values = cells[0], cells[1:]
        ns = header_ns or list(range(2, 2 + len(values)))
        if len(values) != len(ns):
            raise ValueError(f"row {series!r} has {len(values)} cells, expected {len(ns)}")
        for n, cell in zip(ns, values):
            if cell == "-":
                continue
            semi, _, rest = cell.partition("(")
            entries.append(
                TableEntry(series, n, float(semi), float(rest.rstrip(")")), _series_transition(series, n))
            )
    return entries


def reference_table_path() -> Path:
    env = os.environ.get(REF_TABLE_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("kepler_wkb") / "data" / "table1.txt"))


def load_reference_table(path: str | os.PathLike | None = None) -> list[TableEntry]:
    path = Path(path) if path is not None else reference_table_path()
    return parse_reference_table(path.read_text())


# calibration


@dataclass
class CalibrationReport:
    convention: EvalConvention
    max_deviation: float
    mean_abs_deviation: float
    rows: list[tuple[TableEntry, float]] = field(default_factory=list)
    ranking: list[tuple[EvalConvention, float]] = field(default_factory=list)

    def deviations(self, series: str | None = None) -> list[float]:
        return [value - e.semiclassical for e, value in self.rows if series in (None, e.series)]

    def to_dict(self) -> dict:
        return {
            "convention": self.convention.label(),
            "max_deviation": self.max_deviation,
            "mean_abs_deviation": self.mean_abs_deviation,
            "entries": [
                {
                    "series": e.series,
                    "n": e.n,
                    "computed": value,
                    "reference": e.semiclassical,
                    "deviation": value - e.semiclassical,
                }
                for e, value in self.rows
            ],
            "ranking": [{"convention": c.label(), "max_deviation": d} for c, d in self.ranking[:10]],
        }


def semiclassical_value(t: TransitionSpec, conv: EvalConvention) -> float:
    value = dipole_leading(t, conv)
    if conv.order >= 1:
        value += dipole_first_order(t, conv)
    return value


def score_convention(conv: EvalConvention, entries: list[TableEntry]) -> tuple[float, list[tuple[TableEntry, float]]]:
    rows = []
    worst = 0.0
    for e in entries:
        try:
            value = semiclassical_value(e.transition, conv)
        except (DomainError, DerivativeAccuracyError):
            value = math.nan
        rows.append((e, value))
        dev = abs(value - e.semiclassical)
        worst = math.inf if not math.isfinite(dev) else max(worst, dev)
    return worst, rows


def report_for(conv: EvalConvention, entries: list[TableEntry]) -> CalibrationReport:
    worst, rows = score_convention(conv, entries)
    devs = [abs(v - e.semiclassical) for e, v in rows]
    return CalibrationReport(conv, worst, float(np.mean(devs)), rows)


def calibrate_convention(entries: list[TableEntry], orders=(1, 0)) -> CalibrationReport:
    """Exhaustive search for the convention with the smallest maximum deviation.

    Ties go to the first convention in enumeration order (first-order fits
    before leading-order fits).
    """
    ranking = []
    best = None
    for conv in all_conventions(orders):
        worst, rows = score_convention(conv, entries)
        ranking.append((conv, worst))
        if best is None or worst < best[1]:
            best = (conv, worst, rows)
    conv, worst, rows = best
    devs = [abs(v - e.semiclassical) for e, v in rows]
    ranking.sort(key=lambda item: item[1])
    return CalibrationReport(conv, worst, float(np.mean(devs)), rows, ranking)
