"""Exact and WKB reduced radial wave functions u(r) = r R(r).

Inside the classically allowed region the WKB functions are

    SE      (c / sqrt p) cos(S0 - phi/2 - pi/4)
    LM, PM  (c / sqrt p) cos(S0 - pi/4)

each on its own orbit and at its own first-order energy, with
c^2 = (2/pi) dE/dn = (2/pi) omega(E).  Outside, a single decaying exponential
of half the interior envelope is used, (c / 2 sqrt|p|) exp(-|int |p| dr|).
Beyond r2 it carries the sign (-1)^n_r of the interior cosine at r2, which
is what the usual connection formula produces for these phases.

The action S0 and phase phi are integrated in the eccentric anomaly psi,
r = a (1 - eps cos psi), where

    p dr   = eps^2 sin^2 psi / (kappa (1 - eps cos psi)) dpsi,
    dphi   = sqrt(1 - eps^2) / (1 - eps cos psi) dpsi,

both smooth in psi.  For eps near 1 the integrands peak in a window of width
about sqrt(2(1 - eps)) around psi = 0, which the panels are graded to resolve.
Radial orbits (L = 0) use phi = pi on the open interval (0, r2], the limit of
the phase as L -> 0+.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.integrate import quad

from .atomic import (
    DomainError,
    OrbitGeometry,
    QuantumNumbers,
    Variant,
    kepler_frequency,
    orbit_from_energy,
)
from .special import assoc_laguerre, log_factorial

GAUSS_POINTS = 20
EXCLUSION_FRACTION = 1e-3
RMS_SAMPLES = 2001
ENDPOINT_SLACK = 1e-12


class TurningPointProximityError(DomainError):
    def __init__(self, r: float, turning_point: float, delta: float):
        self.r = r
        self.turning_point = turning_point
        self.distance = abs(r - turning_point)
        super().__init__(
            f"r={r:.12g} lies {self.distance:.3g} from the turning point {turning_point:.12g}, "
            f"inside the exclusion radius {delta:.3g}"
        )


# action and phase


@lru_cache(maxsize=None)
def _gauss(npts: int):
    return leggauss(npts)


def _panels(upper: float, eps: float) -> np.ndarray:
    """Breakpoints on [0, upper] that double in width away from psi = 0."""
    width = max(math.sqrt(2.0 * max(1.0 - eps, 0.0)), 1e-6)
    points = [0.0]
    h = min(width, upper)
    while points[-1] + h < upper:
        points.append(points[-1] + h)
        h *= 2.0
    points.append(upper)
    return np.asarray(points)


def _integrate_psi(f, upper: float, eps: float) -> float:
    if upper <= 0.0:
        return 0.0
    x, w = _gauss(GAUSS_POINTS)
    edges = _panels(upper, eps)
    lo, hi = edges[:-1, None], edges[1:, None]
    psi = 0.5 * (hi - lo) * x[None, :] + 0.5 * (hi + lo)
    return float(np.sum(0.5 * (hi - lo) * w[None, :] * f(psi)))


def eccentric_anomaly(r, orbit: OrbitGeometry):
    """psi in [0, pi] with r = a (1 - eps cos psi); r is clipped to [r1, r2].

    Uses tan^2(psi/2) = (r - r1)/(r2 - r), which stays well conditioned at
    both turning points where the arccos form loses half the digits.
    """
    r = np.asarray(r, dtype=float)
    if orbit.eps == 0.0:
        return np.zeros_like(r)
    below = np.clip(r - orbit.r1, 0.0, None)
    above = np.clip(orbit.r2 - r, 0.0, None)
    return 2.0 * np.arctan2(np.sqrt(below), np.sqrt(above))


def _check_allowed(r: np.ndarray, orbit: OrbitGeometry):
    slack = ENDPOINT_SLACK * max(orbit.r2, 1.0)
    if np.any(r < orbit.r1 - slack) or np.any(r > orbit.r2 + slack):
        raise DomainError(
            f"r must lie in the allowed region [{orbit.r1:.12g}, {orbit.r2:.12g}]"
        )


def _map_points(fn, r):
    r = np.asarray(r, dtype=float)
    out = np.array([fn(float(x)) for x in r.ravel()]).reshape(r.shape)
    return float(out) if out.ndim == 0 else out


def action_S0(r, orbit: OrbitGeometry):
    """int_{r1}^{r} p dr for r in [r1, r2].

    Examples
    --------
    >>> from kepler_wkb.atomic import QuantumNumbers, orbit_from_state
    >>> round(action_S0(orbit_from_state(QuantumNumbers(3, 1)).r2, orbit_from_state(QuantumNumbers(3, 1))), 9)
    6.283185307
    """
    r_arr = np.asarray(r, dtype=float)
    _check_allowed(r_arr, orbit)
    eps, kappa = orbit.eps, orbit.kappa

    def integrand(psi):
        if eps == 1.0:
            return (1.0 + np.cos(psi)) / kappa
        half = np.sin(0.5 * psi) ** 2
        return 4.0 * eps * eps * half * (1.0 - half) / (kappa * ((1.0 - eps) + 2.0 * eps * half))

    def one(x):
        return _integrate_psi(integrand, float(eccentric_anomaly(x, orbit)), eps)

    return _map_points(one, r_arr)


def phase_phi(r, orbit: OrbitGeometry):
    """-dS0/dL = int_{r1}^{r} L / (r^2 p) dr, the true anomaly swept from r1."""
    r_arr = np.asarray(r, dtype=float)
    _check_allowed(r_arr, orbit)
    if orbit.L == 0.0:
        out = np.where(r_arr > orbit.r1, math.pi, 0.0)
        return float(out) if out.ndim == 0 else out
    eps = orbit.eps
    root = math.sqrt(max(1.0 - eps * eps, 0.0))

    def integrand(psi):
        return root / ((1.0 - eps) + 2.0 * eps * np.sin(0.5 * psi) ** 2)

    def one(x):
        return _integrate_psi(integrand, float(eccentric_anomaly(x, orbit)), eps)

    return _map_points(one, r_arr)


def true_anomaly(r, orbit: OrbitGeometry):
    """Closed form of the phase, arccos((a(1 - eps^2)/r - 1)/eps).

    Evaluated as tan(nu/2) = sqrt((1 + eps)/(1 - eps)) tan(psi/2) so that it
    stays accurate next to the turning points.
    """
    r = np.asarray(r, dtype=float)
    below = np.clip(r - orbit.r1, 0.0, None)
    above = np.clip(orbit.r2 - r, 0.0, None)
    out = 2.0 * np.arctan2(np.sqrt((1.0 + orbit.eps) * below), np.sqrt((1.0 - orbit.eps) * above))
    return float(out) if out.ndim == 0 else out


def action_closed_form(r, orbit: OrbitGeometry):
    """(psi + eps sin psi)/kappa - L * true anomaly."""
    psi = eccentric_anomaly(r, orbit)
    nu = true_anomaly(r, orbit) if orbit.L > 0.0 else 0.0
    out = (psi + orbit.eps * np.sin(psi)) / orbit.kappa - orbit.L * nu
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class ActionPhase:
    orbit: OrbitGeometry

    def S0(self, r):
        return action_S0(r, self.orbit)

    def phi(self, r):
        return phase_phi(r, self.orbit)


# exact functions


def exact_radial(q: QuantumNumbers, r):
    """Normalized u_nl(r) = r R_nl(r), positive near the origin.

    Examples
    --------
    >>> round(exact_radial(QuantumNumbers(1, 0), 1.0), 6)
    0.735759
    """
    n, l = q.n, q.l
    r = np.asarray(r, dtype=float)
    if np.any(r < 0):
        raise DomainError("exact_radial needs r >= 0")
    rho = 2.0 * r / n
    log_norm = 0.5 * (3.0 * math.log(2.0 / n) + log_factorial(n - l - 1) - math.log(2.0 * n) - log_factorial(n + l))
    out = math.exp(log_norm) * r * np.exp(-rho / 2.0) * rho**l * assoc_laguerre(n - l - 1, 2 * l + 1, rho)
    return float(out) if out.ndim == 0 else out


# WKB functions


def _variant_energy(variant: Variant, q: QuantumNumbers) -> float:
    if variant is Variant.PM:
        from .quantization import quantize

        return quantize(variant, q.n_r, q.l, order=1, method="closed_form").energy
    return -0.5 / q.n**2


@dataclass(frozen=True)
class WkbWave:
    variant: Variant
    q: QuantumNumbers
    orbit: OrbitGeometry
    c: float
    delta: float = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "delta", EXCLUSION_FRACTION * (self.orbit.r2 - self.orbit.r1))

    @classmethod
    def build(cls, variant, q: QuantumNumbers) -> "WkbWave":
        variant = Variant.parse(variant)
        E = _variant_energy(variant, q)
        orbit = orbit_from_energy(E, variant.effective_L(q.l))
        c = math.sqrt(2.0 / math.pi * kepler_frequency(E))
        return cls(variant=variant, q=q, orbit=orbit, c=c)

    def in_exclusion(self, r) -> np.ndarray:
        r = np.asarray(r, dtype=float)
        near = np.abs(r - self.orbit.r2) < self.delta
        if self.orbit.r1 > 0.0:
            near |= np.abs(r - self.orbit.r1) < self.delta
        return near

    def _abs_p(self, r):
        o = self.orbit
        return np.sqrt(np.abs(2.0 * o.E + 2.0 / r - o.L**2 / (r * r)))

    def _interior(self, r: np.ndarray) -> np.ndarray:
        phase = action_S0(r, self.orbit) - math.pi / 4.0
        if self.variant.has_linear_correction:
            phase = phase - 0.5 * phase_phi(r, self.orbit)
        return self.c / np.sqrt(self._abs_p(r)) * np.cos(phase)

    def _tail_action(self, r: np.ndarray, start: float) -> np.ndarray:
        """|int_start^r |p| dr| for points on one side of a turning point, accumulated in order."""
        if r.size == 0:
            return r
        order = np.argsort(np.abs(r - start))
        out = np.empty_like(r)
        acc, prev = 0.0, start
        for idx in order:
            x = r[idx]
            lo, hi = min(prev, x), max(prev, x)
            acc += quad(lambda t: float(self._abs_p(t)), lo, hi, limit=200)[0]
            out[idx] = acc
            prev = x
        return out

    def __call__(self, r, exclusion: str = "raise"):
        """Amplitude at r > 0.

        ``exclusion="raise"`` rejects points within ``delta`` of a turning
        point; ``exclusion="nan"`` returns NaN there.
        """
        if exclusion not in ("raise", "nan"):
            raise ValueError("exclusion must be 'raise' or 'nan'")
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        if np.any(r_arr <= 0):
            raise DomainError("the WKB wave function is evaluated for r > 0")
        o = self.orbit
        near = self.in_exclusion(r_arr)
        if exclusion == "raise" and np.any(near):
            x = float(r_arr[near][0])
            tp = o.r1 if abs(x - o.r1) < abs(x - o.r2) else o.r2
            raise TurningPointProximityError(x, tp, self.delta)
        out = np.full(r_arr.shape, np.nan)
        inside = (r_arr > o.r1) & (r_arr < o.r2) & ~near
        outer = (r_arr >= o.r2) & ~near
        inner = (r_arr <= o.r1) & ~near
        if np.any(inside):
            out[inside] = self._interior(r_arr[inside])
        envelope = 0.5 * self.c
        if np.any(outer):
            x = r_arr[outer]
            sign = -1.0 if self.q.n_r % 2 else 1.0
            out[outer] = sign * envelope / np.sqrt(self._abs_p(x)) * np.exp(-self._tail_action(x, o.r2))
        if np.any(inner):
            x = r_arr[inner]
            out[inner] = envelope / np.sqrt(self._abs_p(x)) * np.exp(-self._tail_action(x, o.r1))
        return float(out[0]) if np.ndim(r) == 0 else out

    def validity_mask(self, r) -> np.ndarray:
        """|p'| / p^2 < 1, the local criterion for the WKB form (allowed region)."""
        r = np.asarray(r, dtype=float)
        o = self.orbit
        p2 = 2.0 * o.E + 2.0 / r - o.L**2 / (r * r)
        dp2 = -2.0 / (r * r) + 2.0 * o.L**2 / r**3
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.abs(dp2) / (2.0 * np.abs(p2) ** 1.5)
        return ratio < 1.0


def wkb_wavefunction(variant, q: QuantumNumbers, r, exclusion: str = "raise"):
    return WkbWave.build(variant, q)(r, exclusion=exclusion)


def sign_changes(values) -> int:
    v = np.asarray(values, dtype=float)
    v = v[np.isfinite(v) & (v != 0.0)]
    return int(np.count_nonzero(np.signbit(v[1:]) != np.signbit(v[:-1])))


def trimmed_region_grid(wave: WkbWave, samples: int = 4001) -> np.ndarray:
    """Points of (r1 + delta, r2 - delta) where the WKB validity criterion holds."""
    o = wave.orbit
    r = np.linspace(o.r1 + wave.delta, o.r2 - wave.delta, samples)
    return r[wave.validity_mask(r)]


def wkb_node_count(variant, q: QuantumNumbers, samples: int = 4001) -> int:
    wave = WkbWave.build(variant, q)
    return sign_changes(wave(trimmed_region_grid(wave, samples)))


def exact_node_count(q: QuantumNumbers, samples: int = 20001) -> int:
    r = np.linspace(0.0, 4.0 * q.n * (q.n + 5), samples)[1:]
    return sign_changes(exact_radial(q, r))


def rms_window(q: QuantumNumbers, window_fraction: float = 0.8) -> tuple[float, float]:
    """Central ``window_fraction`` of the SE allowed region."""
    if not 0.0 < window_fraction <= 1.0:
        raise DomainError(f"window fraction must lie in (0, 1], got {window_fraction}")
    o = WkbWave.build(Variant.SE, q).orbit
    trim = 0.5 * (1.0 - window_fraction) * (o.r2 - o.r1)
    lo, hi = o.r1 + trim, o.r2 - trim
    if hi <= lo:
        raise DomainError("empty comparison window")
    return lo, hi


def compare_rms(variant, q: QuantumNumbers, window_fraction: float = 0.8, samples: int = RMS_SAMPLES) -> float:
    """RMS of (WKB - exact) over the window, skipping any variant's exclusion zones."""
    lo, hi = rms_window(q, window_fraction)
    r = np.linspace(lo, hi, samples)
    r = r[r > 0]
    keep = np.ones(r.shape, dtype=bool)
    for v in Variant:
        keep &= ~WkbWave.build(v, q).in_exclusion(r)
    r = r[keep]
    if r.size == 0:
        raise DomainError("every window point falls inside an exclusion zone")
    diff = WkbWave.build(variant, q)(r) - exact_radial(q, r)
    return float(np.sqrt(np.mean(diff**2)))
