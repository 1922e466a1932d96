"""Acceptance criteria 1 to 10, one pass/fail line each.

Run under pytest (``pytest -s tests/test_acceptance.py`` shows the lines) or
directly with ``python3 tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import mpmath
import numpy as np
import pytest
from scipy.integrate import quad

from kepler_wkb.atomic import QuantumNumbers, Variant, orbit_from_state
from kepler_wkb.dipole import calibrate_convention, dipole_exact, load_reference_table
from kepler_wkb.engine import build_hierarchy, contour_integral
from kepler_wkb.quantization import quantize
from kepler_wkb.special import bessel_j
from kepler_wkb.wavefunctions import (
    action_S0,
    compare_rms,
    exact_node_count,
    exact_radial,
    phase_phi,
    wkb_node_count,
)

SUITE_LIMIT = 120.0


def report(number: int, passed: bool, detail: str) -> bool:
    print(f"criterion {number:2d} {'PASS' if passed else 'FAIL'}: {detail}")
    return passed


def criterion_1():
    t0 = time.perf_counter()
    closed = quad_path = 0.0
    for n in range(1, 11):
        for l in range(n):
            exact = -0.5 / n**2
            closed = max(closed, abs(quantize("se", n - l - 1, l, method="closed_form").energy - exact))
            quad_path = max(quad_path, abs(quantize("se", n - l - 1, l, method="quadrature").energy - exact))
    dt = time.perf_counter() - t0
    ok = closed <= 1e-10 and quad_path <= 1e-8 and dt < 5.0
    return report(1, ok, f"max |dE| closed form {closed:.2e}, contour quadrature {quad_path:.2e}, {dt:.2f} s")


def criterion_2():
    t0 = time.perf_counter()
    worst = gap = 0.0
    for n, l in [(2, 1), (3, 1), (3, 2), (5, 3)]:
        h = build_hierarchy(orbit_from_state(QuantumNumbers(n, l)), Variant.SE, 6)
        for k in range(2, 7):
            a, b = contour_integral(h, k, "residues"), contour_integral(h, k, "quadrature")
            worst = max(worst, abs(a), abs(b))
            gap = max(gap, abs(a - b))
    dt = time.perf_counter() - t0
    ok = worst <= 1e-8 and gap <= 1e-7 and dt < 30.0
    return report(2, ok, f"max |loop y_k|, k=2..6: {worst:.2e}, methods differ by {gap:.2e}, {dt:.2f} s")


def criterion_3():
    worst = max(
        abs(quantize("lm", n - l - 1, l).energy + 0.5 / n**2) for n in range(1, 6) for l in range(n)
    )
    h = build_hierarchy(orbit_from_state(QuantumNumbers(2, 1), Variant.LM), Variant.LM, 2)
    y2 = abs(contour_integral(h, 2))
    return report(3, worst <= 1e-10 and y2 > 1e-4, f"LM max |dE| {worst:.2e}, |loop y_2| at 2p {y2:.6f}")


def criterion_4():
    E = quantize("pm", 0, 0).energy
    return report(4, abs(E + 2.0) <= 1e-9, f"PM ground state E = {E:.12f}")


def criterion_5():
    t0 = time.perf_counter()
    entries = load_reference_table()
    devs = [abs(dipole_exact(e.transition.state, e.transition.target) - e.exact) for e in entries]
    dt = time.perf_counter() - t0
    ok = max(devs) <= 0.005 and dt < 10.0
    return report(5, ok, f"{len(entries)} parenthesized entries, max deviation {max(devs):.4f}, {dt:.2f} s")


def criterion_6():
    cal = calibrate_convention(load_reference_table())
    rows = {(e.series, e.n): (v, e.semiclassical) for e, v in cal.rows}
    devs = [abs(rows[("2p-nd", n)][0] - rows[("2p-nd", n)][1]) for n in (3, 4, 5)]
    ok = max(devs) <= 0.05
    detail = (
        f"convention [{cal.convention.label()}], 2p-nd n=3..5 max deviation {max(devs):.4f}, "
        f"full table max {cal.max_deviation:.4f} mean {cal.mean_abs_deviation:.5f}"
    )
    return report(6, ok, detail)


def criterion_7():
    norm_err, node_ok, se_ok, endpoint = 0.0, True, True, 0.0
    for n in range(1, 6):
        for l in range(n):
            q = QuantumNumbers(n, l)
            norm, _ = quad(lambda r: exact_radial(q, r) ** 2, 0, np.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
            norm_err = max(norm_err, abs(norm - 1))
            node_ok &= exact_node_count(q) == q.n_r
            se_ok &= wkb_node_count(Variant.SE, q) == q.n_r
            if l >= 1:
                o = orbit_from_state(q)
                endpoint = max(
                    endpoint,
                    abs(action_S0(o.r2, o) - math.pi * (n - l)),
                    abs(phase_phi(o.r2, o) - math.pi),
                )
    ok = norm_err <= 1e-10 and node_ok and se_ok and endpoint <= 1e-9
    detail = (
        f"norm error {norm_err:.1e}, exact nodes {'ok' if node_ok else 'wrong'}, "
        f"SE nodes {'ok' if se_ok else 'wrong'}, S0/phi endpoint error {endpoint:.1e}"
    )
    return report(7, ok, detail)


def criterion_8():
    parts, ok = [], True
    for n, l in [(1, 0), (3, 0)]:
        q = QuantumNumbers(n, l)
        se, lm = compare_rms("se", q), compare_rms("lm", q)
        ok &= se <= lm
        parts.append(f"{q.label()} SE {se:.4f} vs LM {lm:.4f}")
    q = QuantumNumbers(1, 0)
    pm, se = compare_rms("pm", q), compare_rms("se", q)
    ok &= pm > se
    parts.append(f"1s PM {pm:.4f}")
    return report(8, ok, ", ".join(parts))


def _series_oracle(k: int, z: float) -> float:
    with mpmath.workdps(40):
        return float(mpmath.nsum(
            lambda m: (-1) ** m * (mpmath.mpf(z) / 2) ** (2 * m + k) / (mpmath.factorial(m) * mpmath.factorial(m + k)),
            [0, mpmath.inf],
        ))


def criterion_9():
    orders = range(0, 31, 3)
    args = np.linspace(-50, 50, 41)
    worst = max(abs(bessel_j(k, z) - _series_oracle(k, z)) for k in orders for z in args)
    residual = max(
        abs(bessel_j(k - 1, z) + bessel_j(k + 1, z) - 2 * k / z * bessel_j(k, z))
        for z in (0.5, 1.0, 2.0, 5.0, 10.0, 25.0, 50.0)
        for k in range(1, 30)
    )
    return report(9, worst <= 1e-10 and residual <= 1e-9, f"max error {worst:.1e}, recurrence residual {residual:.1e}")


def criterion_10(elapsed: float | None = None):
    if elapsed is None:
        t0 = time.perf_counter()
        root = Path(__file__).resolve().parent.parent
        subprocess.run(
            [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", "--deselect",
             "tests/test_acceptance.py::test_criterion_10", str(root / "tests")],
            cwd=root, capture_output=True,
        )
        elapsed = time.perf_counter() - t0
    return report(10, elapsed < SUITE_LIMIT, f"full suite {elapsed:.1f} s (limit {SUITE_LIMIT:.0f} s)")


@pytest.mark.parametrize("check", [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                                   criterion_6, criterion_7, criterion_8, criterion_9],
                         ids=[f"criterion_{i}" for i in range(1, 10)])
def test_criterion(check):
    assert check()


def test_criterion_10(suite_elapsed):
    assert criterion_10(suite_elapsed)


if __name__ == "__main__":
    results = [c() for c in (criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                             criterion_6, criterion_7, criterion_8, criterion_9)]
    results.append(criterion_10())
    print(f"{sum(results)}/{len(results)} criteria pass")
