"""Bessel functions of integer order, associated Laguerre polynomials, log k!.

Accuracy is budgeted on the domain |z| <= 50, 0 <= k <= 30 for the Bessel
functions and k <= 60, x >= 0 for the Laguerre polynomials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .atomic import DomainError

SERIES_RADIUS = 12.0


@dataclass(frozen=True)
class AccuracyBudget:
    abs_tol: float = 1e-12
    max_terms: int = 200
    max_order: int = 30
    max_argument: float = 50.0


BUDGET = AccuracyBudget()


def _check_bessel_args(k: int, z: float, budget: AccuracyBudget):
    if int(k) != k or k < 0 or k > budget.max_order:
        raise DomainError(f"Bessel order must be an integer in [0, {budget.max_order}], got {k}")
    if not math.isfinite(z) or abs(z) > budget.max_argument:
        raise DomainError(f"|z| must not exceed {budget.max_argument}, got {z}")


def _series(k: int, x: float, budget: AccuracyBudget) -> float:
    # sum_m (-1)^m (x/2)^(2m+k) / (m! (m+k)!)
    half = 0.5 * x
    term = half**k / math.factorial(k)
    total = term
    q = -half * half
    for m in range(1, budget.max_terms):
        term *= q / (m * (m + k))
        total += term
        if abs(term) < 1e-17 * max(abs(total), 1e-300) and m > half:
            break
    return total


def _miller(k: int, x: float) -> float:
    """Backward recurrence from well above max(k, x), normalized by J_0 + 2 sum J_2m = 1."""
    start = 2 * ((int(max(k, x)) + 40 + int(math.sqrt(40 * max(k, x)))) // 2)
    j_next, j_cur = 0.0, 1e-300
    wanted = 0.0
    norm = 0.0
    for m in range(start, 0, -1):
        j_prev = 2.0 * m / x * j_cur - j_next
        j_next, j_cur = j_cur, j_prev
        if abs(j_cur) > 1e250:
            j_next *= 1e-250
            j_cur *= 1e-250
            wanted *= 1e-250
            norm *= 1e-250
        if m - 1 == k:
            wanted = j_cur
        if (m - 1) % 2 == 0 and m - 1 > 0:
            norm += 2.0 * j_cur
    norm += j_cur
    return wanted / norm


def bessel_j(k: int, z: float, budget: AccuracyBudget = BUDGET) -> float:
    """Bessel function of the first kind J_k(z) for integer k >= 0 and real z.

    Examples
    --------
    >>> round(bessel_j(1, 1.0), 10)
    0.4400505857
    """
    _check_bessel_args(k, z, budget)
    return _bessel(int(k), float(z), budget)


def _bessel(k: int, z: float, budget: AccuracyBudget) -> float:
    x = abs(z)
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    value = _series(k, x, budget) if x <= SERIES_RADIUS else _miller(k, x)
    return -value if (z < 0 and k % 2) else value


def bessel_j_prime(k: int, z: float, budget: AccuracyBudget = BUDGET) -> float:
    """dJ_k/dz = (J_{k-1} - J_{k+1}) / 2, with J_{-1} = -J_1."""
    _check_bessel_args(k, z, budget)
    k, z = int(k), float(z)
    if k == 0:
        return -_bessel(1, z, budget)
    return 0.5 * (_bessel(k - 1, z, budget) - _bessel(k + 1, z, budget))


def assoc_laguerre(k: int, alpha: float, x):
    """Generalized Laguerre polynomial L_k^alpha(x) by upward recurrence in k.

    Accepts scalar or array ``x``.
    """
    if int(k) != k or k < 0 or k > 60:
        raise DomainError(f"Laguerre degree must be an integer in [0, 60], got {k}")
    x_arr = np.asarray(x, dtype=float)
    if np.any(x_arr < 0):
        raise DomainError("Laguerre polynomials are evaluated for x >= 0 only")
    prev = np.ones_like(x_arr)
    if k == 0:
        return prev[()] if prev.ndim == 0 else prev
    cur = 1.0 + alpha - x_arr
    for j in range(1, int(k)):
        prev, cur = cur, ((2 * j + 1 + alpha - x_arr) * cur - (j + alpha) * prev) / (j + 1)
    return cur[()] if cur.ndim == 0 else cur


def log_factorial(k: int) -> float:
    if int(k) != k or k < 0:
        raise DomainError(f"log_factorial needs an integer k >= 0, got {k}")
    return math.lgamma(k + 1.0)
