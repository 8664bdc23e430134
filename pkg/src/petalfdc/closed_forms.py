"""Closed-form SLEM characteristic equations for path-bundle petals.

The equations are evaluated exactly as stated, without correction.  Their
roots are candidates only; ``certificates.audit_closed_forms`` compares them
against the quotient spectra.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import bisect

from .exceptions import DegenerateEquation, SpecError

SCAN_POINTS = 10_000
ROOT_XTOL = 1e-12


def scan_roots(f: Callable[[np.ndarray], np.ndarray], lo: float, hi: float,
               points: int = SCAN_POINTS, xtol: float = ROOT_XTOL) -> list[float]:
    """Sign-change roots of ``f`` strictly inside ``(lo, hi)``.

    ``f`` is sampled on ``points`` interior grid points; each sign change is
    refined by bisection.  Grid points where ``f`` is exactly zero count as
    roots.  Even-multiplicity roots are not detected.
    """
    grid = np.linspace(lo, hi, points + 2)[1:-1]
    vals = np.asarray(f(grid), dtype=float)
    if not np.any(np.abs(vals) > 1e-12):
        raise DegenerateEquation("equation vanishes on the whole scan grid")
    scalar = lambda x: float(f(np.array([x]))[0])
    roots: list[float] = []
    for i, y in enumerate(vals):
        if y == 0.0:
            roots.append(float(grid[i]))
        elif i + 1 < len(vals) and y * vals[i + 1] < 0.0:
            roots.append(bisect(scalar, grid[i], grid[i + 1], xtol=xtol))
    roots.sort()
    merged: list[float] = []
    for r in roots:
        if not merged or r - merged[-1] > 10 * xtol:
            merged.append(r)
    return merged


def hub_equation_lhs(theta, n: int, m: int, k: int):
    """``(nk-2)(sin((m-1)t) + sin((m+1)t)) + 2nk sin(mt)``; the SLEM is claimed to be ``cos t``."""
    theta = np.asarray(theta, dtype=float)
    nk = n * k
    return ((nk - 2) * (np.sin((m - 1) * theta) + np.sin((m + 1) * theta))
            + 2 * nk * np.sin(m * theta))


def hub_theta_roots(n: int, m: int, k: int) -> list[float]:
    """Roots in ``(0, pi)`` of the single-hub equation, ascending."""
    if n < 2 or m < 2 or k < 1:
        raise SpecError(f"need n >= 2, m >= 2, k >= 1, got ({n}, {m}, {k})")
    return scan_roots(lambda t: hub_equation_lhs(t, n, m, k), 0.0, math.pi)


Poly = list  # ascending Fraction coefficients


def _mul(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _sub(p: Sequence[Fraction], q: Sequence[Fraction]) -> Poly:
    size = max(len(p), len(q))
    p = list(p) + [Fraction(0)] * (size - len(p))
    q = list(q) + [Fraction(0)] * (size - len(q))
    return [a - b for a, b in zip(p, q)]


def ccs_f(i: int, k: int) -> Poly:
    """The polynomial ``f_i`` of the complete-core recursion, with ``f_0 = 1``."""
    one = Fraction(1)
    if i == 0:
        return [one]
    if i == 1:
        return [Fraction(0), Fraction(1, k)]
    if i == 2:
        return [-one, Fraction(0), Fraction(k + 1, k)]
    prev2, prev1 = ccs_f(1, k), ccs_f(2, k)
    for _ in range(3, i + 1):
        prev2, prev1 = prev1, _sub(_mul([Fraction(0), Fraction(2)], prev1), prev2)
    return prev1


def ccs_polynomial(m: int, k: int) -> Poly:
    """``(2(k+1)s^2 - 1) f_{m-1}(s) - (k+1) s f_{m-2}(s)`` with exact coefficients."""
    if m < 2 or k < 1:
        raise SpecError(f"need m >= 2, k >= 1, got ({m}, {k})")
    lead = [Fraction(-1), Fraction(0), Fraction(2 * (k + 1))]
    left = _mul(lead, ccs_f(m - 1, k))
    right = _mul([Fraction(0), Fraction(k + 1)], ccs_f(m - 2, k))
    poly = _sub(left, right)
    while len(poly) > 1 and poly[-1] == 0:
        poly.pop()
    return poly


def ccs_characteristic_roots(m: int, k: int) -> list[float]:
    """Roots in ``(0, 1)`` of the complete-core characteristic polynomial, ascending."""
    coeffs = np.array([float(c) for c in ccs_polynomial(m, k)])
    return scan_roots(lambda s: np.polynomial.polynomial.polyval(s, coeffs), 0.0, 1.0)
