import math

import numpy as np
import pytest
import sympy as sp
from hypothesis import given, settings, strategies as st

from petalfdc.closed_forms import (ccs_characteristic_roots, ccs_f, ccs_polynomial,
                                   hub_equation_lhs, hub_theta_roots, scan_roots)
from petalfdc.exceptions import DegenerateEquation, SpecError

s, t = sp.symbols("s t")


def sympy_ccs(m, k):
    f = {0: sp.Integer(1), 1: s / k, 2: (k + 1) * s ** 2 / k - 1}
    for i in range(3, m + 1):
        f[i] = sp.expand(2 * s * f[i - 1] - f[i - 2])
    return sp.expand((2 * (k + 1) * s ** 2 - 1) * f[m - 1] - (k + 1) * s * f[m - 2])


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (3, 1), (3, 4), (5, 2), (6, 3)])
def test_ccs_polynomial_matches_sympy(m, k):
    ours = [sp.Rational(c.numerator, c.denominator) for c in ccs_polynomial(m, k)]
    ref = sp.Poly(sympy_ccs(m, k), s).all_coeffs()[::-1]
    assert ours == ref


@pytest.mark.parametrize("m,k", [(2, 1), (2, 2), (3, 1), (3, 2), (3, 5), (4, 3)])
def test_ccs_roots_match_sympy(m, k):
    exact = [float(r) for r in sp.Poly(sympy_ccs(m, k), s).real_roots() if 0 < r < 1]
    assert np.allclose(sorted(exact), ccs_characteristic_roots(m, k), atol=1e-11)


def test_ccs_examples():
    assert ccs_characteristic_roots(2, 1) == pytest.approx([3 ** .5 / 2], abs=1e-11)
    assert ccs_characteristic_roots(2, 2) == []
    # s = 0 is a root at m = 2 and is excluded
    assert ccs_polynomial(2, 3)[0] == 0
    assert ccs_f(0, 3) == [1]


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 5), st.integers(2, 6), st.integers(1, 5))
def test_hub_roots_are_multiples_of_pi_over_m(n, m, k):
    # the left side factors as 2 sin(m t) ((nk - 2) cos t + nk)
    lhs = (n * k - 2) * (sp.sin((m - 1) * t) + sp.sin((m + 1) * t)) + 2 * n * k * sp.sin(m * t)
    factored = 2 * sp.sin(m * t) * ((n * k - 2) * sp.cos(t) + n * k)
    assert sp.simplify(sp.expand_trig(lhs - factored)) == 0
    roots = hub_theta_roots(n, m, k)
    assert np.allclose(roots, [j * math.pi / m for j in range(1, m)], atol=1e-10)


def test_hub_examples():
    assert min(hub_theta_roots(2, 2, 1)) == pytest.approx(math.pi / 2, abs=1e-10)
    assert math.cos(min(hub_theta_roots(2, 3, 1))) == pytest.approx(0.5, abs=1e-10)
    assert hub_equation_lhs(math.pi, 3, 4, 2) == pytest.approx(0, abs=1e-12)
    assert all(r < math.pi for r in hub_theta_roots(3, 4, 2))
    with pytest.raises(SpecError):
        hub_theta_roots(2, 1, 1)


def test_scan_roots_degenerate_and_exact_zero():
    with pytest.raises(DegenerateEquation):
        scan_roots(lambda x: np.zeros_like(x), 0.0, 1.0)
    roots = scan_roots(lambda x: np.sin(3 * x), 0.0, math.pi)
    assert np.allclose(roots, [math.pi / 3, 2 * math.pi / 3], atol=1e-12)
