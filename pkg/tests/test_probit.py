import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pathint.errors import DomainError
from pathint.probit import ProbitConfig, gauss_quantile, psi, psi_inv


def _density(t):
    return math.sqrt(2 / math.pi) * math.exp(-t * t / 2)


def adaptive_simpson(f, a, b, tol=1e-14):
    """Reference quadrature, independent of erf."""
    def simpson(a, fa, b, fb):
        m = (a + b) / 2
        fm = f(m)
        return m, fm, (b - a) / 6 * (fa + 4 * fm + fb)

    def rec(a, fa, b, fb, m, fm, whole, tol, depth):
        lm, flm, left = simpson(a, fa, m, fm)
        rm, frm, right = simpson(m, fm, b, fb)
        if depth <= 0 or abs(left + right - whole) <= 15 * tol:
            return left + right + (left + right - whole) / 15
        return (rec(a, fa, m, fm, lm, flm, left, tol / 2, depth - 1)
                + rec(m, fm, b, fb, rm, frm, right, tol / 2, depth - 1))

    fa, fb = f(a), f(b)
    m, fm, whole = simpson(a, fa, b, fb)
    return rec(a, fa, b, fb, m, fm, whole, tol, 50)


def psi_reference(x):
    return adaptive_simpson(_density, 0.0, x)


def bisect_reference(p, lo=0.0, hi=10.0):
    for _ in range(80):
        mid = (lo + hi) / 2
        if psi_reference(mid) < p:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


@pytest.mark.parametrize("x, expected", [
    (0.0, 0.0),
    (1.0, 0.6826895),
])
def test_psi_examples(x, expected):
    assert psi(x) == pytest.approx(expected, abs=1e-7)


def test_psi_saturates():
    # 1 - 1e-20 rounds to 1.0 in double precision
    assert 1.0 - psi(10.0) <= 1e-20
    assert math.erfc(10.0 / math.sqrt(2)) < 1e-20


@pytest.mark.parametrize("x", np.linspace(0.0, 6.0, 25).tolist())
def test_psi_matches_adaptive_simpson(x):
    assert abs(psi(x) - psi_reference(x)) <= 1e-10


def test_psi_strictly_monotone():
    x = np.linspace(0.0, 8.0, 10 ** 4)
    v = np.array([psi(float(t)) for t in x])
    # erf saturates to 1.0 in double precision near x ~ 8.3; stay below it
    head = x <= 5.5
    assert np.all(np.diff(v[head]) > 0)
    assert np.all(np.diff(v) >= 0)


@pytest.mark.parametrize("p, expected", [
    (0.0, 0.0),
    (0.5, 0.6744897501960817),
])
def test_psi_inv_examples(p, expected):
    assert psi_inv(p) == pytest.approx(expected, abs=1e-12)


def test_psi_inv_against_bisection_oracle():
    for p in (0.1, 0.5, 0.9, 0.99):
        assert psi_inv(p) == pytest.approx(bisect_reference(p), abs=1e-9)


@pytest.mark.parametrize("p", [0.01, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.99])
def test_round_trip(p):
    assert abs(psi(psi_inv(p)) - p) <= 1e-10


@pytest.mark.parametrize("p, expected", [
    (0.5, 0.0),
    (1 / 6, -0.96742156610170104),
    (5 / 6, 0.96742156610170104),
    (0.975, 1.959963984540054),
])
def test_gauss_quantile_examples(p, expected):
    assert gauss_quantile(p) == pytest.approx(expected, abs=1e-12)


def test_gauss_quantile_antisymmetric():
    rng = np.random.default_rng(12)
    for p in rng.uniform(1e-9, 1 - 1e-9, size=1000):
        assert abs(gauss_quantile(p) + gauss_quantile(1 - p)) <= 1e-12


@settings(max_examples=200)
@given(st.floats(min_value=1e-12, max_value=1 - 1e-12))
def test_gauss_quantile_inverts_normal_cdf(p):
    x = gauss_quantile(p)
    cdf = 0.5 * math.erfc(-x / math.sqrt(2))
    assert cdf == pytest.approx(p, rel=1e-9, abs=1e-15)


def test_deep_tail_inverse_uses_complement():
    p = 1 - 1e-14
    x = psi_inv(p)
    assert math.erfc(x / math.sqrt(2)) == pytest.approx(1e-14, rel=1e-6)


@pytest.mark.parametrize("bad", [
    lambda: psi(-0.1),
    lambda: psi_inv(1.0),
    lambda: psi_inv(-0.2),
    lambda: gauss_quantile(0.0),
    lambda: gauss_quantile(1.0),
    lambda: ProbitConfig(abs_tolerance=0.0),
])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        bad()
