import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from riskiness import DensityGamble, OutOfDomain, Uniform, phi, phi_derivative
from riskiness.phi import boundary_lambda, phi_curve

from conftest import discrete_gambles, uniform_gambles


def uniform_closed_form(lam, b, loss=100.0):
    hi, lo = 1.0 + lam * b, 1.0 - lam * loss
    return ((hi * (math.log(hi) - 1.0)) - (lo * (math.log(lo) - 1.0))) / (lam * (b + loss))


def simpson(f, a, b, n=10_000_000):
    x = np.linspace(a, b, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2], w[2:-1:2] = 4.0, 2.0
    return float(np.dot(w, f(x))) * (b - a) / (3.0 * n)


@pytest.mark.parametrize("lam", [0.001, 0.005, 0.009])
def test_uniform_closed_form_against_simpson(lam):
    oracle = simpson(lambda x: np.log1p(lam * x) / 300.0, -100.0, 200.0)
    closed = uniform_closed_form(lam, 200.0)
    assert closed == pytest.approx(oracle, abs=1e-11)
    assert phi(DensityGamble(Uniform(-100.0, 200.0)), lam).value == pytest.approx(closed, abs=1e-9)


def test_uniform_boundary_value(uniform_200):
    ev = phi(uniform_200, 0.01)
    assert ev.value == pytest.approx(math.log(3.0) - 1.0, abs=1e-8)
    assert ev.abs_error_bound < 1e-8


def test_bernoulli_root_is_200(bernoulli):
    ev = phi(bernoulli, 1.0 / 200.0)
    assert abs(ev.value) <= 1e-12
    # 1/2000 is not a root: 0.5 * log(1.1 * 0.95) > 0
    assert phi(bernoulli, 1.0 / 2000.0).value == pytest.approx(0.5 * math.log(1.045), rel=1e-14)


def test_zero_is_exact(bernoulli, uniform_200, lognormal_10):
    for g in (bernoulli, uniform_200, lognormal_10):
        assert phi(g, 0.0).value == 0.0


def test_derivative_at_zero_is_mean(bernoulli, uniform_200, lognormal_10):
    assert phi_derivative(bernoulli, 0.0) == 50.0
    assert phi_derivative(uniform_200, 0.0) == pytest.approx(50.0, rel=1e-10)
    assert phi_derivative(lognormal_10, 0.0) == pytest.approx(math.e**3 - 10.0, rel=1e-9)


def test_bernoulli_derivative_rational(bernoulli):
    lam = Fraction(1, 2000)
    exact = Fraction(1, 2) * 200 / (1 + 200 * lam) + Fraction(1, 2) * -100 / (1 - 100 * lam)
    assert phi_derivative(bernoulli, 1.0 / 2000.0) == pytest.approx(float(exact), rel=1e-14)
    assert float(exact) == pytest.approx(38.278, abs=1e-3)


@pytest.mark.parametrize("lam", [0.001, 0.005, 0.009])
def test_uniform_derivative_finite_difference(uniform_200, lam):
    h = 1e-6
    fd = (phi(uniform_200, lam + h).value - phi(uniform_200, lam - h).value) / (2 * h)
    assert phi_derivative(uniform_200, lam) == pytest.approx(fd, abs=1e-5)


def test_lognormal_boundary_closed_form(lognormal_10):
    # 1 + X/L = exp(y)/L with y ~ N(mu, sigma^2)
    assert phi(lognormal_10, 0.1).value == pytest.approx(1.0 - math.log(10.0), abs=1e-9)


def test_domain(bernoulli, uniform_200):
    with pytest.raises(OutOfDomain):
        phi(bernoulli, 0.01)
    with pytest.raises(OutOfDomain):
        phi(bernoulli, -1e-3)
    with pytest.raises(OutOfDomain):
        phi(uniform_200, 0.0100001)
    with pytest.raises(OutOfDomain):
        phi_derivative(uniform_200, 0.01)


def test_curve_marks_discrete_boundary(bernoulli):
    vals = phi_curve(bernoulli, [0.0, 0.005, 0.01])
    assert vals[0] == 0.0 and abs(vals[1]) < 1e-12 and vals[2] == -math.inf


def _fd_check(g, frac):
    lam = frac * boundary_lambda(g)
    h = 1e-6 * boundary_lambda(g)
    fd = (phi(g, lam + h).value - phi(g, lam - h).value) / (2 * h)
    d = phi_derivative(g, lam)
    assert d == pytest.approx(fd, rel=1e-4, abs=1e-4)


@given(discrete_gambles(), st.floats(0.01, 0.95))
def test_derivative_matches_fd_discrete(g, frac):
    _fd_check(g, frac)


@given(uniform_gambles(), st.floats(0.01, 0.95))
def test_derivative_matches_fd_uniform(g, frac):
    _fd_check(g, frac)


def _concave(g, u, v):
    lam_star = boundary_lambda(g)
    a, b = sorted((u * lam_star, v * lam_star))
    mid = phi(g, 0.5 * (a + b))
    pa, pb = phi(g, a), phi(g, b)
    slack = mid.abs_error_bound + 0.5 * (pa.abs_error_bound + pb.abs_error_bound) + 1e-15
    assert mid.value >= 0.5 * (pa.value + pb.value) - slack


@given(discrete_gambles(), st.floats(0.0, 0.999), st.floats(0.0, 0.999))
def test_concave_discrete(g, u, v):
    _concave(g, u, v)


@given(uniform_gambles(), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_concave_uniform(g, u, v):
    _concave(g, u, v)


@given(uniform_gambles(), st.floats(0.01, 0.99))
def test_nonnegative_boundary_keeps_phi_positive(g, frac):
    lam_star = boundary_lambda(g)
    if phi(g, lam_star).value >= 0:
        assert phi(g, frac * lam_star).value > 0


@given(uniform_gambles(), st.floats(0.01, 0.99))
def test_uniform_matches_closed_form(g, frac):
    loss, b = -g.lower, g.upper
    lam = frac / loss
    assert phi(g, lam).value == pytest.approx(uniform_closed_form(lam, b, loss), abs=1e-9)
