import math

import numpy as np
import pytest

from opfun.functions import GaussianFunction, PolynomialFunction, divided_difference
from opfun.piecewise import PiecewisePolynomial, divided_difference_density


def test_density_two_nodes_constant():
    rho = divided_difference_density([0.0, 2.0])
    xs = np.array([0.5, 1.0, 1.9])
    assert np.allclose(rho(xs), 0.5)
    assert rho(np.array([-0.1, 2.1])).tolist() == [0, 0]
    assert rho.total_integral() == pytest.approx(1.0)
    f = GaussianFunction(1.0, 0.0)
    got = rho.integrate_against(lambda x: f.deriv(x, 1))
    assert got == pytest.approx(divided_difference(f, [0.0, 2.0]), rel=1e-10)


def test_density_hat_function():
    rho = divided_difference_density([0.0, 1.0, 2.0])
    assert rho(np.array([1.0]))[0] == pytest.approx(0.5)
    assert rho(np.array([0.5]))[0] == pytest.approx(0.25)
    # f = x^2: integral of f'' * rho = 1 = f[0,1,2]
    got = rho.integrate_against(lambda x: 2.0 * np.ones_like(x))
    assert got == pytest.approx(1.0, rel=1e-12)
    assert rho.total_integral() == pytest.approx(0.5)


def test_density_full_confluence_point_mass():
    rho = divided_difference_density([1.3, 1.3, 1.3])
    assert rho.npieces == 0
    assert rho.point_masses == ((1.3, 0.5),)


def test_density_partial_confluence():
    rho = divided_difference_density([0.0, 0.0, 1.0])
    # density (1 - t) on (0,1); f = x^2 gives integral 2*(1/2) = 1 = f[0,0,1]
    assert rho(np.array([0.25]))[0] == pytest.approx(0.75)
    got = rho.integrate_against(lambda x: 2.0 * np.ones_like(x))
    assert got == pytest.approx(1.0, rel=1e-12)


def test_density_monomial_oracle_random():
    rng = np.random.default_rng(42)
    for _ in range(200):
        k = int(rng.integers(1, 6))
        nodes = np.round(rng.uniform(-3, 3, k + 1), 3)
        if rng.uniform() < 0.3 and k >= 1:
            nodes[1] = nodes[0]  # force a confluence
        m = int(rng.integers(0, 4))
        f = PolynomialFunction([0.0] * (k + m) + [1.0])
        rho = divided_difference_density(nodes)
        got = rho.integrate_against(lambda x: f.deriv(x, k))
        expect = divided_difference(f, nodes)
        assert got == pytest.approx(expect, rel=1e-9, abs=1e-12)


def test_density_total_integral_is_inverse_factorial():
    rng = np.random.default_rng(9)
    for k in range(1, 6):
        nodes = rng.uniform(-2, 2, k + 1)
        rho = divided_difference_density(nodes)
        assert rho.total_integral() == pytest.approx(1.0 / math.factorial(k), rel=1e-11)


def test_pp_addition_integral_additive():
    a = divided_difference_density([0.0, 1.0, 2.0])
    b = divided_difference_density([0.5, 1.5])
    c = divided_difference_density([1.0, 1.0, 1.0])
    s = a + b + c
    expect = a.total_integral() + b.total_integral() + c.total_integral()
    assert s.total_integral() == pytest.approx(expect, rel=1e-14)
    xs = np.linspace(-0.5, 2.5, 37)
    assert np.allclose(s(xs), a(xs) + b(xs) + c(xs), atol=1e-13)


def test_pp_cumulative_with_masses():
    # density 1 on [0,1] plus mass 2 at 0.5
    pp = PiecewisePolynomial([0.0, 1.0], [np.array([1.0])], [(0.5, 2.0)])
    g, total = pp.cumulative()
    assert total == pytest.approx(3.0)
    assert g(np.array([0.25]))[0] == pytest.approx(0.25)
    assert g(np.array([0.5]))[0] == pytest.approx(2.5)  # jump included right-continuously
    assert g(np.array([0.75]))[0] == pytest.approx(2.75)


def test_pp_scaled_neg_sub():
    a = divided_difference_density([0.0, 1.0])
    z = a - a
    xs = np.linspace(0, 1, 11)
    assert np.allclose(z(xs), 0.0)
    assert (-a)(np.array([0.5]))[0] == pytest.approx(-1.0)


def test_pp_serialization_roundtrip():
    a = divided_difference_density([0.0, 1.0, 1.0, 2.5]) + PiecewisePolynomial(
        [], [], [(0.5, 1.0 + 2.0j)]
    )
    b = PiecewisePolynomial.from_dict(a.to_dict())
    xs = np.linspace(-1, 3, 50)
    assert np.allclose(a(xs), b(xs))
    assert a.point_masses == b.point_masses


def test_pp_zero_outside_guard():
    pp = PiecewisePolynomial([0.0, 1.0, 2.0], [np.array([0.0]), np.array([1.0])])
    with pytest.raises(ValueError, match="vanish"):
        pp.zero_outside(0.0, 1.0, 1e-12)
    ok = pp.zero_outside(1.0, 2.0, 1e-12)
    assert ok.npieces == 1


def test_pp_rejects_bad_breakpoints():
    with pytest.raises(ValueError):
        PiecewisePolynomial([1.0, 0.0], [np.array([1.0])])
    with pytest.raises(ValueError):
        PiecewisePolynomial([0.0, 1.0], [])
