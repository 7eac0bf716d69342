import math

import numpy as np
import pytest

from opfun.derivatives import fd_derivative, gateaux_derivative, taylor_report
from opfun.fourier import taylor_constants
from opfun.functions import (
    GaussianFunction,
    PolynomialFunction,
    RationalFunction,
    fu_power,
    standard_catalog,
)
from opfun.linalg import (
    eigendecompose,
    matrix_function,
    operator_norm,
    random_hermitian,
    resolvent,
)
from opfun.moi import moi_request, moi_spectral

RATIONAL = RationalFunction([(1.0, 2.0j, 1)])
GAUSS = GaussianFunction(1.0, 0.0)


def test_first_order_resolvent_identity():
    # d/dt (H + tV - 2i)^-1 at 0 = -(H-2i)^-1 V (H-2i)^-1
    rng = np.random.default_rng(0)
    h, v = random_hermitian(rng, 5), random_hermitian(rng, 5)
    s = eigendecompose(h)
    got = gateaux_derivative(RATIONAL, h, v, 1).value
    r = resolvent(s, 2j)
    expect = -r @ v @ r
    assert operator_norm(got - expect) < 1e-11 * max(1.0, operator_norm(expect))


def test_first_order_scalar():
    got = gateaux_derivative(GAUSS, np.array([[0.3]]), np.array([[2.0]]), 1).value
    expect = GAUSS.deriv(np.array([0.3]), 1)[0] * 2.0
    assert got[0, 0] == pytest.approx(expect, rel=1e-12)


def test_fd_polynomial_exact():
    rng = np.random.default_rng(1)
    h, v = random_hermitian(rng, 4), random_hermitian(rng, 4)
    sq = PolynomialFunction([0.0, 0.0, 1.0])
    val, err = fd_derivative(sq, h, v, 1)
    expect = h @ v + v @ h
    assert operator_norm(val - expect) < 1e-8 * max(1.0, operator_norm(expect))
    cube = PolynomialFunction([0.0, 0.0, 0.0, 1.0])
    val3, _ = fd_derivative(cube, h, v, 3)
    # third derivative of (H+tV)^3 is 6 V^3; also equals 3! T with constant symbol
    assert operator_norm(val3 - 6.0 * v @ v @ v) < 1e-6 * max(1.0, operator_norm(v) ** 3)
    moi3 = gateaux_derivative(cube, h, v, 3).value
    assert operator_norm(moi3 - 6.0 * v @ v @ v) < 1e-10 * max(1.0, operator_norm(v) ** 3)


def test_gateaux_matches_fd_randomized():
    rng = np.random.default_rng(2)
    for f in standard_catalog():
        for n in (1, 2, 3):
            d = int(rng.integers(1, 7))
            h, v = random_hermitian(rng, d), random_hermitian(rng, d)
            res = gateaux_derivative(f, h, v, n, with_fd=True)
            scale = max(1.0, operator_norm(res.value))
            tol = max(1e-6 * scale, 10.0 * res.fd_error)
            assert operator_norm(res.value - res.fd_value) <= tol


def test_gateaux_at_nonzero_base_point():
    rng = np.random.default_rng(3)
    h, v = random_hermitian(rng, 3), random_hermitian(rng, 3)
    res = gateaux_derivative(GAUSS, h, v, 2, t0=0.4, with_fd=True)
    scale = max(1.0, operator_norm(res.value))
    assert operator_norm(res.value - res.fd_value) <= max(1e-6 * scale, 10.0 * res.fd_error)


def test_first_derivative_two_term_formula():
    # T^{H,H}_{(fu)^[1]}(V (H-i)^-1) - f(H) V (H-i)^-1 equals the derivative
    rng = np.random.default_rng(4)
    for f in (RATIONAL, GAUSS):
        h, v = random_hermitian(rng, 5), random_hermitian(rng, 5)
        s = eigendecompose(h)
        vr = v @ resolvent(s, 1j)
        lhs = moi_spectral(moi_request(fu_power(f, 1), [s, s], [vr]), with_bound=False).value
        lhs = lhs - matrix_function(s, f) @ vr
        rhs = gateaux_derivative(f, h, v, 1).value
        assert operator_norm(lhs - rhs) < 1e-11 * max(1.0, operator_norm(rhs))


def test_taylor_scalar_matches_scalar_calculus():
    h = np.array([[0.2]])
    v = np.array([[0.3]])
    reports = taylor_report(RATIONAL, h, v, 4)
    for rep in reports:
        n = rep.order
        partial = sum(
            RATIONAL.deriv(np.array([0.2]), k)[0] * 0.3**k / math.factorial(k)
            for k in range(n)
        )
        expect = RATIONAL.value(np.array([0.5]))[0] - partial
        assert rep.remainder_direct[0, 0] == pytest.approx(expect, rel=1e-10, abs=1e-14)
        assert rep.consistent(1e-12)


def test_taylor_zero_v():
    h = np.diag([0.0, 1.0])
    reports = taylor_report(RATIONAL, h, np.zeros((2, 2)), 3)
    for rep in reports:
        assert rep.remainder_norm < 1e-14
        assert rep.route_gap < 1e-14


def test_taylor_contraction_decay_and_routes():
    rng = np.random.default_rng(5)
    h = random_hermitian(rng, 4)
    v = random_hermitian(rng, 4)
    tc = taylor_constants(RATIONAL)
    s = eigendecompose(h)
    r = operator_norm(v @ resolvent(s, 1j))
    v = v * (0.5 / (1.0 + tc.C_f) / r)  # contraction exactly 0.5
    reports = taylor_report(RATIONAL, h, v, 60, constants=tc, stop_below=1e-9)
    assert reports[0].contraction == pytest.approx(0.5, rel=1e-12)
    for rep in reports:
        assert rep.within_bound()
        assert rep.consistent(1e-10)
    assert reports[-1].remainder_norm < 1e-9 * reports[-1].scale
    assert reports[-1].order <= 60
    # geometric decay: remainder never exceeds c_f 0.5^n
    for rep in reports:
        assert rep.remainder_norm <= tc.c_f * 0.5**rep.order * (1 + 1e-9)


def test_taylor_convergence_of_partial_sums():
    rng = np.random.default_rng(6)
    h = random_hermitian(rng, 3)
    v = random_hermitian(rng, 3)
    tc = taylor_constants(RATIONAL)
    s = eigendecompose(h)
    r = operator_norm(v @ resolvent(s, 1j))
    v = v * (0.5 / (1.0 + tc.C_f) / r)
    reports = taylor_report(RATIONAL, h, v, 60, constants=tc, stop_below=1e-10)
    target = matrix_function(eigendecompose(h + v), RATIONAL)
    last = reports[-1]
    assert operator_norm(target - last.partial_sum) < 1e-9 * last.scale


def test_fd_rejects_large_order():
    with pytest.raises(ValueError):
        fd_derivative(GAUSS, np.eye(2), np.eye(2), 5)
