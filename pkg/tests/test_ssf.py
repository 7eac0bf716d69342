import math

import numpy as np
import pytest

from opfun.functions import GaussianFunction, PolynomialFunction, RationalFunction
from opfun.linalg import eigendecompose, random_hermitian, with_repeated_eigenvalue
from opfun.ssf import (
    counting_function,
    eta_next,
    krein_xi,
    shift_function_pointwise,
    spectral_shift_functions,
    trace_density,
    trace_formula_check,
    weighted_norm_report,
)

RATIONAL = RationalFunction([(1.0, 2.0j, 5)])
GAUSS = GaussianFunction(1.0, 0.0)


def test_counting_function_examples():
    c = counting_function(np.diag([0.0, 0.0, 1.0]))
    assert c.jump_locations.tolist() == [0.0, 1.0]
    assert c.jump_sizes.tolist() == [2, 1]
    c2 = counting_function(np.eye(3))
    assert c2.jump_locations.tolist() == [1.0]
    assert c2.jump_sizes.tolist() == [3]
    assert c2(np.array([0.5, 1.0, 2.0])).tolist() == [0, 3, 3]
    rng = np.random.default_rng(0)
    c3 = counting_function(random_hermitian(rng, 5))
    assert c3.jump_sizes.tolist() == [1] * 5
    assert c3.total == 5


def test_krein_xi_rank_one():
    xi = krein_xi(np.array([[0.0]]), np.array([[1.0]]))
    assert xi(np.array([0.5]))[0] == pytest.approx(1.0)
    assert xi(np.array([-0.1, 1.1])).tolist() == [0.0, 0.0]
    # integral of f' xi = f(1) - f(0)
    got = xi.density.integrate_against(lambda x: GAUSS.deriv(x, 1))
    expect = GAUSS.value(np.array([1.0]))[0] - GAUSS.value(np.array([0.0]))[0]
    assert got == pytest.approx(expect, rel=1e-10)


def test_krein_xi_zero_v():
    h = np.diag([0.0, 1.0, 2.0])
    xi = krein_xi(h, np.zeros((3, 3)))
    assert xi.total_integral() == pytest.approx(0.0, abs=1e-14)


def test_krein_xi_two_level():
    xi = krein_xi(np.diag([0.0, 2.0]), np.diag([1.0, -1.0]))
    assert xi(np.array([0.5]))[0] == pytest.approx(1.0)
    assert xi(np.array([1.5]))[0] == pytest.approx(-1.0)


def test_xi_integral_is_trace():
    rng = np.random.default_rng(1)
    for _ in range(20):
        d = int(rng.integers(1, 8))
        h, v = random_hermitian(rng, d), random_hermitian(rng, d)
        xi = krein_xi(h, v)
        assert xi.total_integral() == pytest.approx(float(np.trace(v).real), abs=1e-10)


def test_trace_density_scalar_point_mass():
    rho = trace_density(np.array([[0.0]]), np.array([[0.7]]), 1)
    assert rho.density.point_masses == ((0.0, 0.7),)


def test_trace_density_integral_is_trace_power():
    rng = np.random.default_rng(2)
    h, v = random_hermitian(rng, 4), random_hermitian(rng, 4)
    for k in (1, 2, 3):
        rho = trace_density(h, v, k)
        expect = np.trace(np.linalg.matrix_power(v, k)) / math.factorial(k)
        assert rho.density.total_integral() == pytest.approx(complex(expect), abs=1e-10)
        assert rho.imag_residue < 1e-11 * max(1.0, abs(expect))


def test_trace_density_zero_v():
    h = np.diag([0.0, 1.0])
    rho = trace_density(h, np.zeros((2, 2)), 2)
    assert rho.density.total_integral() == 0.0


def test_trace_density_monomial_oracle():
    # integral of (x^(k+m))^(k) rho_k equals the trace of the tuple sum directly
    rng = np.random.default_rng(3)
    h, v = random_hermitian(rng, 4), random_hermitian(rng, 4)
    s = eigendecompose(h)
    x = s.vectors.conj().T @ v @ s.vectors
    lam = s.rep_values
    for k in (1, 2):
        rho = trace_density(h, v, k)
        for m in range(4):
            f = PolynomialFunction([0.0] * (k + m) + [1.0])
            got = rho.density.integrate_against(lambda t: f.deriv(t, k))
            from opfun.functions import divided_difference
            expect = 0.0
            for tup in np.ndindex(*([4] * k)):
                nodes = [lam[c] for c in tup] + [lam[tup[0]]]
                w = 1.0
                chain = x[tup[0], tup[1]] if k > 1 else x[tup[0], tup[0]]
                for i in range(1, k):
                    chain *= x[tup[i], tup[(i + 1) % k]]
                expect += divided_difference(f, nodes) * chain
            assert got == pytest.approx(expect, rel=1e-9, abs=1e-11)


def test_eta_two_scalar_closed_form():
    v = 0.8
    etas = spectral_shift_functions(np.array([[0.0]]), np.array([[v]]), 2)
    eta2 = etas[1]
    xs = np.linspace(-0.2, 1.2, 57)
    expect = np.clip(v - xs, 0.0, None) * (xs >= 0.0)
    assert np.max(np.abs(eta2(xs) - expect)) < 1e-12


def test_eta_next_zero_v():
    h = np.diag([0.0, 1.0])
    etas = spectral_shift_functions(h, np.zeros((2, 2)), 3)
    for eta in etas:
        assert abs(eta.total_integral()) < 1e-12


def test_eta_recursion_hull_and_jump_structure():
    rng = np.random.default_rng(4)
    h, v = random_hermitian(rng, 4), random_hermitian(rng, 4)
    etas = spectral_shift_functions(h, v, 4)
    lo, hi = etas[0].support_hull
    for eta in etas[1:]:
        assert eta.density.degree <= eta.order - 1
        xs = np.array([lo - 0.5, hi + 0.5, lo - 2.0, hi + 2.0])
        assert np.max(np.abs(eta(xs))) == 0.0
    # eta_2 jumps exactly by the diagonal weights of V at eigenvalues of H
    s = eigendecompose(h)
    diag = (s.vectors.conj().T @ v @ s.vectors).diagonal().real
    eta2 = etas[1]
    for lam, w in zip(s.eigenvalues, diag):
        jump = eta2(np.array([lam + 1e-10]))[0] - eta2(np.array([lam - 1e-10]))[0]
        assert jump == pytest.approx(w, abs=1e-6)
    # away from the atoms of the trace density (eigenvalues of H), eta_2 is
    # continuous: check at the eigenvalues of H+V
    for lam in np.linalg.eigvalsh(h + v):
        if np.min(np.abs(s.eigenvalues - lam)) < 1e-6:
            continue
        jump = eta2(np.array([lam + 1e-10]))[0] - eta2(np.array([lam - 1e-10]))[0]
        assert abs(jump) < 1e-8


def test_eta_three_scalar_closed_form():
    # 1x1 pair: eta_3 = (v - lam)_+^2 / 2 on [0, v], jump v^2/2 at 0
    v = 0.8
    etas = spectral_shift_functions(np.array([[0.0]]), np.array([[v]]), 3)
    xs = np.linspace(-0.2, 1.2, 57)
    expect = np.clip(v - xs, 0.0, None) ** 2 / 2.0 * (xs >= 0.0)
    assert np.max(np.abs(etas[2](xs) - expect)) < 1e-12


def test_moment_ladder():
    rng = np.random.default_rng(5)
    h, v = random_hermitian(rng, 5), random_hermitian(rng, 5)
    etas = spectral_shift_functions(h, v, 4)
    assert etas[0].total_integral() == pytest.approx(float(np.trace(v).real), abs=1e-10)
    for k in (1, 2, 3):
        rho = trace_density(h, v, k)
        gap = etas[k - 1].density.total_integral() - rho.density.total_integral()
        assert abs(gap) < 1e-9 * max(1.0, abs(rho.density.total_integral()))


@pytest.mark.parametrize("k", [1, 2, 3, 4])
def test_trace_formula_orders(k):
    rng = np.random.default_rng(10 + k)
    h, v = random_hermitian(rng, 5), random_hermitian(rng, 5)
    for f in (RATIONAL, GAUSS):
        rep = trace_formula_check(f, h, v, k, tolerance=1e-7 if k > 1 else 1e-9)
        assert rep.passed, (k, f.kind, rep.relative_residual)


def test_trace_formula_polynomial_below_order():
    h = np.diag([0.0, 1.0])
    v = np.diag([0.5, -0.25])
    f = PolynomialFunction([1.0, 2.0])  # degree 1 < k = 2
    rep = trace_formula_check(f, h, v, 2)
    assert rep.passed
    assert rep.residual_norm < 1e-12


def test_trace_formula_scalar_k2():
    h = np.array([[0.0]])
    v = np.array([[0.6]])
    rep = trace_formula_check(GAUSS, h, v, 2)
    assert rep.passed
    lhs = rep.lhs_norm
    expect = abs(
        GAUSS.value(np.array([0.6]))[0]
        - GAUSS.value(np.array([0.0]))[0]
        - GAUSS.deriv(np.array([0.0]), 1)[0] * 0.6
    )
    assert lhs == pytest.approx(expect, rel=1e-10)


def test_trace_formula_degenerate_spectrum():
    rng = np.random.default_rng(6)
    h = with_repeated_eigenvalue(rng, 5)
    v = random_hermitian(rng, 5)
    for k in (1, 2, 3):
        rep = trace_formula_check(RATIONAL, h, v, k, tolerance=1e-7 if k > 1 else 1e-9)
        assert rep.passed, (k, rep.relative_residual)


def test_pointwise_pipeline_matches_recursion():
    rng = np.random.default_rng(7)
    h, v = random_hermitian(rng, 4), 0.6 * random_hermitian(rng, 4)
    etas = spectral_shift_functions(h, v, 3)
    lo, hi = etas[0].support_hull
    grid = np.linspace(lo - 0.3, hi + 0.3, 41)
    spec = np.concatenate([np.linalg.eigvalsh(h), np.linalg.eigvalsh(h + v)])
    grid = np.array([g for g in grid if np.min(np.abs(spec - g)) > 1e-3])
    for k in (1, 2, 3):
        direct = shift_function_pointwise(h, v, k, grid)
        rec = etas[k - 1](grid)
        scale = max(1.0, np.max(np.abs(rec)))
        assert np.max(np.abs(direct - rec)) < 1e-8 * scale, k


def test_weighted_norm_closed_form():
    xi = krein_xi(np.array([[0.0]]), np.array([[1.0]]))
    rep = weighted_norm_report(xi, n=2, k=1, eps=1.0)
    assert rep["value"] == pytest.approx(3.0 / 8.0, rel=1e-9)
    assert rep["exponent"] == 3.0


def test_weighted_norm_zero_eta():
    h = np.diag([0.0, 1.0])
    xi = krein_xi(h, np.zeros((2, 2)))
    rep = weighted_norm_report(xi, n=2, k=1, eps=0.5)
    assert rep["value"] == pytest.approx(0.0, abs=1e-12)


def test_weighted_norm_eta2_scalar():
    etas = spectral_shift_functions(np.array([[0.0]]), np.array([[0.8]]), 2)
    rep = weighted_norm_report(etas[1], n=2, k=2, eps=1.0)
    assert rep["value"] > 0.0
    # exact: integral of (0.8 - x)(1+x)^-5 on [0, 0.8]
    from opfun.piecewise import gauss_legendre_nodes

    xs, ws = gauss_legendre_nodes(0.0, 0.8, 200)
    exact = float(np.sum(ws * (0.8 - xs) * (1 + xs) ** -5.0))
    assert rep["value"] == pytest.approx(exact, rel=1e-8)


def test_weighted_norm_with_scaffold():
    rng = np.random.default_rng(8)
    h, v = random_hermitian(rng, 4), random_hermitian(rng, 4)
    from opfun.relbound import hypothesis_report

    hyp = hypothesis_report(h, v, n=2)
    xi = krein_xi(h, v)
    rep = weighted_norm_report(xi, n=2, k=1, eps=1.0, hypothesis=hyp)
    assert rep["scaffold"]["prefactor"] >= 1.0


def test_reality_of_eta():
    rng = np.random.default_rng(9)
    h, v = random_hermitian(rng, 6), random_hermitian(rng, 6)
    for eta in spectral_shift_functions(h, v, 4):
        assert eta.imag_residue < 1e-11 * 10


def test_convention_switch_changes_lhs():
    rng = np.random.default_rng(11)
    h, v = random_hermitian(rng, 3), random_hermitian(rng, 3)
    with_fact = trace_formula_check(GAUSS, h, v, 3, with_factorials=True)
    without = trace_formula_check(GAUSS, h, v, 3, with_factorials=False)
    assert with_fact.passed
    assert abs(with_fact.lhs_norm - without.lhs_norm) > 1e-6
