import math

import numpy as np
import pytest

from opfun.linalg import eigendecompose, operator_norm, random_hermitian, resolvent
from opfun.relbound import certify, hypothesis_report, rel_norm, shift_bound_check


def test_certify_a_zero_gives_operator_norm():
    rng = np.random.default_rng(0)
    v = random_hermitian(rng, 5)
    cert = certify(np.zeros((5, 5)), v, a=0.0)
    assert cert.b == pytest.approx(operator_norm(v), rel=1e-12)
    cert.check(np.zeros((5, 5)), v)


def test_certify_two_by_two_by_hand():
    h = np.diag([0.0, 10.0])
    v = np.diag([0.0, 5.0])
    cert = certify(h, v, a=0.5)
    assert cert.b == pytest.approx(0.0, abs=1e-12)  # 25 <= 0.25 * 100


def test_certify_zero_v():
    h = np.diag([1.0, 2.0])
    for a in (0.0, 0.3, 1.0):
        assert certify(h, np.zeros((2, 2)), a).b == 0.0


def test_certify_scaling_property():
    rng = np.random.default_rng(1)
    h, v = random_hermitian(rng, 6), random_hermitian(rng, 6)
    for z in (0.5, 2.0, -3.0):
        b1 = certify(h, z * v, abs(z) * 0.2).b
        b2 = abs(z) * certify(h, v, 0.2).b
        assert b1 == pytest.approx(b2, rel=1e-12)


def test_rel_norm_values():
    assert rel_norm(np.diag([0.0]), np.diag([3.0])) == pytest.approx(3.0)
    assert rel_norm(np.diag([10.0]), np.diag([3.0])) == pytest.approx(3.0 / math.sqrt(101.0))
    h = np.diag([0.0, 1.0, -2.0])
    v = np.diag([1.0, 2.0, 0.5])
    expect = max(abs(vi) / math.sqrt(1 + hi**2) for hi, vi in zip(np.diag(h), np.diag(v)))
    assert rel_norm(h, v) == pytest.approx(expect, rel=1e-12)


def test_rel_norm_within_certificate_sum():
    rng = np.random.default_rng(2)
    for _ in range(20):
        h, v = random_hermitian(rng, 5), random_hermitian(rng, 5)
        for a in (0.0, 0.1, 0.4):
            cert = certify(h, v, a)
            assert rel_norm(h, v) <= cert.a + cert.b + 1e-10


def test_shift_bound_check():
    rng = np.random.default_rng(3)
    h, v = random_hermitian(rng, 6), random_hermitian(rng, 6)
    cert = certify(h, v, a=0.0)
    rows = shift_bound_check(h, v, cert, [-0.9, -0.6, -0.3, 0.0, 0.3, 0.6, 0.9])
    assert all(r["pass"] for r in rows)
    # t = 0 reduces to ||V (H-i)^-1|| <= a + b
    r0 = [r for r in rows if r["t"] == 0.0][0]
    assert r0["lhs"] == pytest.approx(rel_norm(h, v), rel=1e-12)
    assert r0["lhs"] <= cert.a + cert.b + 1e-10


def test_shift_bound_zero_v():
    h = np.diag([1.0, -1.0])
    cert = certify(h, np.zeros((2, 2)), 0.0)
    rows = shift_bound_check(h, np.zeros((2, 2)), cert, [-0.5, 0.5])
    assert all(r["lhs"] == 0.0 for r in rows)


def test_second_resolvent_identity():
    rng = np.random.default_rng(4)
    for _ in range(100):
        d = int(rng.integers(2, 7))
        h, v = random_hermitian(rng, d), random_hermitian(rng, d)
        z = complex(rng.normal(), rng.normal() + 1.5)
        sh, shv = eigendecompose(h), eigendecompose(h + v)
        lhs = resolvent(shv, z) - resolvent(sh, z)
        rhs = -resolvent(shv, z) @ v @ resolvent(sh, z)
        scale = max(1.0, operator_norm(lhs))
        assert operator_norm(lhs - rhs) <= 1e-11 * scale


def test_hypothesis_report_zero_v():
    h = np.diag([0.0, 1.0])
    rep = hypothesis_report(h, np.zeros((2, 2)), n=2)
    assert rep.alpha == 0.0
    assert all(val == 0.0 for _, _, val in rep.schatten_table)


def test_hypothesis_report_diagonal_by_hand():
    h = np.diag([0.0, 1.0])
    v = np.diag([1.0, 1.0])
    rep = hypothesis_report(h, v, n=2)
    table = dict((p, val) for p, _, val in rep.schatten_table)
    # singular values of V (H-i)^-1 are 1 and 1/sqrt(2)
    assert table[1] == pytest.approx(math.sqrt(1.0 + 0.5), rel=1e-12)
    assert table[2] == pytest.approx(1.0 + 0.5, rel=1e-12)
    assert rep.alpha == pytest.approx(1.5)
    assert rep.all_pass()


def test_hypothesis_report_random_and_hoelder():
    rng = np.random.default_rng(5)
    h, v = random_hermitian(rng, 8), random_hermitian(rng, 8)
    n = 4
    rep = hypothesis_report(h, v, n=n)
    assert rep.all_pass()
    # Hoelder: ||V R^(p+1)||_{n/(p+1)} <= ||V R^p||_{n/p} * ||R||_n
    s = eigendecompose(h)
    from opfun.linalg import schatten_norm

    r = resolvent(s, 1j)
    table = dict((p, val) for p, _, val in rep.schatten_table)
    for p in range(1, n):
        assert table[p + 1] <= table[p] * schatten_norm(r, n) + 1e-10


def test_hypothesis_report_rejects_bad_args():
    h = np.diag([0.0, 1.0])
    with pytest.raises(ValueError):
        hypothesis_report(h, h, n=1)
    with pytest.raises(ValueError):
        hypothesis_report(h, h, n=2, a=1.0)
