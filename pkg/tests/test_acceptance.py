"""Acceptance gate: every exit criterion at its stated tolerance, one
printed PASS/FAIL line per criterion (run with `pytest -s tests/test_acceptance.py -v`
to see the lines as they complete)."""

import math
import time

import numpy as np
import pytest

from opfun.derivatives import gateaux_derivative, taylor_report
from opfun.fourier import fourier_norm, taylor_constants
from opfun.functions import RationalFunction, standard_catalog
from opfun.identities import run_identity_suite
from opfun.linalg import (
    eigendecompose,
    operator_norm,
    random_complex,
    random_hermitian,
    resolvent,
    with_repeated_eigenvalue,
)
from opfun.moi import moi_request, moi_spectral
from opfun.relbound import certify, hypothesis_report, shift_bound_check
from opfun.ssf import spectral_shift_functions, trace_formula_check

CATALOG = standard_catalog()
POLE = RationalFunction([(1.0, 2.0j, 1)])


def _verdict(name: str, ok: bool, detail: str) -> None:
    print(f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})")
    assert ok, f"{name}: {detail}"


def test_derivative_formula():
    # n in {1,2,3}, d in {1..6}, 50 seeds, catalog f:
    # ||n! T - FD_n|| <= max(1e-6 scale, 10 Richardson error); < 60 s
    t0 = time.perf_counter()
    worst, cases = 0.0, 0
    for seed in range(50):
        for d in range(1, 7):
            rng = np.random.default_rng(np.random.SeedSequence([41, seed, d]))
            h, v = random_hermitian(rng, d), random_hermitian(rng, d)
            for f in CATALOG:
                for n in (1, 2, 3):
                    res = gateaux_derivative(f, h, v, n, with_fd=True)
                    gap = operator_norm(res.value - res.fd_value)
                    scale = max(1.0, operator_norm(res.value))
                    tol = max(1e-6 * scale, 10.0 * res.fd_error)
                    worst = max(worst, gap / tol)
                    cases += 1
    dt = time.perf_counter() - t0
    _verdict(
        "derivative-formula",
        worst <= 1.0 and dt < 60.0,
        f"{cases} cases, worst gap/tol {worst:.3f}, {dt:.1f}s",
    )


def test_exact_identity_suite():
    # all exact-algebra identities at <= 1e-9 relative residual, < 120 s
    t0 = time.perf_counter()
    reports = run_identity_suite(seeds=range(50), dims=[1, 2, 3, 4, 6])
    dt = time.perf_counter() - t0
    exact = [r for r in reports if r.identity_name != "weighted-duhamel"]
    worst = max(r.relative_residual for r in exact)
    ladder_failures = sum(not r.passed for r in reports)
    ok = worst <= 1e-9 and ladder_failures == 0 and dt < 120.0
    _verdict(
        "exact-identity-suite",
        ok,
        f"{len(reports)} checks, worst exact residual {worst:.2e}, "
        f"{ladder_failures} ladder failures, {dt:.1f}s",
    )


def test_alpha_independence():
    # mixed weight vectors agree to 1e-10 relative for every n <= 3
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(np.random.SeedSequence([47, seed]))
        d = int(rng.integers(2, 5))
        for n in (1, 2, 3):
            hs = [random_hermitian(rng, d) for _ in range(n + 1)]
            vs = [random_hermitian(rng, d) for _ in range(n)]
            for f in (CATALOG[0], CATALOG[2]):
                base = moi_spectral(moi_request(f, hs, vs), with_bound=False).value
                alphas = [[1] * n, [1] + [0] * (n - 1), [0] * (n - 1) + [1],
                          [(i + 1) % 2 for i in range(n)]]
                for alpha in alphas:
                    got = moi_spectral(moi_request(f, hs, vs, alpha), with_bound=False).value
                    rel = operator_norm(got - base) / max(operator_norm(base), 1e-30)
                    worst = max(worst, rel)
    _verdict("alpha-independence", worst <= 1e-10, f"worst relative gap {worst:.2e}")


def test_weighted_duhamel():
    # quadrature residual <= 1e-8 at 64 nodes for |x| <= 4, d <= 6
    from opfun.identities import check_weighted_duhamel

    worst = 0.0
    for seed in range(8):
        rng = np.random.default_rng(np.random.SeedSequence([53, seed]))
        d = int(rng.integers(2, 7))
        h, v = random_hermitian(rng, d), random_hermitian(rng, d)
        for x in (-4.0, -1.7, 0.6, 2.0, 4.0):
            rep = check_weighted_duhamel(h, v, x, quad_nodes=64)
            worst = max(worst, rep.relative_residual)
    _verdict("weighted-duhamel", worst <= 1e-8, f"worst relative residual {worst:.2e}")


def test_apriori_bounds_and_inequalities():
    # ||T|| <= bound on every randomized run; resolvent-shift inequalities
    # hold with nonnegative margins
    violations, margin_min, cases = 0, math.inf, 0
    for seed in range(20):
        rng = np.random.default_rng(np.random.SeedSequence([59, seed]))
        d = int(rng.integers(1, 5))
        for f in CATALOG:
            for n in (1, 2):
                hs = [random_hermitian(rng, d) for _ in range(n + 1)]
                vs = [random_complex(rng, (d, d)) for _ in range(n)]
                for alpha in (None, [1] * n):
                    res = moi_spectral(moi_request(f, hs, vs, alpha))
                    cases += 1
                    if not res.bound_ok():
                        violations += 1
        h, v = random_hermitian(rng, max(d, 2)), random_hermitian(rng, max(d, 2))
        cert = certify(h, v, a=0.0)
        for row in shift_bound_check(h, v, cert, [-0.9, -0.4, 0.0, 0.4, 0.9]):
            margin_min = min(margin_min, row["margin"])
        rep = hypothesis_report(h, v, n=3)
        for row in rep.shift_rows:
            margin_min = min(margin_min, row["margin"])
    ok = violations == 0 and margin_min >= -1e-10
    _verdict(
        "apriori-bounds",
        ok,
        f"{cases} bound checks, {violations} violations, min margin {margin_min:.3e}",
    )


def test_taylor_series():
    # contraction pinned to 0.5 by scaling V: remainder below 1e-9 scale by
    # n <= 60, never above c_f 0.5^n, two remainder routes within 1e-10 scale
    tc = taylor_constants(POLE)
    ok_all, detail = True, []
    for seed in range(5):
        rng = np.random.default_rng(np.random.SeedSequence([61, seed]))
        h = random_hermitian(rng, 4)
        v = random_hermitian(rng, 4)
        r = operator_norm(v @ resolvent(eigendecompose(h), 1j))
        v = v * (0.5 / (1.0 + tc.C_f) / r)
        reports = taylor_report(POLE, h, v, 60, constants=tc, stop_below=1e-9)
        last = reports[-1]
        converged = last.remainder_norm < 1e-9 * last.scale and last.order <= 60
        bounds = all(rep.remainder_norm <= tc.c_f * 0.5**rep.order * (1 + 1e-9)
                     for rep in reports)
        routes = all(rep.consistent(1e-10) for rep in reports)
        ok_all &= converged and bounds and routes
        detail.append(f"seed {seed}: n*={last.order}")
    _verdict("taylor-series", ok_all, "; ".join(detail))


def test_closed_form_fourier_norms():
    # FFT estimate matches |w-i|^n n! |Im w|^-(n+1) within its error budget
    # for n <= 6; Gaussian a_n = |mu_n|/n! fits c C^n within 10% over n = 1..8
    ok = True
    details = []
    w = 2.0j
    for n in range(0, 7):
        closed = abs(w - 1j) ** n * math.factorial(n) / abs(w.imag) ** (n + 1)
        fft = fourier_norm(POLE, n, method="fft")
        gap = abs(fft.value - closed)
        ok &= gap <= fft.error_bound + 1e-9 * closed
        details.append(f"n={n}: gap {gap:.1e} <= budget {fft.error_bound:.1e}")
    a = np.array([fourier_norm(CATALOG[2], n).value / math.factorial(n) for n in range(1, 9)])
    ns = np.arange(1, 9)
    slope, intercept = np.polyfit(ns, np.log(a), 1)
    fit = np.exp(intercept + slope * ns)
    res = float(np.max(np.abs(a / fit - 1.0)))
    ok &= res <= 0.10
    _verdict("fourier-closed-forms", ok, f"gaussian fit residual {res:.3f}; " + details[-1])


def test_ssf_pipeline():
    t0 = time.perf_counter()
    # (i) first-order trace formula at 1e-9 over 100 random cases
    worst1 = 0.0
    for case in range(100):
        rng = np.random.default_rng(np.random.SeedSequence([67, case]))
        d = int(rng.integers(2, 9))
        h = with_repeated_eigenvalue(rng, d) if case % 5 == 0 else random_hermitian(rng, d)
        v = random_hermitian(rng, d)
        f = CATALOG[case % len(CATALOG)]
        rep = trace_formula_check(f, h, v, 1, tolerance=1e-9)
        worst1 = max(worst1, rep.relative_residual if not rep.passed else 0.0)
        assert rep.passed, (case, rep.relative_residual)
    # (ii) integral of eta_1 = Tr V at 1e-10; (iii) orders 2..4 at 1e-7 from
    # the recursion; (iv) hull vanishing; (v) scalar eta_2 closed form
    ok2 = ok3 = ok4 = True
    for case in range(12):
        rng = np.random.default_rng(np.random.SeedSequence([71, case]))
        d = int(rng.integers(2, 9))
        h = with_repeated_eigenvalue(rng, d) if case % 4 == 0 else random_hermitian(rng, d)
        v = random_hermitian(rng, d)
        etas = spectral_shift_functions(h, v, 4)
        ok2 &= abs(etas[0].total_integral() - float(np.trace(v).real)) <= 1e-10 * max(
            1.0, abs(np.trace(v))
        )
        for k in (2, 3, 4):
            for f in (CATALOG[0], CATALOG[2]):
                rep = trace_formula_check(f, h, v, k, etas[k - 1], tolerance=1e-7)
                ok3 &= rep.passed
        lo, hi = etas[0].support_hull
        outside = np.array([lo - 1.0, lo - 0.01, hi + 0.01, hi + 1.0])
        ok4 &= all(np.max(np.abs(eta(outside))) == 0.0 for eta in etas)
    vval = 0.8
    etas = spectral_shift_functions(np.array([[0.0]]), np.array([[vval]]), 2)
    xs = np.linspace(-0.2, 1.2, 101)
    expect = np.clip(vval - xs, 0.0, None) * (xs >= 0.0)
    ok5 = bool(np.max(np.abs(etas[1](xs) - expect)) <= 1e-12)
    dt = time.perf_counter() - t0
    ok = ok2 and ok3 and ok4 and ok5 and dt < 120.0
    _verdict(
        "ssf-pipeline",
        ok,
        f"k=1 x100 worst {worst1:.1e}; moments {ok2}; k<=4 {ok3}; hull {ok4}; "
        f"scalar {ok5}; {dt:.1f}s",
    )


def test_determinism(tmp_path):
    # identical config + seed => byte-identical reports
    import json

    from opfun.cli import main

    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "identities", "num_seeds": 1, "dims": [2, 3]}))
    outs = []
    for tag in ("r1", "r2"):
        out = tmp_path / tag
        rc = main(["identities", "--config", str(cfg), "--seed", "11", "--out", str(out)])
        assert rc == 0
        outs.append((out / "identities.csv").read_bytes())
    scfg = tmp_path / "ssf.json"
    scfg.write_text(json.dumps({"command": "ssf", "dims": [4], "k_max": 2, "num_cases": 1}))
    souts = []
    for tag in ("s1", "s2"):
        out = tmp_path / tag
        rc = main(["ssf", "--config", str(scfg), "--seed", "5", "--out", str(out)])
        assert rc == 0
        souts.append(b"".join(sorted(p.read_bytes() for p in out.iterdir())))
    ok = outs[0] == outs[1] and souts[0] == souts[1]
    _verdict("determinism", ok, f"identities {len(outs[0])} bytes, ssf bundles equal")
