"""Two-sided numerical verification of the operator-integral identities:
change of variables, expansion into bounded integrals, superscript
difference, the weighted Duhamel formula, the first-order difference
formula, the two resolvent-weighted expansions of a same-base integral, and
the trace-class decomposition with its trace bounds.

Every check evaluates both sides independently and reports residual norms;
nothing is rearranged to make a side cheaper at the cost of sharing float
paths with the other side.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

import functools

from .fourier import sup_norm
from .functions import (
    DerivativeBudgetError,
    RationalFunction,
    ScalarFunction,
    fu_power,
    standard_catalog,
)
from .linalg import (
    as_matrix,
    eigendecompose,
    matrix_function,
    operator_norm,
    random_hermitian,
    resolvent,
    schatten_norm,
    with_repeated_eigenvalue,
)
from .moi import moi_request, moi_spectral
from .quadrature import gauss_legendre

__all__ = [
    "IdentityReport",
    "check_change_of_variables",
    "check_bounded_expansion",
    "check_superscript_difference",
    "check_weighted_duhamel",
    "check_first_order_difference",
    "check_resolvent_expansions",
    "check_trace_class_decomposition",
    "check_second_resolvent",
    "run_identity_suite",
    "DEFAULT_TOLERANCES",
]

TINY = 1e-30

# tolerance ladder: closed-form spectral algebra at 1e-10 relative, the
# quadrature-backed Duhamel check at 1e-8 with 64 nodes
DEFAULT_TOLERANCES = {
    "second-resolvent": 1e-11,
    "change-of-variables": 1e-10,
    "bounded-expansion": 1e-10,
    "superscript-difference": 1e-10,
    "weighted-duhamel": 1e-8,
    "first-order-difference": 1e-10,
    "resolvent-expansions": 1e-10,
    "trace-class-decomposition": 1e-10,
}


@dataclass(frozen=True)
class IdentityReport:
    identity_name: str
    lhs_norm: float
    rhs_norm: float
    residual_norm: float
    relative_residual: float
    tolerance: float
    passed: bool
    metadata: dict = field(default_factory=dict)

    @staticmethod
    def from_sides(name: str, lhs: np.ndarray, rhs: np.ndarray, tolerance: float,
                   metadata: dict | None = None, noise_floor: float = 0.0) -> "IdentityReport":
        """noise_floor: absolute residual below which a comparison counts as
        trivially zero (both sides vanish up to rounding of O(1) operands)."""
        ln, rn = operator_norm(lhs), operator_norm(rhs)
        res = operator_norm(lhs - rhs)
        rel = res / max(ln, rn, TINY)
        return IdentityReport(
            identity_name=name,
            lhs_norm=ln,
            rhs_norm=rn,
            residual_norm=res,
            relative_residual=rel,
            tolerance=tolerance,
            passed=rel <= tolerance or res <= noise_floor,
            metadata=metadata or {},
        )


def _skip_on_budget(check):
    """A check whose symbol needs more derivatives than the function provides
    is recorded as skipped-with-reason (passes vacuously, reason in metadata)
    instead of erroring out of a suite."""

    @functools.wraps(check)
    def wrapped(f, *args, **kwargs):
        try:
            return check(f, *args, **kwargs)
        except DerivativeBudgetError as exc:
            meta = dict(kwargs.get("metadata") or {})
            meta["skipped"] = str(exc)
            return IdentityReport(
                identity_name=check.__name__.removeprefix("check_").replace("_", "-"),
                lhs_norm=0.0, rhs_norm=0.0, residual_norm=0.0,
                relative_residual=0.0,
                tolerance=kwargs.get("tolerance", 1.0) or 1.0,
                passed=True, metadata=meta,
            )

    return wrapped


def _decompose_all(hs):
    return [h if hasattr(h, "rep_values") else eigendecompose(h) for h in hs]


def _alpha_from_set(n: int, unbounded) -> tuple:
    unbounded = set(unbounded or ())
    return tuple(1 if j in unbounded else 0 for j in range(1, n + 1))


def _moi(f, supers, args, alpha=None):
    return moi_spectral(moi_request(f, supers, args, alpha), with_bound=False).value


@_skip_on_budget
def check_change_of_variables(f: ScalarFunction, hs, vs, j: int, unbounded=None,
                              tolerance: float = DEFAULT_TOLERANCES["change-of-variables"],
                              metadata: dict | None = None) -> IdentityReport:
    """One resolvent moved from argument slot j into the symbol.

    For interior j the j-th argument becomes V_j (H_j - i)^(-1) under the
    symbol (f u)^[n], minus the contracted integral where superscript j is
    removed and V_j (H_j - i)^(-1) V_{j+1} merges into one argument. j = 0
    and j = n attach the resolvent on the outside instead.
    """
    supers = _decompose_all(hs)
    n = len(vs)
    if not 0 <= j <= n:
        raise ValueError(f"j must lie in 0..{n}")
    alpha = _alpha_from_set(n, unbounded)
    lhs = _moi(f, supers, vs, alpha)
    fu = fu_power(f, 1)
    res = [resolvent(s, 1j) for s in supers]
    if j == 0:
        args1 = [res[0] @ vs[0]] + list(vs[1:])
        term1 = _moi(fu, supers, args1, alpha)
        if n == 1:
            term2 = res[0] @ vs[0] @ matrix_function(supers[1], f)
        else:
            inner = _moi(f, supers[1:], vs[1:], alpha[1:])
            term2 = res[0] @ vs[0] @ inner
    elif j == n:
        args1 = list(vs[:-1]) + [vs[-1] @ res[n]]
        alpha1 = alpha[:-1] + (0,)
        term1 = _moi(fu, supers, args1, alpha1)
        if n == 1:
            term2 = matrix_function(supers[0], f) @ vs[0] @ res[1]
        else:
            inner = _moi(f, supers[:-1], vs[:-1], alpha[:-1])
            term2 = inner @ vs[-1] @ res[n]
    else:
        args1 = list(vs)
        args1[j - 1] = vs[j - 1] @ res[j]
        alpha1 = list(alpha)
        alpha1[j - 1] = 0
        term1 = _moi(fu, supers, args1, alpha1)
        merged = vs[j - 1] @ res[j] @ vs[j]
        args2 = list(vs[: j - 1]) + [merged] + list(vs[j + 1 :])
        supers2 = supers[:j] + supers[j + 1 :]
        alpha2 = alpha[: j - 1] + alpha[j:]
        term2 = _moi(f, supers2, args2, alpha2)
    meta = {"n": n, "j": j, "unbounded": sorted(set(unbounded or ()))}
    meta.update(metadata or {})
    return IdentityReport.from_sides("change-of-variables", lhs, term1 - term2, tolerance, meta)


def _chain(vs, res, j, l):
    """V_{j+1} R_{j+1} ... V_l R_l (identity for l == j)."""
    d = vs[0].shape[0]
    out = np.eye(d, dtype=complex)
    for m in range(j + 1, l + 1):
        out = out @ vs[m - 1] @ res[m]
    return out


@_skip_on_budget
def check_bounded_expansion(f: ScalarFunction, hs, vs,
                            tolerance: float = DEFAULT_TOLERANCES["bounded-expansion"],
                            metadata: dict | None = None) -> IdentityReport:
    """The weighted integral as an alternating sum of bounded integrals with
    symbols (f u^p)^[p] over superscript subsets, resolvent-damped chains as
    arguments."""
    supers = _decompose_all(hs)
    n = len(vs)
    lhs = _moi(f, supers, vs, (1,) * n)
    res = [resolvent(s, 1j) for s in supers]
    rhs = np.zeros_like(lhs)
    for p in range(n + 1):
        sign = (-1.0) ** (n - p)
        for js in itertools.combinations(range(1, n + 1), p):
            tail = _chain(vs, res, js[-1] if js else 0, n)
            if p == 0:
                rhs = rhs + sign * matrix_function(supers[0], f) @ tail
                continue
            chain_supers = [supers[0]] + [supers[j] for j in js]
            prev = 0
            args = []
            for j in js:
                args.append(_chain(vs, res, prev, j))
                prev = j
            term = _moi(fu_power(f, p), chain_supers, args)
            rhs = rhs + sign * term @ tail
    meta = {"n": n}
    meta.update(metadata or {})
    return IdentityReport.from_sides("bounded-expansion", lhs, rhs, tolerance, meta)


@_skip_on_budget
def check_superscript_difference(f: ScalarFunction, hs, vs, j: int, t: float,
                                 tolerance: float = DEFAULT_TOLERANCES["superscript-difference"],
                                 metadata: dict | None = None) -> IdentityReport:
    """Perturbing superscript j by tV_j equals t times the order-(n+1)
    integral with the slot duplicated and V_j inserted."""
    n = len(vs)
    if not 1 <= j <= n:
        raise ValueError(f"j must lie in 1..{n}")
    supers = _decompose_all(hs)
    alpha = (1,) * n
    shifted = list(supers)
    shifted[j] = eigendecompose(as_matrix(hs[j]) + t * vs[j - 1])
    lhs = _moi(f, shifted, vs, alpha) - _moi(f, supers, vs, alpha)
    supers_rhs = supers[:j] + [shifted[j], supers[j]] + supers[j + 1 :]
    args_rhs = list(vs[:j]) + [vs[j - 1]] + list(vs[j:])
    rhs = t * _moi(f, supers_rhs, args_rhs, (1,) * (n + 1))
    meta = {"n": n, "j": j, "t": t}
    meta.update(metadata or {})
    return IdentityReport.from_sides("superscript-difference", lhs, rhs, tolerance, meta)


def check_weighted_duhamel(h, v, x: float, quad_nodes: int = 64,
                           tolerance: float = DEFAULT_TOLERANCES["weighted-duhamel"],
                           metadata: dict | None = None) -> IdentityReport:
    """e^{ix(H+V)}(H-i)^-1 - e^{ixH}(H-i)^-1 against the Duhamel integral,
    by Gauss-Legendre in the interleaving parameter."""
    hm, vm = as_matrix(h), as_matrix(v)
    sh, shv = eigendecompose(hm), eigendecompose(hm + vm)
    rh = resolvent(sh, 1j)

    def exp_at(s, factor):
        return s.vectors @ np.diag(np.exp(1j * factor * s.eigenvalues)) @ s.vectors.conj().T

    lhs = exp_at(shv, x) @ rh - exp_at(sh, x) @ rh
    nodes, weights = gauss_legendre(0.0, 1.0, quad_nodes)
    rhs = np.zeros_like(lhs)
    core = vm @ rh
    for s, w in zip(nodes, weights):
        rhs = rhs + w * (exp_at(shv, s * x) @ core @ exp_at(sh, (1.0 - s) * x))
    rhs = 1j * x * rhs
    meta = {"x": x, "nodes": quad_nodes}
    meta.update(metadata or {})
    floor = 1e-13 * max(1.0, operator_norm(rh))
    return IdentityReport.from_sides("weighted-duhamel", lhs, rhs, tolerance, meta,
                                     noise_floor=floor)


def check_first_order_difference(f: ScalarFunction, h, v,
                                 tolerance: float = DEFAULT_TOLERANCES["first-order-difference"],
                                 metadata: dict | None = None) -> IdentityReport:
    """f(H+V) - f(H) via the two-term resolvent-damped formula."""
    hm, vm = as_matrix(h), as_matrix(v)
    sh, shv = eigendecompose(hm), eigendecompose(hm + vm)
    rh = resolvent(sh, 1j)
    lhs = matrix_function(shv, f) - matrix_function(sh, f)
    rhs = _moi(fu_power(f, 1), [shv, sh], [vm @ rh]) - matrix_function(shv, f) @ vm @ rh
    return IdentityReport.from_sides("first-order-difference", lhs, rhs, tolerance,
                                     metadata or {})


def _compositions_positive_head(total: int, l: int):
    """(j_1..j_l, j_{l+1}) with j_1..j_l >= 1, j_{l+1} >= 0, summing to total."""
    if l == 0:
        yield (total,)
        return
    for head in itertools.product(range(1, total + 1), repeat=l):
        rest = total - sum(head)
        if rest >= 0:
            yield head + (rest,)


def _compositions_free_head(total: int, r: int):
    """(p_0..p_r) with p_0 >= 0, p_1..p_r >= 1, summing to total."""
    if r == 0:
        yield (total,)
        return
    for tail in itertools.product(range(1, total + 1), repeat=r):
        rest = total - sum(tail)
        if rest >= 0:
            yield (rest,) + tail


@_skip_on_budget
def check_resolvent_expansions(f: ScalarFunction, h, v, k: int, n: int,
                               tolerance: float = DEFAULT_TOLERANCES["resolvent-expansions"],
                               metadata: dict | None = None) -> IdentityReport:
    """Three-way agreement for the same-base integral of f^[k] with k copies
    of V: direct spectral value, the plain expansion into powers of
    Vtilde = V (H-i)^-1, and the refined expansion with n-k resolvent factors
    interleaved on the right. Residual is the worst pairwise gap."""
    if not 1 <= k <= n - 1:
        raise ValueError("need 1 <= k <= n-1")
    hm, vm = as_matrix(h), as_matrix(v)
    s = eigendecompose(hm)
    rh = resolvent(s, 1j)
    vt = vm @ rh
    d = hm.shape[0]

    direct = _moi(f, [s] * (k + 1), [vm] * k, (1,) * k)

    def vt_pow(j):
        out = np.eye(d, dtype=complex)
        for _ in range(j):
            out = out @ vt
        return out

    plain = np.zeros((d, d), dtype=complex)
    for l in range(k + 1):
        for comp in _compositions_positive_head(k, l):
            js, tail_j = comp[:-1], comp[-1]
            sign = (-1.0) ** (k - l)
            if l == 0:
                plain = plain + sign * matrix_function(s, f) @ vt_pow(tail_j)
                continue
            term = _moi(fu_power(f, l), [s] * (l + 1), [vt_pow(jm) for jm in js])
            plain = plain + sign * term @ vt_pow(tail_j)

    refined = np.zeros((d, d), dtype=complex)
    for l in range(k + 1):
        for comp in _compositions_positive_head(k, l):
            js, tail_j = comp[:-1], comp[-1]
            blocks = list(js) + [tail_j]
            for r in range(min(n - k, l) + 1):
                sign = (-1.0) ** (k - l + r)
                moi_js = blocks[: l - r]
                right_js = blocks[l - r :]
                for ps in _compositions_free_head(n - k, r):
                    tail = np.eye(d, dtype=complex)
                    for pm, jm in zip(ps, right_js):
                        tail = tail @ resolvent(s, 1j, power=pm) if pm else tail
                        tail = tail @ vt_pow(jm)
                    if l - r == 0:
                        g = fu_power(f, n - k + l - r)
                        term = matrix_function(s, g) @ tail
                    else:
                        g = fu_power(f, n - k + l - r)
                        term = _moi(g, [s] * (l - r + 1), [vt_pow(jm) for jm in moi_js]) @ tail
                    refined = refined + sign * term

    norms = [operator_norm(m) for m in (direct, plain, refined)]
    worst = max(
        operator_norm(direct - plain),
        operator_norm(direct - refined),
        operator_norm(plain - refined),
    )
    rel = worst / max(max(norms), TINY)
    meta = {
        "k": k,
        "n": n,
        "pair_residuals": {
            "direct-plain": operator_norm(direct - plain),
            "direct-refined": operator_norm(direct - refined),
            "plain-refined": operator_norm(plain - refined),
        },
    }
    meta.update(metadata or {})
    return IdentityReport(
        identity_name="resolvent-expansions",
        lhs_norm=norms[0],
        rhs_norm=max(norms[1:]),
        residual_norm=worst,
        relative_residual=rel,
        tolerance=tolerance,
        passed=rel <= tolerance,
        metadata=meta,
    )


def check_trace_class_decomposition(f: ScalarFunction, h, v, t: float, n: int,
                                    r_op=None,
                                    tolerance: float = DEFAULT_TOLERANCES["trace-class-decomposition"],
                                    metadata: dict | None = None) -> IdentityReport:
    """First-order integral of W at H^t = H + R + tW split into a trace-bounded
    integral plus n boundary products, with both displayed trace estimates
    evaluated (margins recorded in metadata).

    (R, W) defaults to (0, V); passing r_op realizes (R, W) = (R, V - R).
    """
    hm, vm = as_matrix(h), as_matrix(v)
    if r_op is None:
        rm, wm = np.zeros_like(hm), vm
    else:
        rm = as_matrix(r_op)
        wm = vm - rm
    st = eigendecompose(hm + rm + t * wm)
    rt = resolvent(st, 1j)
    lhs = _moi(f, [st, st], [wm], (1,))
    rtn = resolvent(st, 1j, power=n)
    term1 = _moi(fu_power(f, n), [st, st], [wm @ rtn])
    boundary = np.zeros_like(lhs)
    for kk in range(n):
        boundary = boundary + matrix_function(st, fu_power(f, kk)) @ wm @ resolvent(st, 1j, power=kk + 1)
    rhs = term1 - boundary
    w_rtn_1 = schatten_norm(wm @ rtn, 1.0)
    bound1 = sup_norm(f, deriv=1, u_power=n) * w_rtn_1
    bound2 = n * sup_norm(f, deriv=0, u_power=n - 1) * w_rtn_1
    tr1 = abs(np.trace(term1))
    tr2 = abs(np.trace(boundary))
    meta = {
        "n": n,
        "t": t,
        "trace_bound_rows": [
            {"part": "weighted-integral", "abs_trace": float(tr1), "bound": float(bound1),
             "margin": float(bound1 - tr1), "pass": tr1 <= bound1 * (1 + 1e-9)},
            {"part": "boundary-sum", "abs_trace": float(tr2), "bound": float(bound2),
             "margin": float(bound2 - tr2), "pass": tr2 <= bound2 * (1 + 1e-9)},
        ],
    }
    meta.update(metadata or {})
    rep = IdentityReport.from_sides("trace-class-decomposition", lhs, rhs, tolerance, meta)
    return rep


def check_second_resolvent(h, v, z: complex,
                           tolerance: float = DEFAULT_TOLERANCES["second-resolvent"],
                           metadata: dict | None = None) -> IdentityReport:
    """(H+V-z)^-1 - (H-z)^-1 = -(H+V-z)^-1 V (H-z)^-1."""
    hm, vm = as_matrix(h), as_matrix(v)
    sh, shv = eigendecompose(hm), eigendecompose(hm + vm)
    lhs = resolvent(shv, z) - resolvent(sh, z)
    rhs = -resolvent(shv, z) @ vm @ resolvent(sh, z)
    meta = {"z": repr(z)}
    meta.update(metadata or {})
    return IdentityReport.from_sides("second-resolvent", lhs, rhs, tolerance, meta)


# ---------------------------------------------------------------------------
# randomized suite
# ---------------------------------------------------------------------------

QCLASS_RATIONAL = RationalFunction([(1.0, 2.0j, 5)])


def _suite_functions():
    return standard_catalog()


def run_identity_suite(seeds, dims, functions=None, tolerances=None,
                       include_degenerate: bool = True, progress=None) -> list:
    """The randomized identity suite: every check over seeds x dims x catalog.

    Degenerate variants reuse each (seed, dim >= 2) with an exactly repeated
    eigenvalue in H. Reports come back in deterministic order.
    """
    functions = list(functions) if functions is not None else list(_suite_functions())
    tol = dict(DEFAULT_TOLERANCES)
    tol.update(tolerances or {})
    reports = []
    for seed in seeds:
        for dim in dims:
            rng = np.random.default_rng(np.random.SeedSequence([17, seed, dim]))
            variants = [("generic", random_hermitian(rng, dim))]
            if include_degenerate and dim >= 2:
                variants.append(("degenerate", with_repeated_eigenvalue(rng, dim)))
            hs_pool = [random_hermitian(rng, dim) for _ in range(4)]
            vs_pool = [random_hermitian(rng, dim) for _ in range(4)]
            z = complex(rng.normal(), rng.normal() + 1.2)
            for tag, h0 in variants:
                base_meta = {"seed": seed, "dim": dim, "variant": tag}
                v0 = vs_pool[0]
                reports.append(check_second_resolvent(
                    h0, v0, z, tol["second-resolvent"], metadata=base_meta))
                reports.append(check_weighted_duhamel(
                    h0, 0.5 * v0, 2.0, 64, tol["weighted-duhamel"], metadata=base_meta))
                for f in functions:
                    fmeta = dict(base_meta, f=f.descriptor())
                    for n in (1, 2):
                        hs = [h0] + hs_pool[:n]
                        vs = vs_pool[:n]
                        for j in range(0, n + 1):
                            unb = set(range(1, n + 1)) if j % 2 == 0 else {min(j, n) or 1}
                            reports.append(check_change_of_variables(
                                f, hs, vs, j, unb, tol["change-of-variables"],
                                metadata=dict(fmeta, n=n)))
                        reports.append(check_bounded_expansion(
                            f, hs, vs, tol["bounded-expansion"], metadata=dict(fmeta, n=n)))
                        for j in range(1, n + 1):
                            reports.append(check_superscript_difference(
                                f, hs, vs, j, 0.3 if j == 1 else -0.5,
                                tol["superscript-difference"], metadata=dict(fmeta, n=n)))
                    if dim <= 3:
                        hs = [h0] + hs_pool[:3]
                        reports.append(check_bounded_expansion(
                            f, hs, vs_pool[:3], tol["bounded-expansion"],
                            metadata=dict(fmeta, n=3)))
                    reports.append(check_first_order_difference(
                        f, h0, 0.7 * v0, tol["first-order-difference"], metadata=fmeta))
                for f, kk, nn in ((QCLASS_RATIONAL, 1, 2), (QCLASS_RATIONAL, 2, 3),
                                  (functions[2] if len(functions) > 2 else QCLASS_RATIONAL, 1, 3)):
                    reports.append(check_resolvent_expansions(
                        f, h0, vs_pool[1], kk, nn, tol["resolvent-expansions"],
                        metadata=dict(base_meta, f=f.descriptor())))
                reports.append(check_trace_class_decomposition(
                    QCLASS_RATIONAL, h0, vs_pool[2], 0.7, 2,
                    tolerance=tol["trace-class-decomposition"],
                    metadata=dict(base_meta, f=QCLASS_RATIONAL.descriptor())))
                if progress is not None:
                    progress(seed, dim, tag, len(reports))
    return reports
