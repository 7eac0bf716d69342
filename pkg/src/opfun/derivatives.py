"""Higher-order directional derivatives of t -> f(H + tV), their
finite-difference oracle, and Taylor expansions with certified remainders.

The n-th derivative at t0 equals n! times the multiple operator integral of
f^[n] with every superscript H + t0 V and every argument V; the order-n
Taylor remainder equals the same integral with the first superscript moved to
H + V. Both are computed as they stand (no telescoping shortcut), so the
remainder identity stays a genuine two-route check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fourier import TaylorConstants, taylor_constants
from .functions import ScalarFunction
from .linalg import as_matrix, eigendecompose, matrix_function, operator_norm, resolvent
from .moi import MoiResult, moi_request, moi_spectral

__all__ = [
    "DerivativeResult",
    "gateaux_derivative",
    "fd_derivative",
    "TaylorReport",
    "taylor_report",
]


@dataclass(frozen=True)
class DerivativeResult:
    order: int
    at_point: float
    value: np.ndarray  # d^n/dt^n f(H + tV), including the n! factor
    moi: MoiResult
    fd_value: np.ndarray | None = None
    fd_error: float | None = None

    @property
    def fd_reliable(self) -> bool | None:
        """False flags an extrapolation error above 1e-4 * scale (oracle unusable)."""
        if self.fd_error is None:
            return None
        return self.fd_error <= 1e-4 * max(1.0, operator_norm(self.value))


def gateaux_derivative(f: ScalarFunction, h, v, n: int, t0: float = 0.0,
                       with_fd: bool = False, with_bound: bool = False) -> DerivativeResult:
    """d^n/dt^n f(H + tV) at t = t0 via the spectral multiple operator integral."""
    if n < 1:
        raise ValueError("derivative order must be >= 1")
    hm, vm = as_matrix(h), as_matrix(v)
    base = eigendecompose(hm + t0 * vm)
    res = moi_spectral(
        moi_request(f, [base] * (n + 1), [vm] * n), with_bound=with_bound
    )
    value = math.factorial(n) * res.value
    fd_val, fd_err = (None, None)
    if with_fd:
        fd_val, fd_err = fd_derivative(f, hm, vm, n, t0)
    return DerivativeResult(order=n, at_point=float(t0), value=value, moi=res,
                            fd_value=fd_val, fd_error=fd_err)


def _central_stencil(f, hm, vm, n, t0, step):
    acc = np.zeros(hm.shape, dtype=complex)
    for j in range(n + 1):
        t = t0 + (n / 2.0 - j) * step
        acc += (-1.0) ** j * math.comb(n, j) * matrix_function(eigendecompose(hm + t * vm), f)
    return acc / step**n


def fd_derivative(f: ScalarFunction, h, v, n: int, t0: float = 0.0,
                  h0: float | None = None, levels: int = 3):
    """(value, error_estimate) by central differences with Richardson extrapolation.

    Central stencils have even error expansions, so each Richardson level
    cancels one h^2 power; the error estimate is the last extrapolation
    increment. Estimates above 1e-4 * scale mean the oracle is unreliable
    for this configuration (callers decide what to do).
    """
    if n < 1 or n > 4:
        raise ValueError("finite differences supported for orders 1..4")
    hm, vm = as_matrix(h), as_matrix(v)
    if h0 is None:
        h0 = 1e-2 * (operator_norm(hm) + 1.0) / (operator_norm(vm) + 1.0)
    table = [[_central_stencil(f, hm, vm, n, t0, h0 / 2**i)] for i in range(levels)]
    for j in range(1, levels):
        for i in range(j, levels):
            coarse, fine = table[i - 1][j - 1], table[i][j - 1]
            table[i].append((4.0**j * fine - coarse) / (4.0**j - 1.0))
    best = table[levels - 1][levels - 1]
    prev = table[levels - 1][levels - 2] if levels >= 2 else table[levels - 1][0]
    err = float(operator_norm(best - prev))
    return best, err


@dataclass(frozen=True)
class TaylorReport:
    """One expansion order: partial sum through order n-1, the remainder by
    direct subtraction and by the shifted-superscript integral, the certified
    bound c_f (1 + C_f)^n r^n with r = ||V (H-i)^-1||, and the contraction
    (1 + C_f) r that governs convergence."""

    order: int
    partial_sum: np.ndarray
    remainder_direct: np.ndarray
    remainder_moi: np.ndarray
    bound: float
    contraction: float
    scale: float

    @property
    def remainder_norm(self) -> float:
        return operator_norm(self.remainder_direct)

    @property
    def route_gap(self) -> float:
        return operator_norm(self.remainder_direct - self.remainder_moi)

    def consistent(self, tol: float = 1e-10) -> bool:
        return self.route_gap <= tol * self.scale

    def within_bound(self, slack: float = 1e-9) -> bool:
        return self.remainder_norm <= self.bound * (1.0 + slack)


def taylor_report(f: ScalarFunction, h, v, n_max: int,
                  constants: TaylorConstants | None = None,
                  stop_below: float | None = None) -> list:
    """Taylor expansion diagnostics for orders 1..n_max.

    Stops early once the remainder norm falls below stop_below * scale (the
    reports list then ends at that order). scale is the size of the data the
    subtraction route works at: max(1, ||f(H+V)||, max_k ||T_k||).
    """
    hm, vm = as_matrix(h), as_matrix(v)
    if constants is None:
        constants = taylor_constants(f)
    sh = eigendecompose(hm)
    shv = eigendecompose(hm + vm)
    target = matrix_function(shv, f)
    r = operator_norm(vm @ resolvent(sh, 1j))
    contraction = (1.0 + constants.C_f) * r
    partial = matrix_function(sh, f)
    scale = max(1.0, operator_norm(target), operator_norm(partial))
    reports = []
    for n in range(1, n_max + 1):
        rem_direct = target - partial
        rem_moi = moi_spectral(
            moi_request(f, [shv] + [sh] * n, [vm] * n), with_bound=False
        ).value
        bound = constants.c_f * (1.0 + constants.C_f) ** n * r**n
        reports.append(
            TaylorReport(
                order=n,
                partial_sum=partial,
                remainder_direct=rem_direct,
                remainder_moi=rem_moi,
                bound=bound,
                contraction=contraction,
                scale=scale,
            )
        )
        if stop_below is not None and reports[-1].remainder_norm < stop_below * scale:
            break
        if n < n_max:
            term = moi_spectral(
                moi_request(f, [sh] * (n + 1), [vm] * n), with_bound=False
            ).value
            partial = partial + term
            scale = max(scale, operator_norm(term), operator_norm(partial))
    return reports
