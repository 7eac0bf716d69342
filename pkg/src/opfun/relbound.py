"""Relative-bound certificates and Schatten diagnostics for a Hermitian pair.

The quadratic-form certificate ||V psi||^2 <= a^2 ||H psi||^2 + b^2 ||psi||^2
is checkable by a single Hermitian eigensolve and implies the linear form
||V psi|| <= a ||H psi|| + b ||psi|| with the same constants (via
sqrt(x^2 + y^2) <= x + y); it is strictly sufficient, never claimed minimal.
In finite dimensions the infimal linear-form constant a is always 0, so a is
treated as a user-chosen experiment parameter throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import as_matrix, eigendecompose, operator_norm, resolvent, schatten_norm

__all__ = [
    "RelativeBoundCertificate",
    "certify",
    "rel_norm",
    "shift_bound_check",
    "HypothesisReport",
    "hypothesis_report",
]


@dataclass(frozen=True)
class RelativeBoundCertificate:
    a: float
    b: float
    form: str = "quadratic"

    def check(self, h, v, tol: float = 1e-10) -> float:
        """Most negative eigenvalue of a^2 H^2 + b^2 I - V*V (>= -tol*scale)."""
        hm, vm = as_matrix(h), as_matrix(v)
        m = self.a**2 * hm @ hm + self.b**2 * np.eye(hm.shape[0]) - vm.conj().T @ vm
        lo = float(np.min(np.linalg.eigvalsh(m)))
        scale = max(1.0, operator_norm(hm) ** 2, operator_norm(vm) ** 2)
        if lo < -tol * scale:
            raise ValueError(
                f"certificate (a={self.a}, b={self.b}) violated: "
                f"lowest eigenvalue {lo:.3e} < {-tol * scale:.3e}"
            )
        return lo


def certify(h, v, a: float = 0.0) -> RelativeBoundCertificate:
    """Minimal b for the quadratic-form certificate at the given a."""
    if a < 0:
        raise ValueError("a must be nonnegative")
    hm, vm = as_matrix(h), as_matrix(v)
    if hm.shape != vm.shape:
        raise ValueError(f"dimension mismatch: {hm.shape} vs {vm.shape}")
    m = vm.conj().T @ vm - a**2 * hm @ hm
    b2 = max(0.0, float(np.max(np.linalg.eigvalsh(m))))
    return RelativeBoundCertificate(a=float(a), b=math.sqrt(b2))


def rel_norm(h, v) -> float:
    """||V (H - i)^(-1)||."""
    s = eigendecompose(h)
    return operator_norm(as_matrix(v) @ resolvent(s, 1j))


def shift_bound_check(h, v, certificate: RelativeBoundCertificate, t_grid, slack: float = 1e-10) -> list:
    """Rows (t, lhs, rhs, margin, pass) for ||V (H + tV - i)^(-1)|| <= (a+b)/(1-|t|a).

    Every t must satisfy |t| < 1/a (1/a = inf when a = 0).
    """
    hm, vm = as_matrix(h), as_matrix(v)
    a, b = certificate.a, certificate.b
    rows = []
    for t in t_grid:
        t = float(t)
        if a > 0 and abs(t) >= 1.0 / a:
            raise ValueError(f"t = {t} outside the admissible interval (-1/a, 1/a)")
        st = eigendecompose(hm + t * vm)
        lhs = operator_norm(vm @ resolvent(st, 1j))
        rhs = (a + b) / (1.0 - abs(t) * a)
        rows.append({"t": t, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs,
                     "pass": lhs <= rhs + slack})
    return rows


@dataclass(frozen=True)
class HypothesisReport:
    """Schatten table ||V (H - i)^(-p)||_{n/p} for p = 1..n, its maximum alpha,
    the backing certificate, and the resolvent-shift inequality rows
    ||V (H + tV - i)^(-p)||_{n/p} <= 2^p (1+b)/(1-a) alpha max(1, alpha^(p-1))
    evaluated at the requested t values."""

    n: int
    schatten_table: tuple  # (p, n/p, value)
    alpha: float
    certificate: RelativeBoundCertificate
    shift_rows: tuple  # dict rows (t, p, lhs, rhs, margin, pass)

    def all_pass(self) -> bool:
        return all(r["pass"] for r in self.shift_rows)


def _schatten_table(h, v, n: int) -> list:
    s = eigendecompose(h)
    vm = as_matrix(v)
    rows = []
    for p in range(1, n + 1):
        val = schatten_norm(vm @ resolvent(s, 1j, power=p), n / p)
        rows.append((p, n / p, val))
    return rows


def hypothesis_report(h, v, n: int, a: float = 0.0,
                      t_values=(0.0, 0.5, 1.0), slack: float = 1e-10) -> HypothesisReport:
    """Summability diagnostics for the pair (H, V) at summability order n >= 2.

    The inequality rows take the unperturbed pair (R, W) = (0, V), i.e.
    H^t = H + tV; a must satisfy a < 1 for the right-hand sides to make sense.
    """
    if n < 2:
        raise ValueError("summability order n must be >= 2")
    if not 0.0 <= a < 1.0:
        raise ValueError("need 0 <= a < 1")
    hm, vm = as_matrix(h), as_matrix(v)
    cert = certify(hm, vm, a)
    table = _schatten_table(hm, vm, n)
    alpha = max((val for _, _, val in table), default=0.0)
    rows = []
    for t in t_values:
        st = eigendecompose(hm + float(t) * vm)
        for p in range(1, n + 1):
            lhs = schatten_norm(vm @ resolvent(st, 1j, power=p), n / p)
            rhs = (2.0**p) * (1.0 + cert.b) / (1.0 - cert.a) * alpha * max(1.0, alpha ** (p - 1))
            rows.append({"t": float(t), "p": p, "lhs": lhs, "rhs": rhs,
                         "margin": rhs - lhs, "pass": lhs <= rhs + slack})
    return HypothesisReport(
        n=n,
        schatten_table=tuple(table),
        alpha=float(alpha),
        certificate=cert,
        shift_rows=tuple(rows),
    )
