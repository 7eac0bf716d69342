"""Scalar function catalog with exact closed-form derivatives of every order
the engine needs, plus confluent-safe divided differences.

Catalog kinds: bounded rationals (poles off the real axis, optional constant
part), modulated Gaussians, compactly supported polynomial bumps, polynomials,
and finite products of those. Every derivative used anywhere downstream is
analytic, never a finite difference, so identity residuals isolate
linear-algebra rounding.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "ScalarFunction",
    "DerivativeBudgetError",
    "RationalFunction",
    "GaussianFunction",
    "PolynomialFunction",
    "BumpFunction",
    "ProductFunction",
    "u_polynomial",
    "fu_power",
    "shifted_u_power",
    "divided_difference",
    "divided_difference_tensor",
    "merge_close_values",
    "derivative_selftest",
    "function_from_config",
]

CONFLUENCE_TOL_FACTOR = 1e-7  # times node scale; see divided_difference


class DerivativeBudgetError(ValueError):
    """A confluent evaluation needs more derivatives than the function provides."""


class ScalarFunction:
    """A scalar function f with exact derivative evaluators f^(l).

    Subclasses provide vectorized `value` and `deriv`; `max_deriv_order` is
    None when derivatives of every order exist in closed form.
    """

    kind = "abstract"
    max_deriv_order: int | None = None

    def value(self, x):
        return self.deriv(x, 0)

    def deriv(self, x, order: int):
        raise NotImplementedError

    def __call__(self, x):
        return self.value(x)

    @property
    def is_real(self) -> bool:
        return False

    def descriptor(self) -> str:
        """Stable string key identifying the function and its parameters."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.descriptor()}>"

    def __hash__(self):
        return hash(self.descriptor())

    def __eq__(self, other):
        return isinstance(other, ScalarFunction) and self.descriptor() == other.descriptor()

    def _check_order(self, order: int):
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        if self.max_deriv_order is not None and order > self.max_deriv_order:
            raise ValueError(
                f"{self.descriptor()} provides derivatives up to order "
                f"{self.max_deriv_order}, requested {order}"
            )


def _rising(m: int, l: int) -> float:
    """m (m+1) ... (m+l-1)."""
    out = 1.0
    for j in range(l):
        out *= m + j
    return out


class RationalFunction(ScalarFunction):
    """const + sum_k c_k (x - w_k)^(-m_k) with Im w_k != 0.

    Bounded on the real line; this is the closed-under-differentiation family
    the engine leans on for exact large-order work.
    """

    kind = "rational"

    def __init__(self, terms, const: complex = 0.0):
        cleaned = []
        for coef, pole, mult in terms:
            pole = complex(pole)
            if pole.imag == 0.0:
                raise ValueError(f"rational pole {pole!r} lies on the real axis")
            if int(mult) < 1:
                raise ValueError("pole multiplicity must be >= 1")
            cleaned.append((complex(coef), pole, int(mult)))
        self.terms = tuple(cleaned)
        self.const = complex(const)

    def deriv(self, x, order: int):
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        if order == 0:
            out += self.const
        sign = (-1.0) ** order
        for coef, pole, mult in self.terms:
            out += coef * sign * _rising(mult, order) * (x - pole) ** (-(mult + order))
        return out

    @property
    def is_real(self) -> bool:
        if abs(self.const.imag) > 0:
            return False
        pool = list(self.terms)
        while pool:
            c, w, m = pool.pop()
            for i, (c2, w2, m2) in enumerate(pool):
                if m2 == m and abs(w2 - w.conjugate()) < 1e-14 and abs(c2 - c.conjugate()) < 1e-14:
                    pool.pop(i)
                    break
            else:
                return False
        return True

    def descriptor(self) -> str:
        ts = ",".join(f"({c!r})*(x-({w!r}))^-{m}" for c, w, m in self.terms)
        return f"rational[{self.const!r}+{ts}]"

    def scale_hint(self) -> float:
        """Characteristic x-scale: pole moduli and inverse imaginary parts."""
        if not self.terms:
            return 1.0
        return max(max(abs(w), 1.0 / abs(w.imag)) for _, w, _ in self.terms)


class GaussianFunction(ScalarFunction):
    """f(x) = exp(i xi x) exp(-c x^2), c > 0."""

    kind = "gaussian"

    def __init__(self, c: float = 1.0, xi: float = 0.0):
        if not c > 0:
            raise ValueError("gaussian width parameter c must be positive")
        self.c = float(c)
        self.xi = float(xi)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(1j * self.xi * x - self.c * x * x)

    def deriv(self, x, order: int):
        # f' = (i xi - 2 c x) f, so D^(l+1) f = (i xi - 2 c x) D^l f - 2 c l D^(l-1) f
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        f0 = self.value(x)
        if order == 0:
            return f0
        g = 1j * self.xi - 2.0 * self.c * x
        prev, cur = np.zeros_like(f0), f0
        for l in range(order):
            prev, cur = cur, g * cur - 2.0 * self.c * l * prev
        return cur

    @property
    def is_real(self) -> bool:
        return self.xi == 0.0

    def descriptor(self) -> str:
        return f"gaussian[c={self.c!r},xi={self.xi!r}]"

    def scale_hint(self) -> float:
        return 1.0 / math.sqrt(self.c) + abs(self.xi)


class PolynomialFunction(ScalarFunction):
    """Polynomial with (possibly complex) coefficients, ascending powers."""

    kind = "polynomial"

    def __init__(self, coeffs):
        c = np.atleast_1d(np.asarray(coeffs, dtype=complex))
        while c.size > 1 and c[-1] == 0:
            c = c[:-1]
        self.coeffs = c

    @property
    def degree(self) -> int:
        return self.coeffs.size - 1

    def deriv(self, x, order: int):
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        c = self.coeffs
        for _ in range(order):
            c = c[1:] * np.arange(1, c.size)
            if c.size == 0:
                return np.zeros(x.shape, dtype=complex)
        out = np.zeros(x.shape, dtype=complex)
        for ck in c[::-1]:
            out = out * x + ck
        return out

    @property
    def is_real(self) -> bool:
        return bool(np.all(np.abs(self.coeffs.imag) == 0))

    def descriptor(self) -> str:
        return f"poly[{','.join(repr(c) for c in self.coeffs)}]"

    def scale_hint(self) -> float:
        return 1.0


class BumpFunction(ScalarFunction):
    """Compactly supported bump ((1 - y^2)_+)^s with y = (x-center)/halfwidth.

    C^(s-1) on the whole line; derivative budget is s-1 because the s-th
    derivative jumps at the support boundary.
    """

    kind = "bump"

    def __init__(self, center: float = 0.0, halfwidth: float = 1.0, smoothness: int = 4):
        if halfwidth <= 0:
            raise ValueError("halfwidth must be positive")
        if smoothness < 1:
            raise ValueError("smoothness must be >= 1")
        self.center = float(center)
        self.halfwidth = float(halfwidth)
        self.smoothness = int(smoothness)
        self.max_deriv_order = self.smoothness - 1
        base = np.polynomial.Polynomial([1.0, 0.0, -1.0]) ** self.smoothness
        self._dpolys = [base]
        for _ in range(self.max_deriv_order):
            self._dpolys.append(self._dpolys[-1].deriv())

    def deriv(self, x, order: int):
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        y = (x - self.center) / self.halfwidth
        inside = np.abs(y) < 1.0
        out = np.zeros(x.shape, dtype=complex)
        if np.any(inside):
            out[inside] = self._dpolys[order](y[inside]) / self.halfwidth**order
        return out

    @property
    def is_real(self) -> bool:
        return True

    def descriptor(self) -> str:
        return f"bump[c={self.center!r},h={self.halfwidth!r},s={self.smoothness}]"

    def scale_hint(self) -> float:
        return abs(self.center) + self.halfwidth


class ProductFunction(ScalarFunction):
    """Pointwise product of catalog functions; derivatives via the Leibniz rule."""

    kind = "product"

    def __init__(self, factors):
        factors = tuple(factors)
        if len(factors) < 1:
            raise ValueError("product needs at least one factor")
        self.factors = factors
        budgets = [f.max_deriv_order for f in factors if f.max_deriv_order is not None]
        self.max_deriv_order = min(budgets) if budgets else None

    def deriv(self, x, order: int):
        self._check_order(order)
        x = np.asarray(x, dtype=float)
        # fold factors pairwise: rows[l] = (f1...fk)^(l)
        rows = [self.factors[0].deriv(x, l) for l in range(order + 1)]
        for fac in self.factors[1:]:
            frows = [fac.deriv(x, l) for l in range(order + 1)]
            rows = [
                sum(math.comb(l, j) * rows[j] * frows[l - j] for j in range(l + 1))
                for l in range(order + 1)
            ]
        return rows[order]

    @property
    def is_real(self) -> bool:
        return all(f.is_real for f in self.factors)

    def descriptor(self) -> str:
        return "prod[" + "*".join(f.descriptor() for f in self.factors) + "]"

    def scale_hint(self) -> float:
        return max(f.scale_hint() for f in self.factors)


def u_polynomial(p: int) -> PolynomialFunction:
    """(x - i)^p as a polynomial."""
    c = np.zeros(p + 1, dtype=complex)
    for k in range(p + 1):
        c[k] = math.comb(p, k) * (-1j) ** (p - k)
    return PolynomialFunction(c)


def fu_power(f: ScalarFunction, p: int) -> ScalarFunction:
    """f(x) * (x - i)^p with exact derivatives."""
    if p == 0:
        return f
    if isinstance(f, PolynomialFunction):
        conv = np.convolve(f.coeffs, u_polynomial(p).coeffs)
        return PolynomialFunction(conv)
    return ProductFunction([f, u_polynomial(p)])


def shifted_u_power(w: complex, m: int, coef: complex = 1.0) -> RationalFunction:
    """coef * (x - w)^(-m)."""
    return RationalFunction([(coef, w, m)])


# ---------------------------------------------------------------------------
# divided differences
# ---------------------------------------------------------------------------


def _confluence_groups(nodes_sorted: np.ndarray, tau: float) -> list:
    groups = [[0]]
    for i in range(1, nodes_sorted.size):
        if nodes_sorted[i] - nodes_sorted[i - 1] <= tau:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def divided_difference(f: ScalarFunction, nodes, tau_conf: float | None = None) -> complex:
    """Divided difference f[x_0, ..., x_n], confluent-safe.

    Nodes are canonically sorted (the divided difference is symmetric, and
    sorting makes the float result permutation-invariant exactly). Nodes equal
    within tau_conf (default 1e-7 * node scale, transitive closure) form a
    confluence group evaluated through a Hermite-type table with exact
    derivatives, so f[x,...,x] = f^(n)(x)/n!.
    """
    nodes = np.sort(np.asarray(nodes, dtype=float))
    n = nodes.size - 1
    if n < 0:
        raise ValueError("need at least one node")
    scale = max(1.0, float(np.max(np.abs(nodes))))
    if tau_conf is None:
        tau_conf = CONFLUENCE_TOL_FACTOR * scale
    groups = _confluence_groups(nodes, tau_conf)
    z = np.empty(n + 1)
    for g in groups:
        vals = nodes[g]
        rep = vals[0] if vals[0] == vals[-1] else float(np.mean(vals))
        z[g] = rep
    max_mult = max(len(g) for g in groups)
    if f.max_deriv_order is not None and max_mult - 1 > f.max_deriv_order:
        raise DerivativeBudgetError(
            f"confluent divided difference needs derivative order {max_mult - 1}, "
            f"but {f.descriptor()} only provides {f.max_deriv_order}"
        )
    # Hermite-confluent Newton table, one column at a time
    col = np.asarray(f.value(z), dtype=complex)
    fact = 1.0
    for order in range(1, n + 1):
        fact *= order
        new = np.empty(n + 1 - order, dtype=complex)
        denom = z[order:] - z[: n + 1 - order]
        conf = denom == 0.0
        if np.any(conf):
            new[conf] = f.deriv(z[: n + 1 - order][conf], order) / fact
        ok = ~conf
        if np.any(ok):
            new[ok] = (col[1:][ok] - col[:-1][ok]) / denom[ok]
        col = new
    return complex(col[0])


def merge_close_values(axes, tau: float) -> list:
    """Snap values appearing across several node axes to shared representatives.

    Values within tau of each other (transitive closure over the global sorted
    list) are replaced by their group mean; exactly repeated values stay exact.
    Returns new axes; needed so tensorized divided differences can detect
    confluence by exact float equality.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    allvals = np.concatenate(axes)
    if allvals.size == 0:
        return axes
    order = np.argsort(allvals, kind="stable")
    svals = allvals[order]
    groups = _confluence_groups(svals, tau)
    snapped = np.empty_like(svals)
    for g in groups:
        vals = svals[g]
        snapped[g] = vals[0] if vals[0] == vals[-1] else float(np.mean(vals))
    merged = np.empty_like(allvals)
    merged[order] = snapped
    out, pos = [], 0
    for a in axes:
        out.append(merged[pos : pos + a.size])
        pos += a.size
    return out


def divided_difference_tensor(f: ScalarFunction, axes, assume_snapped: bool = False) -> np.ndarray:
    """Tensor of divided differences f[x_0, ..., x_n] over a grid of node axes.

    axes is a list of n+1 1-D real arrays; the result has shape
    (len(axes[0]), ..., len(axes[n])) with entry f[axes[0][i0], ...].
    Node values that coincide must be exactly equal floats (pre-merge with
    merge_close_values); equal blocks route through exact derivatives.
    """
    axes = [np.asarray(a, dtype=float) for a in axes]
    if not assume_snapped:
        scale = max(1.0, max(float(np.max(np.abs(a))) for a in axes if a.size))
        axes = merge_close_values(axes, CONFLUENCE_TOL_FACTOR * scale)
    n = len(axes) - 1
    shape = tuple(a.size for a in axes)
    grids = np.meshgrid(*axes, indexing="ij")
    z = np.sort(np.stack(grids, axis=-1), axis=-1)  # (..., n+1), sorted per tuple
    cols = np.asarray(f.value(z.reshape(-1, n + 1)), dtype=complex).reshape(z.shape)
    # cols[..., j] = f[z_j, ..., z_{j+order}] as the recursion advances
    fact = 1.0
    for order in range(1, n + 1):
        fact *= order
        denom = z[..., order:] - z[..., : n + 1 - order]
        conf = denom == 0.0
        quot = np.empty_like(cols[..., : n + 1 - order])
        ok = ~conf
        np.subtract(cols[..., 1:], cols[..., :-1], out=quot)
        with np.errstate(divide="ignore", invalid="ignore"):
            quot = np.where(conf, 0.0, quot / np.where(conf, 1.0, denom))
        if np.any(conf):
            if f.max_deriv_order is not None and order > f.max_deriv_order:
                raise DerivativeBudgetError(
                    f"confluent tuples need derivative order {order}, "
                    f"but {f.descriptor()} only provides {f.max_deriv_order}"
                )
            pts = z[..., : n + 1 - order][conf]
            quot[conf] = f.deriv(pts, order) / fact
        cols = quot
    return cols[..., 0].reshape(shape)


def derivative_selftest(f: ScalarFunction, rng: np.random.Generator, npoints: int = 100,
                        span: float = 3.0, rel_tol: float = 1e-6) -> float:
    """Check f' against central differences of f at random points.

    Returns the worst relative deviation; raises if it exceeds rel_tol.
    """
    x = rng.uniform(-span, span, npoints)
    h = 1e-6 * max(1.0, span)
    fd = (f.value(x + h) - f.value(x - h)) / (2 * h)
    an = f.deriv(x, 1)
    ref = np.maximum(np.abs(an), np.max(np.abs(an)) * 1e-3 + 1e-12)
    worst = float(np.max(np.abs(fd - an) / ref))
    if worst > rel_tol:
        raise AssertionError(f"derivative self-test failed for {f.descriptor()}: {worst:.2e}")
    return worst


# ---------------------------------------------------------------------------
# config-file grammar
# ---------------------------------------------------------------------------


def function_from_config(spec: dict) -> ScalarFunction:
    """Build a catalog function from its config-file description.

    Grammar:
      {"kind": "rational", "poles": [{"re":0,"im":2,"mult":1,"coef_re":1,"coef_im":0}], "const": 0}
      {"kind": "gaussian", "c": 1.0, "xi": 0.0}
      {"kind": "polynomial", "coeffs": [0, 1]}
      {"kind": "bump", "center": 0.0, "halfwidth": 1.0, "smoothness": 4}
      {"kind": "product", "factors": [ ... ]}
    """
    if not isinstance(spec, dict) or "kind" not in spec:
        raise ValueError(f"function spec must be an object with a 'kind': {spec!r}")
    kind = spec["kind"]
    known = {
        "rational": {"kind", "poles", "const"},
        "gaussian": {"kind", "c", "xi"},
        "polynomial": {"kind", "coeffs"},
        "bump": {"kind", "center", "halfwidth", "smoothness"},
        "product": {"kind", "factors"},
    }
    if kind not in known:
        raise ValueError(f"unknown function kind {kind!r}")
    extra = set(spec) - known[kind]
    if extra:
        raise ValueError(f"unknown keys {sorted(extra)} in {kind!r} function spec")
    if kind == "rational":
        terms = []
        for pole in spec.get("poles", []):
            bad = set(pole) - {"re", "im", "mult", "coef_re", "coef_im"}
            if bad:
                raise ValueError(f"unknown keys {sorted(bad)} in pole spec")
            w = complex(pole.get("re", 0.0), pole["im"])
            coef = complex(pole.get("coef_re", 1.0), pole.get("coef_im", 0.0))
            terms.append((coef, w, pole.get("mult", 1)))
        return RationalFunction(terms, const=spec.get("const", 0.0))
    if kind == "gaussian":
        return GaussianFunction(c=spec.get("c", 1.0), xi=spec.get("xi", 0.0))
    if kind == "polynomial":
        return PolynomialFunction(spec["coeffs"])
    if kind == "bump":
        return BumpFunction(
            center=spec.get("center", 0.0),
            halfwidth=spec.get("halfwidth", 1.0),
            smoothness=spec.get("smoothness", 4),
        )
    return ProductFunction([function_from_config(s) for s in spec["factors"]])


@lru_cache(maxsize=None)
def standard_catalog() -> tuple:
    """The default function set used by randomized suites."""
    return (
        RationalFunction([(1.0, 2.0j, 1)]),
        RationalFunction([(1.0, 1.0 + 1.5j, 1), (1.0, 1.0 - 1.5j, 1)]),
        GaussianFunction(c=1.0, xi=0.0),
        ProductFunction([GaussianFunction(c=0.5, xi=1.0), RationalFunction([(1.0, 2.0j, 1)])]),
    )
