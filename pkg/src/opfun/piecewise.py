"""Exact piecewise polynomials with point masses.

This is the carrier type for divided-difference densities (B-splines with
knots at eigenvalue tuples) and for spectral shift functions of every order.
Coefficients live in local coordinates (x - left breakpoint) per piece;
integrals are closed-form antiderivatives, never quadrature, unless a general
integrand is involved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PiecewisePolynomial",
    "divided_difference_density",
    "gauss_legendre_nodes",
]

_MASS_MERGE_EPS = 0.0  # masses merge only at exactly equal locations


def gauss_legendre_nodes(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    return mid + half * x, half * w


def _shift_coeffs(c: np.ndarray, delta: float) -> np.ndarray:
    """Re-center polynomial coefficients: p(xi) -> q(eta) = p(eta + delta)."""
    k = c.size
    out = np.zeros(k, dtype=complex)
    for j in range(k):
        acc = 0.0 + 0.0j
        for m in range(j, k):
            acc += c[m] * math.comb(m, j) * delta ** (m - j)
        out[j] = acc
    return out


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Sum of a piecewise polynomial (zero outside its breakpoint hull) and
    finitely many point masses.

    breakpoints: ascending floats, len M+1 (M >= 0 pieces)
    coeffs: list of M complex coefficient arrays, ascending powers of
        (x - breakpoints[i])
    point_masses: tuple of (location, weight)
    """

    breakpoints: np.ndarray
    coeffs: tuple
    point_masses: tuple = ()

    def __init__(self, breakpoints, coeffs, point_masses=()):
        bp = np.atleast_1d(np.asarray(breakpoints, dtype=float))
        if bp.size and np.any(np.diff(bp) <= 0):
            raise ValueError("breakpoints must be strictly ascending")
        cs = tuple(np.atleast_1d(np.asarray(c, dtype=complex)) for c in coeffs)
        if bp.size == 0 and cs:
            raise ValueError("pieces given without breakpoints")
        if bp.size and len(cs) != bp.size - 1:
            raise ValueError(f"{len(cs)} pieces for {bp.size} breakpoints")
        pm = tuple(sorted(((float(l), complex(w)) for l, w in point_masses)))
        object.__setattr__(self, "breakpoints", bp)
        object.__setattr__(self, "coeffs", cs)
        object.__setattr__(self, "point_masses", pm)

    # -- queries ------------------------------------------------------------

    @property
    def npieces(self) -> int:
        return len(self.coeffs)

    @property
    def degree(self) -> int:
        return max((c.size - 1 for c in self.coeffs), default=0)

    def hull(self):
        """Smallest interval containing pieces and masses, or None if empty."""
        lo, hi = math.inf, -math.inf
        if self.breakpoints.size:
            lo, hi = self.breakpoints[0], self.breakpoints[-1]
        for l, _ in self.point_masses:
            lo, hi = min(lo, l), max(hi, l)
        return None if lo > hi else (float(lo), float(hi))

    def __call__(self, x):
        """Pointwise values, right-continuous at breakpoints (masses excluded)."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape, dtype=complex)
        if self.npieces == 0:
            return out
        idx = np.searchsorted(self.breakpoints, x, side="right") - 1
        inside = (idx >= 0) & (idx < self.npieces)
        for i in range(self.npieces):
            sel = inside & (idx == i)
            if not np.any(sel):
                continue
            xi = x[sel] - self.breakpoints[i]
            val = np.zeros(xi.shape, dtype=complex)
            for ck in self.coeffs[i][::-1]:
                val = val * xi + ck
            out[sel] = val
        return out

    def total_integral(self, include_masses: bool = True) -> complex:
        """Exact integral of the density plus (optionally) the mass weights."""
        total = 0.0 + 0.0j
        for i, c in enumerate(self.coeffs):
            width = self.breakpoints[i + 1] - self.breakpoints[i]
            powers = width ** np.arange(1, c.size + 1)
            total += np.sum(c * powers / np.arange(1, c.size + 1))
        if include_masses:
            total += sum(w for _, w in self.point_masses)
        return complex(total)

    def max_abs(self, samples_per_piece: int = 33) -> float:
        """Sampled upper envelope of |density| (masses excluded)."""
        peak = 0.0
        for i in range(self.npieces):
            xs = np.linspace(self.breakpoints[i], self.breakpoints[i + 1], samples_per_piece)
            peak = max(peak, float(np.max(np.abs(self(xs)))))
        return peak

    # -- algebra ------------------------------------------------------------

    def _refined_onto(self, grid: np.ndarray) -> list:
        """Coefficients of this density on each interval of the given grid."""
        out = []
        for i in range(grid.size - 1):
            mid = 0.5 * (grid[i] + grid[i + 1])
            if self.npieces == 0 or mid < self.breakpoints[0] or mid > self.breakpoints[-1]:
                out.append(np.zeros(1, dtype=complex))
                continue
            j = int(np.searchsorted(self.breakpoints, mid, side="right") - 1)
            j = min(max(j, 0), self.npieces - 1)
            out.append(_shift_coeffs(self.coeffs[j], grid[i] - self.breakpoints[j]))
        return out

    def __add__(self, other: "PiecewisePolynomial") -> "PiecewisePolynomial":
        pts = []
        if self.breakpoints.size:
            pts.append(self.breakpoints)
        if other.breakpoints.size:
            pts.append(other.breakpoints)
        if not pts:
            grid = np.array([])
            coeffs = []
        else:
            grid = np.unique(np.concatenate(pts))
            a = self._refined_onto(grid)
            b = other._refined_onto(grid)
            coeffs = []
            for ca, cb in zip(a, b):
                k = max(ca.size, cb.size)
                c = np.zeros(k, dtype=complex)
                c[: ca.size] += ca
                c[: cb.size] += cb
                coeffs.append(c)
        masses: dict = {}
        for l, w in self.point_masses + other.point_masses:
            masses[l] = masses.get(l, 0.0) + w
        pm = tuple((l, w) for l, w in sorted(masses.items()) if w != 0)
        return PiecewisePolynomial(grid, coeffs, pm)

    def scaled(self, factor: complex) -> "PiecewisePolynomial":
        return PiecewisePolynomial(
            self.breakpoints,
            [c * factor for c in self.coeffs],
            [(l, w * factor) for l, w in self.point_masses],
        )

    def __neg__(self):
        return self.scaled(-1.0)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def real_part(self) -> "PiecewisePolynomial":
        return PiecewisePolynomial(
            self.breakpoints,
            [c.real.astype(complex) for c in self.coeffs],
            [(l, complex(w.real)) for l, w in self.point_masses],
        )

    def imag_max(self) -> float:
        """Largest imaginary residue across coefficients and masses."""
        peak = 0.0
        for c in self.coeffs:
            if c.size:
                peak = max(peak, float(np.max(np.abs(c.imag))))
        for _, w in self.point_masses:
            peak = max(peak, abs(w.imag))
        return peak

    # -- calculus -----------------------------------------------------------

    def cumulative(self) -> tuple["PiecewisePolynomial", complex]:
        """(G, total) with G(x) = integral over (-inf, x] of density + masses.

        G is a piecewise polynomial on the hull (masses become jumps at their
        locations, included right-continuously); outside the hull G is 0 on
        the left and `total` on the right. The caller decides what to do with
        a nonzero total (a compactly supported G requires total == 0).
        """
        locs = [l for l, _ in self.point_masses]
        pts = [np.asarray(locs, dtype=float)] if locs else []
        if self.breakpoints.size:
            pts.append(self.breakpoints)
        if not pts:
            return PiecewisePolynomial([], []), 0.0
        grid = np.unique(np.concatenate(pts))
        base = self._refined_onto(grid) if grid.size > 1 else []
        masses = dict()
        for l, w in self.point_masses:
            masses[l] = masses.get(l, 0.0) + w
        running = 0.0 + 0.0j
        if grid[0] in masses:
            running += masses[grid[0]]
        out = []
        for i, c in enumerate(base):
            anti = np.zeros(c.size + 1, dtype=complex)
            anti[1:] = c / np.arange(1, c.size + 1)
            anti[0] = running
            out.append(anti)
            width = grid[i + 1] - grid[i]
            running += np.sum(c * width ** np.arange(1, c.size + 1) / np.arange(1, c.size + 1))
            if grid[i + 1] in masses:
                running += masses[grid[i + 1]]
        if grid.size == 1:
            return PiecewisePolynomial([], []), complex(running)
        return PiecewisePolynomial(grid, out), complex(running)

    def integrate_against(self, g, nodes: int = 20, tol: float = 1e-9, max_depth: int = 12) -> complex:
        """integral of g(x) * density(x) dx + sum of weight * g(location).

        Per-piece Gauss-Legendre with adaptive bisection until the piece value
        is stable to tol (relative to the accumulated magnitude).
        """
        total = 0.0 + 0.0j
        for i in range(self.npieces):
            total += self._adaptive_piece(g, self.breakpoints[i], self.breakpoints[i + 1],
                                          self.coeffs[i], self.breakpoints[i], nodes, tol, max_depth)
        for l, w in self.point_masses:
            total += w * complex(np.asarray(g(np.array([l])), dtype=complex)[0])
        return complex(total)

    def _adaptive_piece(self, g, a, b, c, origin, nodes, tol, depth) -> complex:
        def quad(lo, hi, npts):
            x, w = gauss_legendre_nodes(lo, hi, npts)
            xi = x - origin
            val = np.zeros(xi.shape, dtype=complex)
            for ck in c[::-1]:
                val = val * xi + ck
            return complex(np.sum(w * val * np.asarray(g(x), dtype=complex)))

        coarse = quad(a, b, nodes)
        fine = quad(a, 0.5 * (a + b), nodes) + quad(0.5 * (a + b), b, nodes)
        if abs(fine - coarse) <= tol * max(1.0, abs(fine)) or depth <= 0:
            return fine
        mid = 0.5 * (a + b)
        return (self._adaptive_piece(g, a, mid, c, origin, nodes, tol, depth - 1)
                + self._adaptive_piece(g, mid, b, c, origin, nodes, tol, depth - 1))

    def zero_outside(self, lo: float, hi: float, tol: float) -> "PiecewisePolynomial":
        """Drop pieces outside [lo, hi], verifying they are below tol first."""
        keep_c, keep_b = [], []
        for i in range(self.npieces):
            a, b = self.breakpoints[i], self.breakpoints[i + 1]
            if b <= lo or a >= hi:
                xi = np.linspace(0.0, b - a, 9)
                vals = np.zeros(xi.shape, dtype=complex)
                for ck in self.coeffs[i][::-1]:
                    vals = vals * xi + ck
                worst = float(np.max(np.abs(vals)))
                if worst > tol:
                    raise ValueError(
                        f"piece [{a}, {b}] should vanish outside the hull "
                        f"but reaches {worst:.3e} > {tol:.3e}"
                    )
            else:
                keep_b.append((a, b))
                keep_c.append(self.coeffs[i])
        if not keep_c:
            return PiecewisePolynomial([], [], self.point_masses)
        bps = [keep_b[0][0]] + [seg[1] for seg in keep_b]
        return PiecewisePolynomial(bps, keep_c, self.point_masses)

    # -- serialization ------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "breakpoints": [float(b) for b in self.breakpoints],
            "pieces": [[[float(c.real), float(c.imag)] for c in piece] for piece in self.coeffs],
            "point_masses": [[float(l), float(w.real), float(w.imag)] for l, w in self.point_masses],
        }

    @staticmethod
    def from_dict(d: dict) -> "PiecewisePolynomial":
        coeffs = [np.array([complex(re, im) for re, im in piece]) for piece in d["pieces"]]
        masses = [(l, complex(re, im)) for l, re, im in d.get("point_masses", [])]
        return PiecewisePolynomial(d["breakpoints"], coeffs, masses)


# ---------------------------------------------------------------------------
# Peano-kernel density of a divided difference
# ---------------------------------------------------------------------------


def _deriv_row(knots, j, order, deg, t_left, right_mask) -> np.ndarray:
    """Coefficients in eta = t - t_left of D_x^order (x - t)_+^deg / order! at x = knots[j]."""
    row = np.zeros(deg + 1)
    if not right_mask[j]:
        return row
    p = deg - order
    if p < 0:
        return row
    a = knots[j] - t_left
    for q in range(p + 1):
        row[q] = math.comb(p, q) * a ** (p - q) * (-1.0) ** q
    return math.comb(deg, order) * row


def _poly_dd_table(knots: np.ndarray, k: int, t_left: float, right_mask) -> np.ndarray:
    """Divided difference over the x-knots of x -> (x - t)_+^(k-1), as a
    polynomial in t on one interval, in local coordinates t = t_left + eta.

    right_mask[j] is True when knot j lies right of the interval; sorted
    knots make exactly-equal blocks route through derivative rows (Hermite
    table on polynomial entries).
    """
    n1 = knots.size
    deg = k - 1
    cur = np.stack([_deriv_row(knots, j, 0, deg, t_left, right_mask) for j in range(n1)])
    for order in range(1, n1):
        nxt = np.zeros((n1 - order, deg + 1))
        for j in range(n1 - order):
            dz = knots[j + order] - knots[j]
            if dz == 0.0:
                nxt[j] = _deriv_row(knots, j, order, deg, t_left, right_mask)
            else:
                nxt[j] = (cur[j + 1] - cur[j]) / dz
        cur = nxt
    return cur[0]


def divided_difference_density(nodes, tau_conf: float | None = None) -> PiecewisePolynomial:
    """Density rho with integral f^(k)(x) rho(x) dx (+ point-mass terms)
    equal to the divided difference f[x_0,...,x_k] for every C^k function f.

    rho is the B-spline with knots at the nodes, normalized to total integral
    1/k!; a fully confluent node set yields the single point mass
    (location, 1/k!). Knots of full multiplicity are the only point-mass
    source; partial confluence gives a genuine (possibly discontinuous)
    piecewise polynomial.
    """
    nodes = np.sort(np.asarray(nodes, dtype=float))
    k = nodes.size - 1
    if k < 0:
        raise ValueError("need at least one node")
    scale = max(1.0, float(np.max(np.abs(nodes))))
    if tau_conf is None:
        tau_conf = 1e-7 * scale
    from .functions import _confluence_groups  # shared grouping rule

    groups = _confluence_groups(nodes, tau_conf)
    knots = np.empty_like(nodes)
    for g in groups:
        vals = nodes[g]
        knots[g] = vals[0] if vals[0] == vals[-1] else float(np.mean(vals))
    if k == 0 or len(groups) == 1:
        return PiecewisePolynomial([], [], [(float(knots[0]), 1.0 / math.factorial(k))])
    breaks = np.array([knots[g[0]] for g in groups])
    inv = 1.0 / math.factorial(k - 1)
    coeffs = []
    for i in range(breaks.size - 1):
        right_mask = knots >= breaks[i + 1]
        c = _poly_dd_table(knots, k, breaks[i], right_mask) * inv
        coeffs.append(c.astype(complex))
    return PiecewisePolynomial(breaks, coeffs)
