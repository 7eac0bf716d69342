"""Quadrature rules: composite Gauss-Legendre on intervals and a
Grundmann-Moller symmetric rule on the probability simplex.

The simplex carries the flat measure with total mass 1/n! (surface
parametrized by its last n barycentric coordinates over the unit simplex).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = ["gauss_legendre", "composite_gauss_legendre", "grundmann_moller", "simplex_monomial_integral"]


def gauss_legendre(a: float, b: float, n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    mid, half = (a + b) / 2.0, (b - a) / 2.0
    return mid + half * x, half * w


def composite_gauss_legendre(a: float, b: float, segments: int, nodes: int):
    edges = np.linspace(a, b, segments + 1)
    xs, ws = [], []
    for i in range(segments):
        x, w = gauss_legendre(edges[i], edges[i + 1], nodes)
        xs.append(x)
        ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


def _compositions(total: int, parts: int):
    """All tuples of `parts` nonnegative integers summing to `total`."""
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def grundmann_moller(n: int, index: int = 4):
    """Symmetric rule of degree 2*index+1 on the n-simplex, mass 1/n!.

    Returns (points, weights): points has shape (npts, n+1) in barycentric
    coordinates; weights sum to 1/n!. Exact for polynomials in the
    barycentric coordinates up to total degree 2*index+1.
    """
    s = index
    pts, wts = [], []
    for i in range(s + 1):
        gamma = n + 2 * (s - i) + 1
        w = (
            (-1.0) ** i
            * 2.0 ** (-2 * s)
            * float(n + 2 * s + 1 - 2 * i) ** (2 * s + 1)
            / (math.factorial(i) * math.factorial(n + 2 * s + 1 - i))
        )
        for beta in _compositions(s - i, n + 1):
            pts.append([(2 * b + 1) / gamma for b in beta])
            wts.append(w)
    pts = np.array(pts)
    wts = np.array(wts)
    wts *= (1.0 / math.factorial(n)) / np.sum(wts)
    return pts, wts


def simplex_monomial_integral(exponents) -> float:
    """Integral of prod s_j^(a_j) over the simplex with flat mass 1/n!.

    Dirichlet's formula: prod a_j! / (n + sum a_j)!.
    """
    a = list(exponents)
    n = len(a) - 1
    num = 1.0
    for aj in a:
        num *= math.factorial(aj)
    return num / math.factorial(n + sum(a))
