"""Demo operator generator: finite-difference Laplacians on a box (Dirichlet
boundary, standard stencil, 1/dx^2 scaling) with diagonal potentials, plus
the summability diagnostics table. Demo-quality output: Schatten tables are
reported, never asserted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .relbound import HypothesisReport, hypothesis_report

__all__ = ["GridOperatorSpec", "generate_schrodinger", "schatten_table_sweep"]

MAX_TOTAL_DIM_MOI = 4096


@dataclass(frozen=True)
class GridOperatorSpec:
    """Grid and potential description.

    potential kinds: ("truncated-coulomb", radius, strength),
    ("gaussian-well", width, depth), ("samples", array of grid samples).
    """

    dimension: int
    grid_points: int
    box_half_width: float
    potential: tuple
    summability: int = 4

    def __post_init__(self):
        if self.dimension not in (1, 3):
            raise ValueError("dimension must be 1 or 3")
        if self.grid_points < 8:
            raise ValueError("need at least 8 grid points per axis")
        if self.dimension == 3 and self.grid_points > 16:
            raise ValueError("3-d grids capped at 16 points per axis")
        kind = self.potential[0]
        if kind not in ("truncated-coulomb", "gaussian-well", "samples"):
            raise ValueError(f"unknown potential kind {kind!r}")
        if kind == "truncated-coulomb" and not self.potential[1] < self.box_half_width:
            raise ValueError("truncation radius must be smaller than the box half-width")

    @property
    def total_dim(self) -> int:
        return self.grid_points**self.dimension


def _laplacian_1d(g: int, dx: float) -> np.ndarray:
    m = 2.0 * np.eye(g) - np.eye(g, k=1) - np.eye(g, k=-1)
    return m / dx**2


def _grid(spec: GridOperatorSpec):
    # interior points of (-L, L), Dirichlet walls at the boundary
    g, L = spec.grid_points, spec.box_half_width
    dx = 2.0 * L / (g + 1)
    axis = -L + dx * np.arange(1, g + 1)
    return axis, dx


def _potential_values(spec: GridOperatorSpec, radii: np.ndarray, dx: float) -> np.ndarray:
    kind = spec.potential[0]
    if kind == "truncated-coulomb":
        radius, strength = spec.potential[1], spec.potential[2]
        # grid sample at the origin replaced by the value at r = dx/2
        r = np.maximum(radii, dx / 2.0)
        return np.where(radii <= radius, -strength / r, 0.0)
    if kind == "gaussian-well":
        width, depth = spec.potential[1], spec.potential[2]
        return -depth * np.exp(-(radii**2) / (2.0 * width**2))
    samples = np.asarray(spec.potential[1], dtype=float)
    if samples.size != radii.size:
        raise ValueError(f"need {radii.size} potential samples, got {samples.size}")
    return samples


def generate_schrodinger(spec: GridOperatorSpec, allow_large: bool = False):
    """(H, V, diagnostics): kinetic term, diagonal potential, and the
    summability report at the requested order.

    Total dimensions above 4096 are rejected unless allow_large (integral
    suites scale like dim^(order+1); shift-function work does not).
    """
    if spec.total_dim > MAX_TOTAL_DIM_MOI and not allow_large:
        raise ValueError(
            f"total dimension {spec.total_dim} exceeds {MAX_TOTAL_DIM_MOI}; "
            "pass allow_large=True for shift-function-only work"
        )
    axis, dx = _grid(spec)
    g = spec.grid_points
    lap1 = _laplacian_1d(g, dx)
    if spec.dimension == 1:
        h = lap1
        radii = np.abs(axis)
    else:
        eye = np.eye(g)
        h = (
            np.kron(np.kron(lap1, eye), eye)
            + np.kron(np.kron(eye, lap1), eye)
            + np.kron(np.kron(eye, eye), lap1)
        )
        xs, ys, zs = np.meshgrid(axis, axis, axis, indexing="ij")
        radii = np.sqrt(xs**2 + ys**2 + zs**2).ravel()
    v = np.diag(_potential_values(spec, radii, dx))
    diagnostics = hypothesis_report(h, v, n=spec.summability)
    return h, v, diagnostics


def schatten_table_sweep(base: GridOperatorSpec, grid_sizes) -> list:
    """Qualitative table of ||V (H-i)^(-p)||_{n/p} against grid size."""
    rows = []
    for g in grid_sizes:
        spec = GridOperatorSpec(
            dimension=base.dimension,
            grid_points=int(g),
            box_half_width=base.box_half_width,
            potential=base.potential,
            summability=base.summability,
        )
        _, _, diag = generate_schrodinger(spec)
        for p, order, value in diag.schatten_table:
            rows.append({"grid_points": int(g), "p": p, "schatten_order": order, "value": value})
    return rows
