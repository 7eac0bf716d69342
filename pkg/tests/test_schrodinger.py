import numpy as np
import pytest

from opfun.schrodinger import GridOperatorSpec, generate_schrodinger, schatten_table_sweep


def test_1d_gaussian_well():
    spec = GridOperatorSpec(1, 32, 10.0, ("gaussian-well", 2.0, 1.0), summability=4)
    h, v, diag = generate_schrodinger(spec)
    assert h.shape == (32, 32)
    # tridiagonal kinetic term
    assert np.count_nonzero(h - np.diag(np.diag(h)) - np.diag(np.diag(h, 1), 1)
                            - np.diag(np.diag(h, -1), -1)) == 0
    assert np.allclose(np.diag(h, 1), np.diag(h, 1)[0])
    assert np.all(np.diag(v) <= 0)
    assert np.isfinite(diag.alpha)
    assert diag.all_pass()


def test_zero_strength_potential():
    spec = GridOperatorSpec(1, 16, 5.0, ("gaussian-well", 1.0, 0.0))
    _, v, diag = generate_schrodinger(spec)
    assert np.all(v == 0)
    assert diag.alpha == 0.0


def test_truncated_coulomb_regularized():
    spec = GridOperatorSpec(1, 33, 8.0, ("truncated-coulomb", 4.0, 1.0))
    h, v, diag = generate_schrodinger(spec)
    d = np.diag(v)
    assert np.min(d) > -np.inf and np.all(np.isfinite(d))
    # outside the truncation radius the potential vanishes
    axis = -8.0 + (16.0 / 34.0) * np.arange(1, 34)
    assert np.all(d[np.abs(axis) > 4.0] == 0.0)
    assert np.isfinite(diag.alpha)


def test_3d_small_grid():
    spec = GridOperatorSpec(3, 8, 6.0, ("gaussian-well", 1.5, 0.5), summability=4)
    h, v, diag = generate_schrodinger(spec)
    assert h.shape == (512, 512)
    assert np.allclose(h, h.T)
    assert np.isfinite(diag.alpha)


def test_guards():
    with pytest.raises(ValueError, match="dimension"):
        GridOperatorSpec(2, 16, 5.0, ("gaussian-well", 1.0, 1.0))
    with pytest.raises(ValueError, match="grid points"):
        GridOperatorSpec(1, 4, 5.0, ("gaussian-well", 1.0, 1.0))
    with pytest.raises(ValueError, match="radius"):
        GridOperatorSpec(1, 16, 5.0, ("truncated-coulomb", 6.0, 1.0))
    spec = GridOperatorSpec(3, 16, 6.0, ("gaussian-well", 1.0, 1.0))
    assert spec.total_dim == 4096 == 16**3
    with pytest.raises(ValueError, match="16"):
        GridOperatorSpec(3, 17, 6.0, ("gaussian-well", 1.0, 1.0))


def test_sweep_rows():
    base = GridOperatorSpec(1, 16, 6.0, ("gaussian-well", 1.5, 1.0), summability=2)
    rows = schatten_table_sweep(base, [16, 24])
    assert len(rows) == 4
    assert {r["grid_points"] for r in rows} == {16, 24}
