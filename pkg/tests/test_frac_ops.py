import numpy as np
import pytest

from fbl.frac_ops import build_matrices_1d, build_matrices_2d, dump_csv, first_derivative_interior
from fbl.grid_basis import jacobi_poly, jgl_grid, lagrange_coefficients, rl_oracle
from fbl.vorder import Layer, ProfileError, VariableOrderProfile


def sin_samples(grid, k):
    L = grid.x_hi - grid.x_lo
    w = k * np.pi / L
    x = grid.interior
    return np.sin(w * (x - grid.x_lo)), w, x


def test_alpha_two_quadratic():
    g = jgl_grid(40)
    m = build_matrices_1d(g, 2.0)
    x = g.interior
    np.testing.assert_allclose(m.D_L @ (1 - x**2), -2.0, atol=1e-8)


def test_near_first_order_sine():
    g = jgl_grid(40)
    m = build_matrices_1d(g, 1.0 + 1e-10)
    x = g.interior
    np.testing.assert_allclose(m.D_L @ np.sin(np.pi * x), np.pi * np.cos(np.pi * x), atol=1e-5)


@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_integer_limits_on_sines(k):
    g = jgl_grid(40, 0, 0, -6.0, 6.0)
    f, w, x = sin_samples(g, k)
    m2 = build_matrices_1d(g, 2.0)
    assert np.abs(m2.D_plus @ f + w * w * f).max() <= 1e-6
    assert np.abs(m2.D_minus @ f).max() <= 1e-6
    m1 = build_matrices_1d(g, 1.0 + 1e-10)
    assert np.abs(m1.D_minus @ f - w * np.cos(w * (x - g.x_lo))).max() <= 1e-5
    assert np.abs(m1.D_plus @ f).max() <= 1e-5


def test_variable_order_row_matches_oracle():
    """Rows of D_R with the one-way layer profile against the power-rule oracle
    applied to the interpolating polynomial (which is f itself here)."""
    prof = VariableOrderProfile((-5.0, 5.0), right=Layer(1.0, 0.5, 20.0))
    g = jgl_grid(16, 0, 0, -5.0, 6.0)
    m = build_matrices_1d(g, prof)
    xh = g.ref_nodes
    f_full = (1 - xh**2) ** 2
    Df = m.D_R @ f_full[1:-1]
    # (1 - x)^2 (1 + x)^2 in powers of h = 1 - x: (h^2)(2 - h)^2 = 4h^2 - 4h^3 + h^4
    coeffs = [0, 0, 4, -4, 1]
    for i in range(1, g.P):
        a = m.alpha[i]
        ref = rl_oracle(coeffs, a, xh[i], x_end=1.0) * g.half_length**-a
        assert Df[i - 1] == pytest.approx(ref, rel=1e-7, abs=1e-9)


def test_matrices_are_read_only_and_finite():
    prof = VariableOrderProfile((-5.0, 5.0), right=Layer(1.0, 0.5, 20.0))
    m = build_matrices_1d(jgl_grid(60, 0, 0, -5.0, 6.0), prof)
    for D in (m.D_L, m.D_R, m.D_minus, m.D_plus):
        assert np.all(np.isfinite(D))
        assert D.shape == (59, 59)
        with pytest.raises(ValueError):
            D[0, 0] = 1.0
    np.testing.assert_allclose(m.D_minus, 0.5 * (m.D_L - m.D_R))
    assert m.grid_key == (-5.0, 6.0, 60, 0.0, 0.0)


def test_domain_mismatch_rejected():
    prof = VariableOrderProfile((-5.0, 5.0), right=Layer(1.0, 0.5, 20.0))
    with pytest.raises(ValueError, match="domain"):
        build_matrices_1d(jgl_grid(20, 0, 0, -5.0, 7.0), prof)


def test_invalid_profile_rejected():
    prof = VariableOrderProfile((-5.0, 5.0), right=Layer(1.0, 0.1, 20.0))
    g = jgl_grid(20, 0, 0, -5.0, 6.0)
    with pytest.raises(ProfileError):
        build_matrices_1d(g, prof)
    m = build_matrices_1d(g, prof, validate=False)
    assert np.all(np.isfinite(m.D_R))


def test_assembly_is_deterministic():
    from fbl import frac_ops

    prof = VariableOrderProfile((-1.0, 1.0), Layer(0.5, 0.25, 40.0), Layer(0.5, 0.25, 40.0))
    g = jgl_grid(30, 0, 0, -1.5, 1.5)
    a = build_matrices_1d(g, prof).D_L.copy()
    frac_ops._cache.clear()
    b = build_matrices_1d(g, prof).D_L
    assert np.array_equal(a, b)


def test_2d_separable_structure():
    g = jgl_grid(20, 0, 0, -1.0, 1.0)
    mx, my = build_matrices_2d(g, g, 1.5, 1.5)
    x = g.interior
    gx = np.exp(-4 * x**2)
    hy = np.cos(x)
    F = np.outer(gx, hy)
    np.testing.assert_allclose(mx.D_L @ F, np.outer(mx.D_L @ gx, hy), atol=1e-12)
    np.testing.assert_allclose(F @ my.D_L.T, np.outer(gx, my.D_L @ hy), atol=1e-12)


def test_2d_laplacian_limit():
    g = jgl_grid(40)
    mx, my = build_matrices_2d(g, g, 2.0, 2.0)
    x = g.interior
    F = np.outer(np.sin(np.pi * x), np.sin(np.pi * x))
    lap = mx.D_plus @ F + F @ my.D_plus.T
    np.testing.assert_allclose(lap, -2 * np.pi**2 * F, atol=1e-5)


def test_2d_dplus_vanishes_in_advection_limit():
    g = jgl_grid(40)
    mx, my = build_matrices_2d(g, g, 1.0 + 1e-10, 1.0 + 1e-10)
    x = g.interior
    F = np.outer(np.sin(np.pi * x), np.sin(np.pi * x))
    assert np.abs(mx.D_plus @ F).max() <= 1e-4
    assert np.abs(F @ my.D_plus.T).max() <= 1e-4


def test_interior_reduction_2d():
    """With the 2D layer profiles, the coupled right-hand side equals the
    plain first-order wave right-hand side away from the layers for fields
    supported inside the interior."""
    layer = Layer(0.5, 0.25, 20.0)
    prof = VariableOrderProfile((-2.0, 2.0), layer, layer)
    g = jgl_grid(50, 0, 0, -2.5, 2.5)
    mx, my = build_matrices_2d(g, g, prof, prof, tol=1e-2)
    D = first_derivative_interior(g)
    x = g.interior
    X, Y = np.meshgrid(x, x, indexing="ij")
    bump = np.exp(-5 * (X**2 + Y**2))
    v, w1, w2 = bump, X * bump, Y * bump
    frac_v = mx.D_minus @ w1 + mx.D_plus @ v + w2 @ my.D_minus.T + v @ my.D_plus.T
    frac_w1 = mx.D_plus @ w1 + mx.D_minus @ v
    frac_w2 = w2 @ my.D_plus.T + v @ my.D_minus.T
    plain_v = D @ w1 + w2 @ D.T
    plain_w1 = D @ v
    plain_w2 = v @ D.T
    inner = np.abs(x) <= 1.75
    box = np.ix_(inner, inner)
    for a, b in ((frac_v, plain_v), (frac_w1, plain_w1), (frac_w2, plain_w2)):
        assert np.abs(a - b)[box].max() <= 2e-4


def test_first_derivative_paths_agree():
    """The exact Lagrange derivative and the fractional limit agree on smooth data."""
    g = jgl_grid(30, 0, 0, -1.0, 1.0)
    x = g.interior
    f = np.sin(np.pi * x) * np.exp(x)
    frac = build_matrices_1d(g, 1.0 + 1e-12).D_minus @ f
    exact = first_derivative_interior(g) @ f
    assert np.abs(frac - exact).max() <= 1e-8


def test_csv_dump(tmp_path):
    g = jgl_grid(6)
    m = build_matrices_1d(g, 1.5)
    path = tmp_path / "dl.csv"
    dump_csv(m.D_L, path)
    back = np.loadtxt(path, delimiter=",")
    assert np.array_equal(back, m.D_L)


def test_lagrange_change_of_basis_consistency():
    g = jgl_grid(12)
    L = lagrange_coefficients(g)
    V = np.stack([jacobi_poly(k, 0, 0, g.ref_nodes) for k in range(13)], axis=1)
    np.testing.assert_allclose(V @ L, np.eye(13), atol=1e-12)
