import numpy as np
import pytest

from visco2d.fields import (
    State,
    SymTensorField,
    VelocityField,
    eigen_minmax,
    from_efg,
    to_efg,
    velocity_gradient_parts,
)
from visco2d.spectral import SpectralGrid, divergence

TWO_PI = 2.0 * np.pi


def random_velocity_field(grid, seed):
    rng = np.random.default_rng(seed)
    return VelocityField.from_values(
        grid, rng.standard_normal((grid.N, grid.N)),
        rng.standard_normal((grid.N, grid.N)),
    )


def random_tensor(grid, seed):
    rng = np.random.default_rng(seed)
    return SymTensorField.from_values(
        grid, *(rng.uniform(0.5, 2.0, (grid.N, grid.N)) for _ in range(3))
    )


def test_velocity_constructor_projects(grid32):
    v = random_velocity_field(grid32, 0)
    div = divergence(v.x, v.y)
    assert np.abs(div.spectrum).max() <= 1e-12 * np.abs(v.x.spectrum).max()
    assert abs(v.x.spectrum[0, 0]) == 0.0


def test_gradient_parts_zero_velocity(grid32):
    D, w = velocity_gradient_parts(VelocityField.zeros(grid32))
    for c in D.components:
        assert np.abs(c.values).max() == 0.0
    assert np.abs(w.values).max() == 0.0


def test_gradient_parts_shear_wave(grid32):
    # oracle: hand differentiation of v = (sin(2 pi y), 0)
    x, y = grid32.coordinates()
    v = VelocityField.from_values(grid32, np.sin(TWO_PI * y), np.zeros_like(y))
    D, w = velocity_gradient_parts(v)
    expected = np.pi * np.cos(TWO_PI * y)
    np.testing.assert_allclose(D.b11.values, 0.0, atol=1e-12)
    np.testing.assert_allclose(D.b22.values, 0.0, atol=1e-12)
    np.testing.assert_allclose(D.b12.values, expected, atol=1e-10)
    np.testing.assert_allclose(w.values, expected, atol=1e-10)


def test_gradient_parts_trace_free(grid32):
    v = random_velocity_field(grid32, 5)
    D, _ = velocity_gradient_parts(v)
    trace = D.b11.values + D.b22.values
    assert np.abs(trace).max() <= 1e-12 * max(1.0, np.abs(D.b11.values).max())


def test_d_plus_w_reproduces_gradient(grid32):
    from visco2d.spectral import gradient

    v = random_velocity_field(grid32, 6)
    D, w = velocity_gradient_parts(v)
    dy_vx = gradient(v.x)[1].values
    dx_vy = gradient(v.y)[0].values
    scale = max(1.0, np.abs(dy_vx).max())
    np.testing.assert_allclose(D.b12.values + w.values, dy_vx, atol=1e-12 * scale)
    np.testing.assert_allclose(D.b12.values - w.values, dx_vy, atol=1e-12 * scale)


class TestEFG:
    def test_diag_example(self, grid32):
        ones = np.ones((32, 32))
        B = SymTensorField.from_values(grid32, 2 * ones, 0 * ones, 1 * ones)
        view = to_efg(B)
        assert view.e[0, 0] == pytest.approx(0.5)
        assert view.f[0, 0] == pytest.approx(0.0)
        assert view.g[0, 0] == pytest.approx(3.0)

    def test_full_example(self, grid32):
        ones = np.ones((32, 32))
        B = SymTensorField.from_values(grid32, 3 * ones, 1 * ones, 1 * ones)
        view = to_efg(B)
        assert view.e[0, 0] == pytest.approx(1.0)
        assert view.f[0, 0] == pytest.approx(1.0)
        assert view.g[0, 0] == pytest.approx(4.0)

    def test_roundtrip_within_one_ulp(self, grid32):
        # exact as real arithmetic; the float sum/difference rounds once,
        # so the reconstruction can be off by a single ulp
        B = random_tensor(grid32, 9)
        back = from_efg(to_efg(B), grid32)
        np.testing.assert_array_max_ulp(back.b11.values, B.b11.values, maxulp=1)
        np.testing.assert_array_max_ulp(back.b22.values, B.b22.values, maxulp=1)
        np.testing.assert_array_equal(back.b12.values, B.b12.values)


class TestEigen:
    def test_identity(self, grid32):
        lam_min, lam_max = eigen_minmax(SymTensorField.identity(grid32))
        np.testing.assert_array_equal(lam_min.values, 1.0)
        np.testing.assert_array_equal(lam_max.values, 1.0)

    def test_diagonal(self, grid32):
        ones = np.ones((32, 32))
        B = SymTensorField.from_values(grid32, 2 * ones, 0 * ones, ones)
        lam_min, lam_max = eigen_minmax(B)
        np.testing.assert_allclose(lam_min.values, 1.0)
        np.testing.assert_allclose(lam_max.values, 2.0)

    def test_full_matrix_against_eigvalsh(self, grid32):
        # oracle: numpy's symmetric eigensolver at every point
        B = random_tensor(grid32, 10)
        lam_min, lam_max = eigen_minmax(B)
        mats = np.empty((32, 32, 2, 2))
        mats[..., 0, 0] = B.b11.values
        mats[..., 0, 1] = mats[..., 1, 0] = B.b12.values
        mats[..., 1, 1] = B.b22.values
        eigs = np.linalg.eigvalsh(mats)
        np.testing.assert_allclose(lam_min.values, eigs[..., 0], atol=1e-12)
        np.testing.assert_allclose(lam_max.values, eigs[..., 1], atol=1e-12)

    def test_known_closed_form_point(self, grid32):
        ones = np.ones((32, 32))
        B = SymTensorField.from_values(grid32, 3 * ones, ones, ones)
        lam_min, lam_max = eigen_minmax(B)
        assert lam_min.values[0, 0] == pytest.approx(2 - np.sqrt(2), rel=1e-14)
        assert lam_max.values[0, 0] == pytest.approx(2 + np.sqrt(2), rel=1e-14)

    def test_trace_and_det_identities(self, grid32):
        B = random_tensor(grid32, 11)
        lam_min, lam_max = eigen_minmax(B)
        trace = B.b11.values + B.b22.values
        det = B.b11.values * B.b22.values - B.b12.values**2
        np.testing.assert_allclose(lam_min.values + lam_max.values, trace, rtol=1e-12)
        np.testing.assert_allclose(lam_min.values * lam_max.values, det, rtol=1e-10, atol=1e-12)


def test_state_requires_shared_grid(grid32):
    other = SpectralGrid(16)
    with pytest.raises(ValueError):
        State(t=0.0, v=VelocityField.zeros(grid32), B=SymTensorField.identity(other))
