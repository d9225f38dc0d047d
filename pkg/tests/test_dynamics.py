import numpy as np
import pytest
import sympy as sp

from visco2d.config import ModelParams
from visco2d.constitutive import (
    conjugate_J,
    cutoff_rho_values,
    relax_R_components,
)
from visco2d.dynamics import (
    Tendency,
    galerkin_truncate_rhs,
    momentum_rhs,
    momentum_rhs_regularized,
    pressure_recover,
    regularize_initial_B,
    tensor_rhs,
    tensor_rhs_regularized,
)
from visco2d.fields import (
    State,
    SymTensorField,
    VelocityField,
    velocity_gradient_parts,
)
from visco2d.harness import random_spd_tensor, random_velocity, taylor_green_state
from visco2d.spectral import gradient, laplacian

TWO_PI = 2.0 * np.pi


def equilibrium(grid):
    return State(t=0.0, v=VelocityField.zeros(grid), B=SymTensorField.identity(grid))


def smooth_state(grid, seed, *, v_amp=0.5, b_amp=0.2, kmax=3):
    rng = np.random.default_rng(seed)
    return State(
        t=0.0,
        v=random_velocity(grid, rng, kmax=kmax, amplitude=v_amp),
        B=random_spd_tensor(grid, rng, kmax=kmax, amplitude=b_amp),
    )


def constant_tensor(grid, b11, b12, b22):
    shape = (grid.N, grid.N)
    return SymTensorField.from_values(
        grid, np.full(shape, float(b11)), np.full(shape, float(b12)),
        np.full(shape, float(b22)),
    )


class TestMomentumRHS:
    def test_equilibrium_is_steady(self, grid32):
        dv = momentum_rhs(equilibrium(grid32), None, ModelParams(a=1.0, beta=0.3))
        assert np.abs(dv.x.values).max() == 0.0
        assert np.abs(dv.y.values).max() == 0.0

    @pytest.mark.parametrize("orientation", ["cos_sin", "sin_cos"])
    def test_taylor_green_reduces_to_stokes_decay(self, grid64, orientation):
        # the advective term of the vortex is a pure gradient, so only
        # diffusion survives the projection: dv = -8 pi^2 v
        x, y = grid64.coordinates()
        if orientation == "cos_sin":
            vx = np.cos(TWO_PI * x) * np.sin(TWO_PI * y)
            vy = -np.sin(TWO_PI * x) * np.cos(TWO_PI * y)
        else:
            vx = np.sin(TWO_PI * x) * np.cos(TWO_PI * y)
            vy = -np.cos(TWO_PI * x) * np.sin(TWO_PI * y)
        state = State(t=0.0, v=VelocityField.from_values(grid64, vx, vy),
                      B=SymTensorField.identity(grid64))
        dv = momentum_rhs(state, None, ModelParams(a=0.0, beta=0.3))
        np.testing.assert_allclose(dv.x.values, -8 * np.pi**2 * state.v.x.values,
                                   atol=1e-9)
        np.testing.assert_allclose(dv.y.values, -8 * np.pi**2 * state.v.y.values,
                                   atol=1e-9)

    def test_identity_tensor_decouples_for_any_slip(self, grid32):
        state = smooth_state(grid32, 2, b_amp=0.0)
        state = State(t=0.0, v=state.v, B=SymTensorField.identity(grid32))
        base = momentum_rhs(state, None, ModelParams(a=0.0, beta=0.3))
        coupled = momentum_rhs(state, None, ModelParams(a=3.7, beta=0.3))
        np.testing.assert_array_equal(base.x.values, coupled.x.values)
        np.testing.assert_array_equal(base.y.values, coupled.y.values)

    def test_tendency_divergence_free_and_mean_free(self, grid32):
        state = smooth_state(grid32, 3)
        dv = momentum_rhs(state, None, ModelParams(a=1.0, beta=0.3, delta1=1.0))
        div = grid32.ddx(dv.x.spectrum) + grid32.ddy(dv.y.spectrum)
        scale = max(np.abs(dv.x.spectrum).max(), 1.0)
        assert np.abs(div).max() <= 1e-12 * scale
        assert dv.x.spectrum[0, 0] == 0.0 and dv.y.spectrum[0, 0] == 0.0

    def test_newtonian_momentum_ignores_tensor(self, grid32):
        # with a = 0 the velocity equation must not see B at all
        state_a = smooth_state(grid32, 4)
        state_b = State(t=0.0, v=state_a.v, B=constant_tensor(grid32, 3.0, 0.7, 2.0))
        params = ModelParams(a=0.0, beta=0.3, delta1=1.0, delta2=1.0)
        dv_a = momentum_rhs(state_a, None, params)
        dv_b = momentum_rhs(state_b, None, params)
        np.testing.assert_array_equal(dv_a.x.values, dv_b.x.values)
        np.testing.assert_array_equal(dv_a.y.values, dv_b.y.values)


class TestTensorRHS:
    def test_equilibrium_is_steady(self, grid32):
        dB = tensor_rhs(equilibrium(grid32), ModelParams(a=1.0, beta=0.3,
                                                         delta1=2.0, delta2=1.0))
        for c in dB.components:
            assert np.abs(c.values).max() == 0.0

    def test_constant_tensor_relaxes(self, grid32):
        state = State(t=0.0, v=VelocityField.zeros(grid32),
                      B=constant_tensor(grid32, 2.0, 0.0, 1.0))
        dB = tensor_rhs(state, ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.0))
        np.testing.assert_allclose(dB.b11.values, -1.0, atol=1e-13)
        np.testing.assert_allclose(dB.b12.values, 0.0, atol=1e-13)
        np.testing.assert_allclose(dB.b22.values, 0.0, atol=1e-13)

    def test_pure_diffusion_matches_spectral_laplacian(self, grid32):
        state = smooth_state(grid32, 5, v_amp=0.0)
        state = State(t=0.0, v=VelocityField.zeros(grid32), B=state.B)
        dB = tensor_rhs(state, ModelParams(a=1.0, beta=0.3, delta1=0.0, delta2=0.0))
        for c, dc in zip(state.B.components, dB.components):
            expected = laplacian(c).values
            np.testing.assert_allclose(dc.values, expected,
                                       atol=1e-11 * max(1.0, np.abs(expected).max()))


class TestRegularizedRHS:
    def test_cutoff_above_spectrum_freezes_sources(self, grid32):
        # with the cutoff above every eigenvalue, only diffusion and
        # advection survive in the tensor equation and the coupling
        # disappears from the momentum equation
        state = smooth_state(grid32, 6, b_amp=0.2)
        lam_bound = 1.3  # perturbation amplitude 0.2 keeps lambda below this
        params = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5,
                             epsilon=2.0 * lam_bound)
        dB = tensor_rhs_regularized(state, params)

        g = grid32
        md = g.dealias
        ux = g.inverse(md(state.v.x.spectrum))
        uy = g.inverse(md(state.v.y.spectrum))
        for c, dc in zip(state.B.components, dB.components):
            adv = (ux * g.inverse(g.ddx(md(c.spectrum)))
                   + uy * g.inverse(g.ddy(md(c.spectrum))))
            expected = g.inverse(g.lap(c.spectrum) - md(g.forward(adv)))
            np.testing.assert_allclose(dc.values, expected, atol=1e-12)

        dv = momentum_rhs_regularized(state, None, params)
        ns = momentum_rhs(State(t=0.0, v=state.v, B=SymTensorField.identity(grid32)),
                          None, ModelParams(a=1.0, beta=0.3))
        np.testing.assert_allclose(dv.x.values, ns.x.values, atol=1e-12)

    def test_zero_epsilon_path_is_bit_identical(self, grid32):
        state = smooth_state(grid32, 7)
        params = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5, epsilon=0.0)
        dv_a = momentum_rhs(state, None, params)
        dv_b = momentum_rhs_regularized(state, None, params)
        np.testing.assert_array_equal(dv_a.x.values, dv_b.x.values)
        dB_a = tensor_rhs(state, params)
        dB_b = tensor_rhs_regularized(state, params)
        for a, b in zip(dB_a.components, dB_b.components):
            np.testing.assert_array_equal(a.values, b.values)

    def test_deviation_scales_linearly_with_epsilon(self, grid32):
        state = smooth_state(grid32, 8, b_amp=0.2, kmax=3)
        base = tensor_rhs(state, ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5))

        def deviation(eps):
            params = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5, epsilon=eps)
            reg = tensor_rhs_regularized(state, params)
            return max(np.abs(r.values - b.values).max()
                       for r, b in zip(reg.components, base.components))

        d2, d3 = deviation(1e-2), deviation(1e-3)
        assert d2 / d3 == pytest.approx(10.0, rel=0.15)

        # derived bound: |1 - rho| <= eps (1/lambda_min + |B|^3)
        from visco2d.fields import lambda_min_values

        b11, b12, b22 = (c.values for c in state.B.components)
        lam = lambda_min_values(b11, b12, b22)
        norm = np.sqrt(b11**2 + 2 * b12**2 + b22**2)
        envelope = float((1.0 / lam + norm**3).max())
        a = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5)
        r11, r12, r22 = relax_R_components(b11, b12, b22, a.delta1, a.delta2)
        D, w = velocity_gradient_parts(state.v)
        src_sup = 0.0
        for arr in (r11, r12, r22):
            src_sup = max(src_sup, np.abs(arr).max())
        src_sup += 4 * max(np.abs(D.b11.values).max(), np.abs(D.b12.values).max(),
                           np.abs(w.values).max()) * norm.max()
        assert d2 <= 1e-2 * envelope * src_sup * 1.05

    def test_constant_state_relaxes_with_cutoff_weight(self, grid32):
        b11, b12, b22 = 1.4, 0.1, 0.8
        eps = 0.2
        state = State(t=0.0, v=VelocityField.zeros(grid32),
                      B=constant_tensor(grid32, b11, b12, b22))
        params = ModelParams(a=1.0, beta=0.3, delta1=1.3, delta2=0.4, epsilon=eps)
        dB = tensor_rhs_regularized(state, params)
        rho = cutoff_rho_values(np.array(b11), np.array(b12), np.array(b22), eps)
        r11, r12, r22 = relax_R_components(np.array(b11), np.array(b12),
                                           np.array(b22), 1.3, 0.4)
        np.testing.assert_allclose(dB.b11.values, -float(rho * r11), atol=1e-13)
        np.testing.assert_allclose(dB.b12.values, -float(rho * r12), atol=1e-13)
        np.testing.assert_allclose(dB.b22.values, -float(rho * r22), atol=1e-13)


class TestPressure:
    def test_equilibrium_pressure_vanishes(self, grid32):
        p = pressure_recover(equilibrium(grid32), None, ModelParams(a=1.0, beta=0.3))
        assert np.abs(p.values).max() == 0.0

    def test_taylor_green_pressure_against_symbolic_oracle(self, grid64):
        xs, ys = sp.symbols("x y")
        vx_s = sp.cos(2 * sp.pi * xs) * sp.sin(2 * sp.pi * ys)
        vy_s = -sp.sin(2 * sp.pi * xs) * sp.cos(2 * sp.pi * ys)
        adv_x = vx_s * sp.diff(vx_s, xs) + vy_s * sp.diff(vx_s, ys)
        adv_y = vx_s * sp.diff(vy_s, xs) + vy_s * sp.diff(vy_s, ys)
        p_s = -sp.Rational(1, 4) * (sp.cos(4 * sp.pi * xs) + sp.cos(4 * sp.pi * ys))
        assert sp.simplify(sp.diff(p_s, xs) + adv_x) == 0
        assert sp.simplify(sp.diff(p_s, ys) + adv_y) == 0

        state = taylor_green_state(grid64)
        p = pressure_recover(state, None, ModelParams(a=0.0, beta=0.3))
        x, y = grid64.coordinates()
        expected = -0.25 * (np.cos(2 * TWO_PI * x) + np.cos(2 * TWO_PI * y))
        np.testing.assert_allclose(p.values, expected, atol=1e-10)
        assert abs(p.values.mean()) < 1e-13

    def test_mean_free_always(self, grid32):
        state = smooth_state(grid32, 9)
        p = pressure_recover(state, None, ModelParams(a=1.0, beta=0.3, delta1=1.0))
        assert abs(p.spectrum[0, 0]) == 0.0

    def test_unprojected_momentum_residual_closes(self, grid32):
        # dv + (v.grad)v + grad p - lap v - 2a div S - f ~ 0
        state = smooth_state(grid32, 10)
        params = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5)
        rng = np.random.default_rng(11)
        f = random_velocity(grid32, rng, amplitude=0.3)
        dv = momentum_rhs(state, f, params)
        p = pressure_recover(state, f, params)

        g = grid32
        md = g.dealias
        sx, sy = state.v.x.spectrum, state.v.y.spectrum
        ux, uy = g.inverse(md(sx)), g.inverse(md(sy))
        gxx, gxy = g.inverse(g.ddx(md(sx))), g.inverse(g.ddy(md(sx)))
        gyx, gyy = g.inverse(g.ddx(md(sy))), g.inverse(g.ddy(md(sy)))
        adv_x = md(g.forward(ux * gxx + uy * gxy))
        adv_y = md(g.forward(ux * gyx + uy * gyy))

        from visco2d.constitutive import stress_S_components

        b11, b12, b22 = (g.inverse(md(c.spectrum)) for c in state.B.components)
        s11, s12, s22 = stress_S_components(b11, b12, b22, params.beta)
        sh = [md(g.forward(c)) for c in (s11, s12, s22)]
        div_s_x = g.ddx(sh[0]) + g.ddy(sh[1])
        div_s_y = g.ddx(sh[1]) + g.ddy(sh[2])

        gp_x, gp_y = g.ddx(p.spectrum), g.ddy(p.spectrum)
        res_x = (dv.x.spectrum + adv_x + gp_x - g.lap(sx)
                 - 2 * params.a * div_s_x - f.x.spectrum)
        res_y = (dv.y.spectrum + adv_y + gp_y - g.lap(sy)
                 - 2 * params.a * div_s_y - f.y.spectrum)
        scale = np.abs(sx).max() + np.abs(adv_x).max()
        assert np.abs(res_x).max() <= 1e-10 * scale
        assert np.abs(res_y).max() <= 1e-10 * scale


class TestEnergyIdentity:
    @pytest.mark.parametrize("eps", [0.0, 1e-3, 0.05])
    def test_semi_discrete_energy_pairing(self, grid64, eps):
        # (dv, v) + (dB, J) = -[2||D||^2 + (grad B, grad J) + (rho R, J)]
        state = smooth_state(grid64, 12, v_amp=0.5, b_amp=0.2, kmax=3)
        params = ModelParams(a=1.0, beta=0.3, delta1=1.0, delta2=0.5, epsilon=eps)
        dv = momentum_rhs_regularized(state, None, params)
        dB = tensor_rhs_regularized(state, params)
        J = conjugate_J(state.B, params)
        v = state.v

        lhs = np.mean(dv.x.values * v.x.values + dv.y.values * v.y.values)
        lhs += np.mean(dB.b11.values * J.b11.values
                       + 2 * dB.b12.values * J.b12.values
                       + dB.b22.values * J.b22.values)

        D, _ = velocity_gradient_parts(v)
        d_sq = np.mean(D.b11.values**2 + 2 * D.b12.values**2 + D.b22.values**2)
        grad_pair = 0.0
        for bc, jc, weight in zip(state.B.components, J.components, (1.0, 2.0, 1.0)):
            gb = gradient(bc)
            gj = gradient(jc)
            for i in range(2):
                grad_pair += weight * np.mean(gb[i].values * gj[i].values)
        b11, b12, b22 = (c.values for c in state.B.components)
        rho = cutoff_rho_values(b11, b12, b22, eps)
        r11, r12, r22 = relax_R_components(b11, b12, b22, params.delta1, params.delta2)
        relax_pair = np.mean(rho * (r11 * J.b11.values + 2 * r12 * J.b12.values
                                    + r22 * J.b22.values))
        rhs = -(2 * d_sq + grad_pair + relax_pair)
        assert lhs == pytest.approx(rhs, rel=1e-8)


class TestGalerkinTruncation:
    def test_small_radius_keeps_low_modes_only(self, grid32):
        state = smooth_state(grid32, 13)
        params = ModelParams(a=1.0, beta=0.3, delta1=1.0)
        tend = Tendency(dv=momentum_rhs(state, None, params),
                        dB=tensor_rhs(state, params))
        cut = galerkin_truncate_rhs(tend, 1)
        outside = ~grid32.ball_mask(1)
        for f in (cut.dv.x, cut.dv.y, *cut.dB.components):
            assert np.abs(f.spectrum[outside]).max() == 0.0

    def test_half_grid_radius_is_identity_on_dealiased_tendencies(self, grid32):
        state = smooth_state(grid32, 14)
        params = ModelParams(a=1.0, beta=0.3, delta1=1.0)
        tend = Tendency(dv=momentum_rhs(state, None, params),
                        dB=tensor_rhs(state, params))
        cut = galerkin_truncate_rhs(tend, grid32.N // 2)
        for a, b in zip((tend.dv.x, tend.dv.y, *tend.dB.components),
                        (cut.dv.x, cut.dv.y, *cut.dB.components)):
            scale = max(1.0, np.abs(a.spectrum).max())
            np.testing.assert_allclose(b.spectrum, a.spectrum, atol=1e-12 * scale)


def test_regularize_initial_tensor_pointwise(grid32):
    b11 = np.full((32, 32), 2.0)
    b12 = np.zeros((32, 32))
    b22 = np.full((32, 32), 1.0)
    b22[3, 4] = 0.05  # lambda_min below the cutoff there
    B = SymTensorField.from_values(grid32, b11, b12, b22)
    out = regularize_initial_B(B, 0.1)
    assert out.b11.values[3, 4] == 1.0
    assert out.b22.values[3, 4] == 1.0
    assert out.b11.values[0, 0] == 2.0
    assert out.b22.values[0, 0] == 1.0
