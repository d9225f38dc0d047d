"""Semi-discrete right-hand sides of the coupled system.

The momentum tendency is the Leray projection of advection, diffusion,
the elastic coupling div(rho * S(B)) and forcing; the tensor tendency
combines diffusion, advection, the objective-derivative sources
a (D B + B D) + (W B - B W) and relaxation -R(B).

All quadratic and pointwise-nonlinear terms are formed in physical space
from dealiased spectra and the results are masked again (2/3 rule). The
cutoff weight rho is evaluated pointwise on the collocation grid; with
epsilon = 0 it is identically one, so a single code path serves both the
plain and the regularized systems, bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .config import ModelParams
from .constitutive import (
    cutoff_rho_values,
    relax_R_components,
    stress_S_components,
)
from .fields import ScalarField, State, SymTensorField, VelocityField, lambda_min_values
from .spectral import project_Pk, project_Qk


@dataclass(frozen=True)
class Tendency:
    """Time derivative of a state: divergence-free dv and symmetric dB."""

    dv: VelocityField
    dB: SymTensorField


class _Assembly:
    """Shared spectral pieces of one right-hand-side evaluation."""

    __slots__ = ("adv_vx", "adv_vy", "div_coup_x", "div_coup_y",
                 "fx", "fy", "dvx", "dvy", "db")


def _assemble(state: State, f: VelocityField | None, params: ModelParams,
              *, epsilon: float, dealias: bool = True,
              include_diffusion: bool = True) -> _Assembly:
    g = state.grid
    md = g.dealias if dealias else (lambda s: s)

    svx, svy = state.v.x.spectrum, state.v.y.spectrum
    sb = [c.spectrum for c in state.B.components]

    # Physical views for products, band-limited per the 2/3 rule.
    dvx_s, dvy_s = md(svx), md(svy)
    db_s = [md(s) for s in sb]
    ux, uy = g.inverse(dvx_s), g.inverse(dvy_s)
    b11, b12, b22 = (g.inverse(s) for s in db_s)

    gxx, gxy = g.inverse(g.ddx(dvx_s)), g.inverse(g.ddy(dvx_s))
    gyx, gyy = g.inverse(g.ddx(dvy_s)), g.inverse(g.ddy(dvy_s))
    d11, d22 = gxx, gyy
    d12 = 0.5 * (gxy + gyx)
    w = 0.5 * (gxy - gyx)

    adv_vx = ux * gxx + uy * gxy
    adv_vy = ux * gyx + uy * gyy
    adv_b = [ux * g.inverse(g.ddx(s)) + uy * g.inverse(g.ddy(s)) for s in db_s]

    rho = cutoff_rho_values(b11, b12, b22, epsilon)
    s11, s12, s22 = stress_S_components(b11, b12, b22, params.beta)
    r11, r12, r22 = relax_R_components(b11, b12, b22, params.delta1, params.delta2)

    # a (D B + B D) + (W B - B W), componentwise.
    a = params.a
    p11 = 2.0 * (d11 * b11 + d12 * b12)
    p12 = d12 * (b11 + b22) + b12 * (d11 + d22)
    p22 = 2.0 * (d12 * b12 + d22 * b22)
    q11 = 2.0 * w * b12
    q12 = w * (b22 - b11)
    q22 = -2.0 * w * b12
    src = (
        rho * (a * p11 + q11 - r11),
        rho * (a * p12 + q12 - r12),
        rho * (a * p22 + q22 - r22),
    )
    coup = (rho * s11, rho * s12, rho * s22)

    out = _Assembly()
    out.adv_vx = md(g.forward(adv_vx))
    out.adv_vy = md(g.forward(adv_vy))
    coup_h = [md(g.forward(c)) for c in coup]
    out.div_coup_x = g.ddx(coup_h[0]) + g.ddy(coup_h[1])
    out.div_coup_y = g.ddx(coup_h[1]) + g.ddy(coup_h[2])
    if f is not None:
        out.fx, out.fy = f.x.spectrum, f.y.spectrum
    else:
        out.fx = out.fy = 0.0

    two_a = 2.0 * params.a
    mom_x = -out.adv_vx + two_a * out.div_coup_x + out.fx
    mom_y = -out.adv_vy + two_a * out.div_coup_y + out.fy
    if include_diffusion:
        mom_x = mom_x + g.lap(svx)
        mom_y = mom_y + g.lap(svy)
    out.dvx, out.dvy = g.leray(mom_x, mom_y)

    out.db = []
    for c in range(3):
        tend = md(g.forward(src[c])) - md(g.forward(adv_b[c]))
        if include_diffusion:
            tend = tend + g.lap(sb[c])
        out.db.append(tend)
    return out


def momentum_rhs(state: State, f: VelocityField | None, params: ModelParams,
                 *, dealias: bool = True) -> VelocityField:
    """dv = P(-(v.grad)v + lap v + 2a div S(B) + f)."""
    parts = _assemble(state, f, params, epsilon=0.0, dealias=dealias)
    return VelocityField.from_spectra(state.grid, parts.dvx, parts.dvy, project=False)


def momentum_rhs_regularized(state: State, f: VelocityField | None,
                             params: ModelParams, *, dealias: bool = True) -> VelocityField:
    """As momentum_rhs with the coupling weighted by the eigenvalue cutoff."""
    parts = _assemble(state, f, params, epsilon=params.epsilon, dealias=dealias)
    return VelocityField.from_spectra(state.grid, parts.dvx, parts.dvy, project=False)


def tensor_rhs(state: State, params: ModelParams, *, dealias: bool = True) -> SymTensorField:
    """dB = lap B - (v.grad)B + a(DB + BD) + (WB - BW) - R(B)."""
    parts = _assemble(state, None, params, epsilon=0.0, dealias=dealias)
    return SymTensorField.from_spectra(state.grid, *parts.db)


def tensor_rhs_regularized(state: State, params: ModelParams,
                           *, dealias: bool = True) -> SymTensorField:
    """As tensor_rhs with every nonlinear source weighted by the cutoff.

    Advection and diffusion stay unweighted.
    """
    parts = _assemble(state, None, params, epsilon=params.epsilon, dealias=dealias)
    return SymTensorField.from_spectra(state.grid, *parts.db)


def explicit_tendency_spectra(state: State, f: VelocityField | None,
                              params: ModelParams, *, dealias: bool = True,
                              tensor_source: SymTensorField | None = None,
                              galerkin_k: int = 0):
    """Everything except diffusion, in spectral space, for the time stepper.

    The cutoff weight follows params.epsilon (one at zero). Returns the
    five tendency spectra (dvx, dvy, db11, db12, db22).
    """
    parts = _assemble(state, f, params, epsilon=params.epsilon,
                      dealias=dealias, include_diffusion=False)
    db = parts.db
    if tensor_source is not None:
        db = [d + c.spectrum for d, c in zip(db, tensor_source.components)]
    dvx, dvy = parts.dvx, parts.dvy
    if galerkin_k > 0:
        g = state.grid
        mask = g.ball_mask(galerkin_k)
        dvx = np.where(mask, dvx, 0.0)
        dvy = np.where(mask, dvy, 0.0)
        db = [np.where(mask, d, 0.0) for d in db]
    return dvx, dvy, db[0], db[1], db[2]


def pressure_recover(state: State, f: VelocityField | None, params: ModelParams,
                     *, dealias: bool = True) -> ScalarField:
    """Zero-mean pressure solving -lap p = div[(v.grad)v - 2a div(rho S) - f].

    Built from the same masked spectral pieces as the momentum tendency,
    so dv + (v.grad)v + grad p - lap v - 2a div(rho S) - f vanishes to
    rounding when dv comes from the matching momentum RHS. The coupling
    weight follows params.epsilon.
    """
    g = state.grid
    parts = _assemble(state, f, params, epsilon=params.epsilon, dealias=dealias)
    two_a = 2.0 * params.a
    xx = parts.adv_vx - two_a * parts.div_coup_x - parts.fx
    xy = parts.adv_vy - two_a * parts.div_coup_y - parts.fy
    rhs = g.ddx(xx) + g.ddy(xy)
    return ScalarField.from_spectrum(g, g.inv_neg_lap(rhs))


def galerkin_truncate_rhs(tendency: Tendency, k: int) -> Tendency:
    """Project a tendency onto the Galerkin space of modes |n| <= k."""
    dvx, dvy = project_Pk(tendency.dv.x, tendency.dv.y, k)
    db = project_Qk(tendency.dB.components, k)
    return Tendency(dv=VelocityField(dvx, dvy), dB=SymTensorField(*db))


def regularize_initial_B(B: SymTensorField, epsilon: float) -> SymTensorField:
    """Replace B by the identity wherever its minimal eigenvalue <= epsilon."""
    if epsilon <= 0.0:
        return B
    b11, b12, b22 = (c.values for c in B.components)
    keep = lambda_min_values(b11, b12, b22) > epsilon
    return SymTensorField.from_values(
        B.grid,
        np.where(keep, b11, 1.0),
        np.where(keep, b12, 0.0),
        np.where(keep, b22, 1.0),
    )
