"""Pointwise closures of the model.

Everything here is algebra on 2x2 symmetric matrices carried as component
triples (m11, m12, m22), evaluated on whole arrays at once. |A| always
denotes the Frobenius norm. The square root of an SPD matrix uses the
closed form sqrt(B) = (B + sqrt(det B) I) / sqrt(tr B + 2 sqrt(det B)).
"""

from __future__ import annotations

import numpy as np

from .config import ModelParams
from .fields import ScalarField, SymTensorField, VelocityField, lambda_min_values, velocity_gradient_parts
from .spectral import gradient


class NonPositiveDeterminantError(ValueError):
    """det(B) <= 0 somewhere; the free energy is undefined there."""

    def __init__(self, location, value):
        self.location = tuple(int(i) for i in location)
        self.value = float(value)
        super().__init__(f"det(B) = {value:.6g} at grid index {self.location}")


class NonSPDError(ValueError):
    """B is not positive definite somewhere; B^(+-1/2) is undefined there."""

    def __init__(self, location, value):
        self.location = tuple(int(i) for i in location)
        self.value = float(value)
        super().__init__(f"lambda_min(B) = {value:.6g} at grid index {self.location}")


class SingularError(ValueError):
    """B is singular somewhere; B^-1 is undefined there."""


Triple = tuple[np.ndarray, np.ndarray, np.ndarray]


# -- component-level 2x2 algebra -------------------------------------------

def sym_square(b11, b12, b22) -> Triple:
    return b11 * b11 + b12 * b12, b12 * (b11 + b22), b22 * b22 + b12 * b12


def sym_det(b11, b12, b22) -> np.ndarray:
    return b11 * b22 - b12 * b12


def sym_frobenius_sq(b11, b12, b22) -> np.ndarray:
    return b11 * b11 + 2.0 * b12 * b12 + b22 * b22


def sym_inverse(b11, b12, b22) -> Triple:
    det = sym_det(b11, b12, b22)
    if np.any(det == 0.0):
        loc = np.unravel_index(int(np.argmin(np.abs(det))), det.shape)
        raise SingularError(f"det(B) = 0 at grid index {tuple(int(i) for i in loc)}")
    return b22 / det, -b12 / det, b11 / det


def sym_sqrt_spd(b11, b12, b22) -> Triple:
    """Symmetric square root; callers must ensure positive definiteness."""
    root_det = np.sqrt(sym_det(b11, b12, b22))
    scale = 1.0 / np.sqrt(b11 + b22 + 2.0 * root_det)
    return (b11 + root_det) * scale, b12 * scale, (b22 + root_det) * scale


def sym_mul_commuting(a11, a12, a22, c11, c12, c22) -> Triple:
    """Product of two symmetric matrices that commute (shared eigenbasis)."""
    return (
        a11 * c11 + a12 * c12,
        a11 * c12 + a12 * c22,
        a12 * c12 + a22 * c22,
    )


def _require_spd(b11, b12, b22) -> np.ndarray:
    lam = lambda_min_values(b11, b12, b22)
    if np.any(lam <= 0.0):
        loc = np.unravel_index(int(np.argmin(lam)), lam.shape)
        raise NonSPDError(loc, lam[loc])
    return lam


def stress_S_components(b11, b12, b22, beta: float) -> Triple:
    """(1-beta)(B - I) + beta (B^2 - B), componentwise."""
    q11, q12, q22 = sym_square(b11, b12, b22)
    lin = 1.0 - 2.0 * beta
    return (
        lin * b11 + beta * q11 - (1.0 - beta),
        lin * b12 + beta * q12,
        lin * b22 + beta * q22 - (1.0 - beta),
    )


def relax_R_components(b11, b12, b22, delta1: float, delta2: float) -> Triple:
    """delta1 (B - I) + delta2 (B^2 - B), componentwise."""
    q11, q12, q22 = sym_square(b11, b12, b22)
    lin = delta1 - delta2
    return (
        lin * b11 + delta2 * q11 - delta1,
        lin * b12 + delta2 * q12,
        lin * b22 + delta2 * q22 - delta1,
    )


def conjugate_J_components(b11, b12, b22, beta: float) -> Triple:
    i11, i12, i22 = sym_inverse(b11, b12, b22)
    return (
        (1.0 - beta) * (1.0 - i11) + beta * (b11 - 1.0),
        -(1.0 - beta) * i12 + beta * b12,
        (1.0 - beta) * (1.0 - i22) + beta * (b22 - 1.0),
    )


def free_energy_values(b11, b12, b22, beta: float) -> np.ndarray:
    det = sym_det(b11, b12, b22)
    if np.any(det <= 0.0):
        loc = np.unravel_index(int(np.argmin(det)), det.shape)
        raise NonPositiveDeterminantError(loc, det[loc])
    trace = b11 + b22
    dist_sq = (b11 - 1.0) ** 2 + 2.0 * b12**2 + (b22 - 1.0) ** 2
    return (1.0 - beta) * (trace - 2.0 - np.log(det)) + 0.5 * beta * dist_sq


def cutoff_rho_values(b11, b12, b22, epsilon: float) -> np.ndarray:
    """Eigenvalue cutoff weight; identically 1 when epsilon == 0."""
    if epsilon == 0.0:
        return np.ones_like(np.asarray(b11, dtype=np.float64))
    lam = lambda_min_values(b11, b12, b22)
    norm = np.sqrt(sym_frobenius_sq(b11, b12, b22))
    active = lam > epsilon
    denom = np.where(active, lam * (1.0 + epsilon * norm**3), 1.0)
    return np.where(active, (lam - epsilon) / denom, 0.0)


# -- field-level operations -------------------------------------------------

def _vals(B: SymTensorField) -> Triple:
    return B.b11.values, B.b12.values, B.b22.values


def _tensor(grid, triple: Triple) -> SymTensorField:
    return SymTensorField.from_values(grid, *triple)


def stress_S(B: SymTensorField, params: ModelParams) -> SymTensorField:
    return _tensor(B.grid, stress_S_components(*_vals(B), params.beta))


def relax_R(B: SymTensorField, params: ModelParams) -> SymTensorField:
    return _tensor(B.grid, relax_R_components(*_vals(B), params.delta1, params.delta2))


def conjugate_J(B: SymTensorField, params: ModelParams) -> SymTensorField:
    return _tensor(B.grid, conjugate_J_components(*_vals(B), params.beta))


def cauchy_stress(v: VelocityField, p: ScalarField, B: SymTensorField,
                  params: ModelParams) -> SymTensorField:
    """T = -p I + 2 D(v) + 2 a S(B). Symmetric, returned by components."""
    D, _ = velocity_gradient_parts(v)
    s11, s12, s22 = stress_S_components(*_vals(B), params.beta)
    pv = p.values
    return _tensor(B.grid, (
        -pv + 2.0 * D.b11.values + 2.0 * params.a * s11,
        2.0 * D.b12.values + 2.0 * params.a * s12,
        -pv + 2.0 * D.b22.values + 2.0 * params.a * s22,
    ))


def free_energy_psi(B: SymTensorField, params: ModelParams) -> tuple[ScalarField, float]:
    """Elastic energy density and its integral (collocation mean, area 1)."""
    psi = free_energy_values(*_vals(B), params.beta)
    return ScalarField.from_values(B.grid, psi), float(psi.mean())


def cutoff_rho_eps(B: SymTensorField, epsilon: float) -> ScalarField:
    return ScalarField.from_values(B.grid, cutoff_rho_values(*_vals(B), epsilon))


def _tensor_gradients(B: SymTensorField) -> list[Triple]:
    """[(d_x B components), (d_y B components)] as value arrays."""
    grads = [gradient(c) for c in B.components]
    return [
        tuple(g[0].values for g in grads),
        tuple(g[1].values for g in grads),
    ]


def dissipation_terms(v: VelocityField, B: SymTensorField,
                      params: ModelParams) -> dict[str, np.ndarray]:
    """Coefficient-weighted pointwise pieces of the entropy production.

    Keys: viscous          2 |D(v)|^2
          grad_whitened    (1-beta) |B^-1/2 grad B B^-1/2|^2
          grad_plain       beta |grad B|^2
          relax_sqrt       (1-beta) d1 |B^1/2 - B^-1/2|^2
          relax_cube       beta d2 |B^3/2 - B^1/2|^2
          relax_dist       (beta d1 + (1-beta) d2) |B - I|^2
    The relaxation pieces come back unweighted by the eigenvalue cutoff;
    callers apply it where the regularized identity asks for it.
    """
    beta, d1, d2 = params.beta, params.delta1, params.delta2
    b11, b12, b22 = _vals(B)
    _require_spd(b11, b12, b22)

    D, _ = velocity_gradient_parts(v)
    viscous = 2.0 * sym_frobenius_sq(D.b11.values, D.b12.values, D.b22.values)

    r11, r12, r22 = sym_sqrt_spd(*sym_inverse(b11, b12, b22))  # B^(-1/2)
    whitened = np.zeros_like(b11)
    plain = np.zeros_like(b11)
    for db11, db12, db22 in _tensor_gradients(B):
        # G = B^(-1/2) (d_j B) B^(-1/2), built as R (dB R)
        t11, t12, t21, t22 = _full_mul_sym(db11, db12, db22, r11, r12, r22)
        g11 = r11 * t11 + r12 * t21
        g12 = r11 * t12 + r12 * t22
        g22 = r12 * t12 + r22 * t22
        whitened = whitened + (g11**2 + 2.0 * g12**2 + g22**2)
        plain = plain + sym_frobenius_sq(db11, db12, db22)

    s11, s12, s22 = sym_sqrt_spd(b11, b12, b22)  # B^(1/2)
    relax_sqrt = (1.0 - beta) * d1 * sym_frobenius_sq(s11 - r11, s12 - r12, s22 - r22)
    h11, h12, h22 = sym_mul_commuting(b11, b12, b22, s11, s12, s22)  # B^(3/2)
    relax_cube = beta * d2 * sym_frobenius_sq(h11 - s11, h12 - s12, h22 - s22)
    relax_dist = (beta * d1 + (1.0 - beta) * d2) * sym_frobenius_sq(
        b11 - 1.0, b12, b22 - 1.0
    )
    return {
        "viscous": viscous,
        "grad_whitened": (1.0 - beta) * whitened,
        "grad_plain": beta * plain,
        "relax_sqrt": relax_sqrt,
        "relax_cube": relax_cube,
        "relax_dist": relax_dist,
    }


def dissipation_xi(v: VelocityField, B: SymTensorField, params: ModelParams,
                   rho: np.ndarray | None = None) -> tuple[ScalarField, float]:
    """Entropy production density and its integral.

    With ``rho`` given, the three relaxation terms are weighted by it,
    matching the regularized energy identity; by default they are not.
    """
    terms = dissipation_terms(v, B, params)
    weight = 1.0 if rho is None else rho
    xi = (terms["viscous"] + terms["grad_whitened"] + terms["grad_plain"]
          + weight * (terms["relax_sqrt"] + terms["relax_cube"] + terms["relax_dist"]))
    return ScalarField.from_values(B.grid, xi), float(xi.mean())


def _full_mul_sym(a11, a12, a22, c11, c12, c22):
    """Entries of A C for symmetric A, C (result is not symmetric)."""
    t11 = a11 * c11 + a12 * c12
    t12 = a11 * c12 + a12 * c22
    t21 = a12 * c11 + a22 * c12
    t22 = a12 * c12 + a22 * c22
    return t11, t12, t21, t22
