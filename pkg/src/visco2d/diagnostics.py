"""Per-step scalar diagnostics: energies, dissipation, eigenvalue floor,
norm ladder, the Gronwall weight and the regularized energy audit.

Quadrature is the collocation mean (domain area 1). The H^1 norm is the
full norm ||u||^2 + ||grad u||^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import ModelParams
from .constitutive import (
    NonPositiveDeterminantError,
    NonSPDError,
    cutoff_rho_values,
    dissipation_terms,
    free_energy_values,
)
from .fields import ScalarField, State, SymTensorField, VelocityField, eigen_minmax
from .spectral import gradient

CSV_COLUMNS = (
    "t", "kinetic", "elastic", "dissipation", "power_in", "energy_residual",
    "lambda_min", "norm_v", "norm_gradv", "norm_B", "norm_gradB",
    "norm_B_l4", "gronwall_g", "eps_gap",
)


@dataclass
class DiagnosticsRecord:
    t: float
    kinetic: float
    elastic: float
    dissipation: float
    power_in: float
    lambda_min: float
    norm_v: float
    norm_gradv: float
    norm_B: float
    norm_gradB: float
    norm_B_l4: float
    gronwall_g: float
    energy_residual: float = 0.0
    eps_gap: float = 0.0
    # regularized-audit integrand; carried in memory, not written to CSV
    eps_integrand: float = 0.0
    spd: bool = True

    def row(self) -> tuple[float, ...]:
        return tuple(getattr(self, name) for name in CSV_COLUMNS)


def _mean(arr: np.ndarray) -> float:
    return float(arr.mean())


def _grad_sq_sum(f: ScalarField) -> np.ndarray:
    gx, gy = gradient(f)
    return gx.values**2 + gy.values**2


def _velocity_norms(v: VelocityField) -> tuple[float, float]:
    sq = v.x.values**2 + v.y.values**2
    grad_sq = _grad_sq_sum(v.x) + _grad_sq_sum(v.y)
    return math.sqrt(_mean(sq)), math.sqrt(_mean(grad_sq))


def _tensor_norms(B: SymTensorField) -> tuple[float, float, float]:
    b11, b12, b22 = (c.values for c in B.components)
    frob_sq = b11**2 + 2.0 * b12**2 + b22**2
    grad_sq = (_grad_sq_sum(B.b11) + 2.0 * _grad_sq_sum(B.b12) + _grad_sq_sum(B.b22))
    return (
        math.sqrt(_mean(frob_sq)),
        math.sqrt(_mean(grad_sq)),
        _mean(frob_sq**2) ** 0.25,
    )


def gronwall_g(state: State) -> float:
    """Uniqueness-estimate weight 1 + ||v||^2 + ||grad v||^2 + ||B||_4^4 + ||grad B||^2."""
    nv, ngv = _velocity_norms(state.v)
    _, ngB, nB4 = _tensor_norms(state.B)
    return 1.0 + nv**2 + ngv**2 + nB4**4 + ngB**2


def record(state: State, f: VelocityField | None, params: ModelParams,
           *, abort_on_nonspd: bool = False) -> DiagnosticsRecord:
    """Compute every instantaneous diagnostic of a state.

    Loss of positivity is reported, not fatal: the elastic energy and
    dissipation become NaN sentinels and the run may continue, unless
    abort_on_nonspd is set.
    """
    v, B = state.v, state.B
    nv, ngv = _velocity_norms(v)
    nB, ngB, nB4 = _tensor_norms(B)
    lam_min_field, _ = eigen_minmax(B)
    lam_min = float(lam_min_field.values.min())

    kinetic = 0.5 * _mean(v.x.values**2 + v.y.values**2)
    if f is not None:
        power_in = _mean(f.x.values * v.x.values + f.y.values * v.y.values)
    else:
        power_in = 0.0

    elastic = math.nan
    dissipation = math.nan
    eps_integrand = math.nan
    spd = True
    try:
        b11, b12, b22 = (c.values for c in B.components)
        elastic = _mean(free_energy_values(b11, b12, b22, params.beta))
        terms = dissipation_terms(v, B, params)
        relax = terms["relax_sqrt"] + terms["relax_cube"] + terms["relax_dist"]
        dissipation = _mean(terms["viscous"] + terms["grad_whitened"]
                            + terms["grad_plain"] + relax)
        if params.epsilon > 0.0:
            rho = cutoff_rho_values(b11, b12, b22, params.epsilon)
            eps_integrand = ngv**2 + _mean(
                terms["grad_whitened"] + terms["grad_plain"] + rho * relax
            )
        else:
            eps_integrand = 0.0
    except (NonPositiveDeterminantError, NonSPDError):
        if abort_on_nonspd:
            raise
        spd = False

    return DiagnosticsRecord(
        t=state.t, kinetic=kinetic, elastic=elastic, dissipation=dissipation,
        power_in=power_in, lambda_min=lam_min, norm_v=nv, norm_gradv=ngv,
        norm_B=nB, norm_gradB=ngB, norm_B_l4=nB4,
        gronwall_g=1.0 + nv**2 + ngv**2 + nB4**4 + ngB**2,
        eps_integrand=eps_integrand, spd=spd,
    )


class RecordPipeline:
    """Fills the windowed entries of a record stream.

    ``energy_residual`` is the per-interval budget defect against the
    previous record; ``eps_gap`` is the cumulative defect of the
    regularized energy identity since the first record.
    """

    def __init__(self, params: ModelParams):
        self.params = params
        self._prev: DiagnosticsRecord | None = None
        self._first: DiagnosticsRecord | None = None
        self._cum_integrand = 0.0
        self._cum_power = 0.0

    def push(self, rec: DiagnosticsRecord) -> DiagnosticsRecord:
        prev = self._prev
        if self._first is None:
            self._first = rec
        if prev is not None:
            dt = rec.t - prev.t
            flux = 0.5 * dt * ((rec.dissipation - rec.power_in)
                               + (prev.dissipation - prev.power_in))
            rec.energy_residual = (rec.kinetic + rec.elastic
                                   - prev.kinetic - prev.elastic) + flux
            if self.params.epsilon > 0.0:
                self._cum_integrand += 0.5 * dt * (rec.eps_integrand + prev.eps_integrand)
                self._cum_power += 0.5 * dt * (rec.power_in + prev.power_in)
                first = self._first
                rec.eps_gap = ((rec.kinetic + rec.elastic)
                               - (first.kinetic + first.elastic)
                               + self._cum_integrand - self._cum_power)
        self._prev = rec
        return rec


def energy_residual(records) -> tuple[np.ndarray, np.ndarray]:
    """Per-interval budget residuals, absolute and relative.

    residual_k = [E(t_k) - E(t_k-1)] + trapezoid of (dissipation - power),
    E = kinetic + elastic. The relative value is scaled by E(t_k-1) plus
    the dissipated amount on the interval.
    """
    if len(records) < 2:
        raise ValueError("need at least two records")
    abs_res = np.empty(len(records) - 1)
    rel_res = np.empty(len(records) - 1)
    for k in range(1, len(records)):
        a, b = records[k - 1], records[k]
        dt = b.t - a.t
        flux = 0.5 * dt * ((b.dissipation - b.power_in) + (a.dissipation - a.power_in))
        res = (b.kinetic + b.elastic) - (a.kinetic + a.elastic) + flux
        scale = abs(a.kinetic + a.elastic) + abs(0.5 * dt * (a.dissipation + b.dissipation))
        abs_res[k - 1] = res
        rel_res[k - 1] = res / scale if scale > 0 else res
    return abs_res, rel_res


def energy_residual_window(records) -> tuple[float, float]:
    """Budget residual over the whole record window, absolute and relative."""
    if len(records) < 2:
        raise ValueError("need at least two records")
    t = np.array([r.t for r in records])
    diss = np.array([r.dissipation for r in records])
    power = np.array([r.power_in for r in records])
    first, last = records[0], records[-1]
    flux = float(np.trapezoid(diss - power, t))
    res = (last.kinetic + last.elastic) - (first.kinetic + first.elastic) + flux
    scale = abs(first.kinetic + first.elastic) + abs(float(np.trapezoid(diss, t)))
    return res, res / scale if scale > 0 else res


def eps_energy_audit(records, params: ModelParams) -> tuple[np.ndarray, np.ndarray]:
    """Cumulative defect of the regularized energy identity per record.

    Left side minus right side of the identity, with the relaxation terms
    weighted by the eigenvalue cutoff; both the absolute series and a
    relative one (scaled by the initial energy plus everything dissipated
    and injected so far).
    """
    if params.epsilon <= 0.0:
        raise ValueError("the audit applies to regularized runs (epsilon > 0)")
    t = np.array([r.t for r in records])
    integrand = np.array([r.eps_integrand for r in records])
    power = np.array([r.power_in for r in records])
    energy = np.array([r.kinetic + r.elastic for r in records])
    gaps = np.zeros(len(records))
    rels = np.zeros(len(records))
    cum_i = 0.0
    cum_p = 0.0
    for k in range(1, len(records)):
        dt = t[k] - t[k - 1]
        cum_i += 0.5 * dt * (integrand[k] + integrand[k - 1])
        cum_p += 0.5 * dt * (power[k] + power[k - 1])
        gaps[k] = energy[k] - energy[0] + cum_i - cum_p
        scale = abs(energy[0]) + abs(cum_i) + abs(cum_p)
        rels[k] = gaps[k] / scale if scale > 0 else gaps[k]
    return gaps, rels


def ladyzhenskaya_check(u) -> float:
    """Ratio ||u||_4^2 / (||u|| ||u||_H1); zero field maps to 0."""
    if isinstance(u, ScalarField):
        mag_sq = u.values**2
        grad_sq = _grad_sq_sum(u)
    elif isinstance(u, VelocityField):
        mag_sq = u.x.values**2 + u.y.values**2
        grad_sq = _grad_sq_sum(u.x) + _grad_sq_sum(u.y)
    else:
        raise TypeError(f"unsupported field type {type(u).__name__}")
    l2_sq = _mean(mag_sq)
    if l2_sq == 0.0:
        return 0.0
    l4_sq = math.sqrt(_mean(mag_sq**2))
    h1 = math.sqrt(l2_sq + _mean(grad_sq))
    return l4_sq / (math.sqrt(l2_sq) * h1)
