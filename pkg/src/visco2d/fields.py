"""State containers for the velocity and conformation tensor fields.

The conformation tensor is stored by its three independent components
(b11, b12, b22); symmetry is structural. Positive definiteness is
monitored through the eigenvalue fields, never enforced.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import ScalarField, SpectralGrid, gradient, leray_project


@dataclass(frozen=True)
class VelocityField:
    """Zero-mean, divergence-free 2-vector field.

    Constructors go through the Leray projection so the invariants hold in
    every spectral coefficient.
    """

    x: ScalarField
    y: ScalarField

    @property
    def grid(self) -> SpectralGrid:
        return self.x.grid

    @classmethod
    def from_values(cls, grid: SpectralGrid, vx, vy, project: bool = True) -> "VelocityField":
        fx = ScalarField.from_values(grid, vx)
        fy = ScalarField.from_values(grid, vy)
        if project:
            fx, fy = leray_project(fx, fy)
        return cls(fx, fy)

    @classmethod
    def from_spectra(cls, grid: SpectralGrid, sx, sy, project: bool = True) -> "VelocityField":
        fx = ScalarField.from_spectrum(grid, sx)
        fy = ScalarField.from_spectrum(grid, sy)
        if project:
            fx, fy = leray_project(fx, fy)
        return cls(fx, fy)

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "VelocityField":
        return cls(ScalarField.zeros(grid), ScalarField.zeros(grid))

    def projected(self) -> "VelocityField":
        return VelocityField(*leray_project(self.x, self.y))

    def max_speed(self) -> float:
        return float(np.sqrt(self.x.values**2 + self.y.values**2).max())


@dataclass(frozen=True)
class SymTensorField:
    """Symmetric 2x2 tensor field stored as (b11, b12, b22)."""

    b11: ScalarField
    b12: ScalarField
    b22: ScalarField

    @property
    def grid(self) -> SpectralGrid:
        return self.b11.grid

    @property
    def components(self) -> tuple[ScalarField, ScalarField, ScalarField]:
        return self.b11, self.b12, self.b22

    @classmethod
    def from_values(cls, grid: SpectralGrid, b11, b12, b22) -> "SymTensorField":
        return cls(
            ScalarField.from_values(grid, b11),
            ScalarField.from_values(grid, b12),
            ScalarField.from_values(grid, b22),
        )

    @classmethod
    def from_spectra(cls, grid: SpectralGrid, s11, s12, s22) -> "SymTensorField":
        return cls(
            ScalarField.from_spectrum(grid, s11),
            ScalarField.from_spectrum(grid, s12),
            ScalarField.from_spectrum(grid, s22),
        )

    @classmethod
    def identity(cls, grid: SpectralGrid) -> "SymTensorField":
        one = np.ones((grid.N, grid.N))
        zero = np.zeros((grid.N, grid.N))
        return cls.from_values(grid, one, zero, one)


@dataclass(frozen=True)
class EFGView:
    """Eigen-coordinates of a symmetric tensor field.

    e = (b11 - b22)/2, f = b12, g = b11 + b22 (trace). The eigenvalues of
    the tensor are g/2 +- sqrt(e^2 + f^2).
    """

    e: np.ndarray
    f: np.ndarray
    g: np.ndarray


@dataclass(frozen=True)
class State:
    """Solver state (t, v, B) on a single grid."""

    t: float
    v: VelocityField
    B: SymTensorField

    @property
    def grid(self) -> SpectralGrid:
        return self.v.grid

    def __post_init__(self) -> None:
        if self.v.grid.N != self.B.grid.N:
            raise ValueError("velocity and tensor live on different grids")


def velocity_gradient_parts(v: VelocityField) -> tuple[SymTensorField, ScalarField]:
    """Split grad(v) into its symmetric part D and spin scalar w = W_12.

    Uses the convention (grad v)_ij = d_j v_i, so for v = (sin(2 pi y), 0)
    the off-diagonal of D and w are both pi*cos(2 pi y).
    """
    g = v.grid
    ux, uy = gradient(v.x)
    vx, vy = gradient(v.y)
    d11 = ux
    d12 = ScalarField.from_spectrum(g, 0.5 * (uy.spectrum + vx.spectrum))
    d22 = vy
    w = ScalarField.from_spectrum(g, 0.5 * (uy.spectrum - vx.spectrum))
    return SymTensorField(d11, d12, d22), w


def to_efg(B: SymTensorField) -> EFGView:
    b11, b12, b22 = (c.values for c in B.components)
    return EFGView(e=(b11 - b22) / 2.0, f=b12.copy(), g=b11 + b22)


def from_efg(view: EFGView, grid: SpectralGrid) -> SymTensorField:
    half_g = view.g / 2.0
    return SymTensorField.from_values(
        grid, half_g + view.e, view.f.copy(), half_g - view.e
    )


def eigen_minmax(B: SymTensorField) -> tuple[ScalarField, ScalarField]:
    """Pointwise minimal and maximal eigenvalue fields of B."""
    view = to_efg(B)
    radius = np.sqrt(view.e**2 + view.f**2)
    half_g = view.g / 2.0
    grid = B.grid
    return (
        ScalarField.from_values(grid, half_g - radius),
        ScalarField.from_values(grid, half_g + radius),
    )


def lambda_min_values(b11: np.ndarray, b12: np.ndarray, b22: np.ndarray) -> np.ndarray:
    """Minimal eigenvalue on raw component arrays (any common shape)."""
    return 0.5 * (b11 + b22) - np.sqrt(0.25 * (b11 - b22) ** 2 + b12**2)
