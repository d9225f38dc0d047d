"""Fourier calculus on the unit torus [0,1)^2.

Conventions, fixed once and relied on by every diagnostic:

* forward transform is unnormalized (``numpy.fft.fft2``), the inverse
  divides by N^2, so a constant field c has spectrum c*N^2 at mode (0,0);
* the integer mode lattice is {-N/2+1, ..., N/2}^2 with the Nyquist line
  labelled +N/2;
* physical wavenumbers carry the 2*pi factor (period-1 domain);
* odd derivatives zero the Nyquist line (sign-ambiguous there), the
  Laplacian keeps it;
* the 2/3 dealias rule is applied per axis: modes with
  max(|n1|, |n2|) > N/3 are removed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class SizeMismatchError(ValueError):
    """Array shape does not match the grid."""


@dataclass(frozen=True)
class SpectralGrid:
    """Precomputed wavenumber tables for an N x N collocation grid.

    Axis 0 of every array is x1, axis 1 is x2 ('ij' indexing). Instances
    are immutable and safe to share between concurrently evaluated states.
    """

    N: int

    def __post_init__(self) -> None:
        N = self.N
        if N < 8 or N % 2 != 0:
            raise ValueError(f"grid size must be an even integer >= 8, got {N}")

        n = np.fft.fftfreq(N, 1.0 / N).astype(np.float64)
        n[N // 2] = N // 2  # label Nyquist as +N/2
        n1 = n.reshape(N, 1)
        n2 = n.reshape(1, N)

        two_pi = 2.0 * np.pi
        k2 = (two_pi**2) * (n1**2 + n2**2)
        inv_k2 = np.zeros_like(k2)
        inv_k2[k2 > 0] = 1.0 / k2[k2 > 0]

        # Odd-derivative multipliers, Nyquist zeroed.
        nd = n.copy()
        nd[N // 2] = 0.0
        ikx = (1j * two_pi * nd).reshape(N, 1) + np.zeros((1, N))
        iky = (1j * two_pi * nd).reshape(1, N) + np.zeros((N, 1))

        cut = N // 3
        dealias_mask = (np.abs(n1) <= cut) & (np.abs(n2) <= cut)

        # Leray projector per mode: v -> v - n (n.v)/|n|^2, mode 0 -> 0.
        # The Nyquist lines are zeroed as well: the projection matrix is
        # not conjugate-symmetric there and odd derivatives ignore them.
        nsq = n1**2 + n2**2
        keep = (np.abs(n1) < N // 2) & (np.abs(n2) < N // 2) & (nsq > 0)
        with np.errstate(divide="ignore", invalid="ignore"):
            p11 = np.where(keep, 1.0 - n1 * n1 / nsq, 0.0)
            p12 = np.where(keep, -n1 * n2 / nsq, 0.0)
            p22 = np.where(keep, 1.0 - n2 * n2 / nsq, 0.0)

        for name, val in (
            ("n1", n1), ("n2", n2), ("k2", k2), ("inv_k2", inv_k2),
            ("ikx", ikx), ("iky", iky), ("dealias_mask", dealias_mask),
            ("leray_11", p11), ("leray_12", p12), ("leray_22", p22),
        ):
            val.setflags(write=False)
            object.__setattr__(self, "_" + name, val)

    # -- derived tables ---------------------------------------------------

    @property
    def k2(self) -> np.ndarray:
        """-Laplacian symbol 4*pi^2*|n|^2 per mode."""
        return self._k2

    @property
    def dealias_mask(self) -> np.ndarray:
        return self._dealias_mask

    @property
    def modes(self) -> tuple[np.ndarray, np.ndarray]:
        """Integer lattice (n1, n2) as broadcastable arrays."""
        return self._n1, self._n2

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Collocation nodes x1[i,j], x2[i,j] on [0,1)^2."""
        x = np.arange(self.N) / self.N
        return np.meshgrid(x, x, indexing="ij")

    def ball_mask(self, k: int) -> np.ndarray:
        """Boolean mask of modes with Euclidean |n| <= k."""
        if k > self.N // 2:
            raise ValueError(f"truncation radius {k} exceeds N/2 = {self.N // 2}")
        n1, n2 = self._n1, self._n2
        return n1 * n1 + n2 * n2 <= float(k) ** 2

    # -- raw-array transforms and operators -------------------------------

    def check(self, arr: np.ndarray) -> None:
        if arr.shape != (self.N, self.N):
            raise SizeMismatchError(
                f"expected shape {(self.N, self.N)}, got {arr.shape}"
            )

    def forward(self, values: np.ndarray) -> np.ndarray:
        self.check(values)
        return np.fft.fft2(values)

    def inverse(self, spectrum: np.ndarray) -> np.ndarray:
        self.check(spectrum)
        return np.fft.ifft2(spectrum).real

    def ddx(self, spectrum: np.ndarray) -> np.ndarray:
        return self._ikx * spectrum

    def ddy(self, spectrum: np.ndarray) -> np.ndarray:
        return self._iky * spectrum

    def lap(self, spectrum: np.ndarray) -> np.ndarray:
        return -self._k2 * spectrum

    def inv_neg_lap(self, spectrum: np.ndarray) -> np.ndarray:
        """Solve -lap(u) = f for the zero-mean u, per mode."""
        return self._inv_k2 * spectrum

    def dealias(self, spectrum: np.ndarray) -> np.ndarray:
        return np.where(self._dealias_mask, spectrum, 0.0)

    def leray(self, sx: np.ndarray, sy: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        px = self._leray_11 * sx + self._leray_12 * sy
        py = self._leray_12 * sx + self._leray_22 * sy
        return px, py

    def lowpass(self, spectrum: np.ndarray, k: int) -> np.ndarray:
        return np.where(self.ball_mask(k), spectrum, 0.0)


class ScalarField:
    """A real field with lazily synchronized physical and spectral views.

    Exactly one view is supplied at construction; the other is computed on
    first access and cached. Instances are treated as immutable.
    """

    __slots__ = ("grid", "_values", "_spectrum")

    def __init__(self, grid: SpectralGrid, *, values=None, spectrum=None):
        if (values is None) == (spectrum is None):
            raise ValueError("provide exactly one of values or spectrum")
        if values is not None:
            values = np.asarray(values, dtype=np.float64)
            grid.check(values)
        if spectrum is not None:
            spectrum = np.asarray(spectrum, dtype=np.complex128)
            grid.check(spectrum)
        self.grid = grid
        self._values = values
        self._spectrum = spectrum

    @classmethod
    def from_values(cls, grid: SpectralGrid, values) -> "ScalarField":
        return cls(grid, values=values)

    @classmethod
    def from_spectrum(cls, grid: SpectralGrid, spectrum) -> "ScalarField":
        return cls(grid, spectrum=spectrum)

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "ScalarField":
        return cls(grid, values=np.zeros((grid.N, grid.N)))

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            self._values = self.grid.inverse(self._spectrum)
        return self._values

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = self.grid.forward(self._values)
        return self._spectrum


def gradient(f: ScalarField) -> tuple[ScalarField, ScalarField]:
    g = f.grid
    return (
        ScalarField.from_spectrum(g, g.ddx(f.spectrum)),
        ScalarField.from_spectrum(g, g.ddy(f.spectrum)),
    )


def divergence(fx: ScalarField, fy: ScalarField) -> ScalarField:
    g = fx.grid
    return ScalarField.from_spectrum(g, g.ddx(fx.spectrum) + g.ddy(fy.spectrum))


def laplacian(f: ScalarField) -> ScalarField:
    return ScalarField.from_spectrum(f.grid, f.grid.lap(f.spectrum))


def leray_project(fx: ScalarField, fy: ScalarField) -> tuple[ScalarField, ScalarField]:
    """Project a 2-vector field onto zero-mean divergence-free fields."""
    g = fx.grid
    px, py = g.leray(fx.spectrum, fy.spectrum)
    return ScalarField.from_spectrum(g, px), ScalarField.from_spectrum(g, py)


def dealias(f: ScalarField) -> ScalarField:
    return ScalarField.from_spectrum(f.grid, f.grid.dealias(f.spectrum))


def project_Pk(fx: ScalarField, fy: ScalarField, k: int) -> tuple[ScalarField, ScalarField]:
    """Galerkin velocity truncation: Leray projection then |n| <= k cutoff."""
    g = fx.grid
    px, py = g.leray(fx.spectrum, fy.spectrum)
    mask = g.ball_mask(k)
    return (
        ScalarField.from_spectrum(g, np.where(mask, px, 0.0)),
        ScalarField.from_spectrum(g, np.where(mask, py, 0.0)),
    )


def project_Qk(components: tuple[ScalarField, ...], k: int) -> tuple[ScalarField, ...]:
    """Galerkin tensor truncation, applied componentwise.

    Componentwise truncation preserves symmetry of a tensor stored by its
    independent components.
    """
    g = components[0].grid
    mask = g.ball_mask(k)
    return tuple(
        ScalarField.from_spectrum(g, np.where(mask, c.spectrum, 0.0))
        for c in components
    )
