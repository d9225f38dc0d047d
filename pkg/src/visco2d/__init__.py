"""Pseudospectral solver and verification harness for two-dimensional
viscoelastic rate-type flows with stress diffusion on the periodic torus."""

from .config import ModelParams, RunConfig, ValidatedConfig, validate
from .fields import State, SymTensorField, VelocityField
from .spectral import ScalarField, SpectralGrid
from .timeloop import StepperOptions, integrate, step

__version__ = "0.1.0"

__all__ = [
    "ModelParams", "RunConfig", "ValidatedConfig", "validate",
    "State", "SymTensorField", "VelocityField",
    "ScalarField", "SpectralGrid",
    "StepperOptions", "integrate", "step",
    "__version__",
]
