"""Numerical laboratory for large-time asymptotics of fractional drift-diffusion.

Subpackages follow the pipeline: ``grid`` (spectral discretization),
``kernels`` (fundamental solutions), ``riesz`` (the drift field), ``solver``
(mild-solution time stepping), ``functionals`` (norms, moments, coefficient
accumulators), ``corrections`` (self-similar correction fields), ``verifier``
(expansion assembly and decay-rate fits), ``harness`` (scenario CLI).
"""

from .grid import (GridSpec, SpectralField, Multiplier, apply_multiplier,
                   dealiased_product, read_snapshot, write_snapshot)
from .kernels import KernelHandle, poisson_closed_form, sample_kernel
from .riesz import riesz_gradient

__all__ = [
    "GridSpec", "SpectralField", "Multiplier", "apply_multiplier",
    "dealiased_product", "read_snapshot", "write_snapshot",
    "KernelHandle", "poisson_closed_form", "sample_kernel", "riesz_gradient",
]

__version__ = "0.1.0"
