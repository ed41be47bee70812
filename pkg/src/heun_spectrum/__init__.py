"""Spectrum of a charged particle in a quadrupole field plus a planar oscillator.

Exact polynomial (quasi-exactly solvable) solutions come from ``frobenius``,
variational spectra from ``ritz``, an independent finite-volume check from
``oracle`` and curve-level diagnostics from ``analysis``.
"""
from heun_spectrum.model import PhysicalParams, ScaledModel, alpha_from_token, scale, unscale_energy
from heun_spectrum.frobenius import truncation_solutions, polynomial_wavefunction
from heun_spectrum.ritz import PrecisionError, RitzResult
from heun_spectrum.oracle import GridSpec, fd_spectrum

__all__ = [
    "PhysicalParams",
    "ScaledModel",
    "alpha_from_token",
    "scale",
    "unscale_energy",
    "truncation_solutions",
    "polynomial_wavefunction",
    "PrecisionError",
    "RitzResult",
    "GridSpec",
    "fd_spectrum",
]
__version__ = "0.1.0"
