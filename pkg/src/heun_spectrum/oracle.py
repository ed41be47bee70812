"""Finite-volume check of the radial spectrum, independent of the Ritz basis.

The operator -(1/xi)(xi R')' + (l^2/xi^2 - alpha/xi + xi^2) R is discretized in
flux form on the cell centres xi_i = (i + 1/2) h. The flux through xi = 0 vanishes
because the face weight is xi itself, so the origin needs no special treatment.
With the diagonal mass weights xi_i h the problem is a symmetric tridiagonal
pencil; scaling by the square root of the mass turns it into an ordinary
symmetric tridiagonal eigenproblem solved by Sturm-count bisection.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.linalg import solve_banded

from heun_spectrum import kernels
from heun_spectrum.model import ScaledModel

BOUNDARY_MASS_LIMIT = 1e-8
BOUNDARY_FRACTION = 0.1


class BoundaryError(ValueError):
    """An eigenfunction still carries weight near the outer Dirichlet wall."""


@dataclass(frozen=True)
class GridSpec:
    xi_max: float = 12.0
    npoints: int = 20000
    richardson: bool = True

    def __post_init__(self) -> None:
        if self.xi_max <= 0:
            raise ValueError("xi_max must be positive")
        if self.npoints < 10:
            raise ValueError("npoints must be at least 10")

    @property
    def h(self) -> float:
        return self.xi_max / self.npoints

    def nodes(self) -> np.ndarray:
        return (np.arange(self.npoints) + 0.5) * self.h

    def refined(self, factor: int = 2) -> "GridSpec":
        return GridSpec(self.xi_max, self.npoints * factor, self.richardson)


@dataclass(frozen=True)
class OracleEigenvalue:
    value: float
    error: Optional[float]
    coarse: float
    fine: Optional[float] = None


def tridiagonal_system(model: ScaledModel, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    """Diagonal and off-diagonal of the mass-symmetrized finite-volume operator."""
    n, h = grid.npoints, grid.h
    x = grid.nodes()
    faces = np.arange(1, n + 1) * h  # right face of each cell; faces[-1] = xi_max
    left = np.concatenate(([0.0], faces[:-1]))
    potential = model.l ** 2 / x ** 2 - model.alpha / x + x ** 2
    stiff = (left + faces) / h
    # Dirichlet wall at xi_max sits half a cell beyond the last centre
    stiff[-1] = left[-1] / h + faces[-1] / (h / 2)
    mass = x * h
    diag = stiff / mass + potential
    off = -(faces[:-1] / h) / np.sqrt(mass[:-1] * mass[1:])
    return np.ascontiguousarray(diag), np.ascontiguousarray(off)


def _eigenvalues(model: ScaledModel, grid: GridSpec, count: int, backend: str | None) -> np.ndarray:
    d, e = tridiagonal_system(model, grid)
    return kernels.tridiagonal_eigenvalues(d, e, 0, count - 1, 0.0, backend=backend)


def boundary_mass(model: ScaledModel, grid: GridSpec, eigenvalue: float) -> float:
    """Fraction of the normalized eigenfunction weight in the outer 10% of the box."""
    d, e = tridiagonal_system(model, grid)
    n = d.size
    shift = eigenvalue + 1e-9 * max(1.0, abs(eigenvalue))
    ab = np.zeros((3, n))
    ab[0, 1:] = e
    ab[1] = d - shift
    ab[2, :-1] = e
    y = np.ones(n)
    for _ in range(3):
        y = solve_banded((1, 1), ab, y)
        y /= np.linalg.norm(y)
    tail = grid.nodes() > (1.0 - BOUNDARY_FRACTION) * grid.xi_max
    return float(np.sum(y[tail] ** 2))


def fd_spectrum(model: ScaledModel, grid: GridSpec | None = None, count: int = 4,
                backend: str | None = None, check_boundary: bool = True) -> list[OracleEigenvalue]:
    """Lowest ``count`` eigenvalues; with Richardson, combined from npoints and 2*npoints.

    The error bar of a Richardson value is |W_2n - W_n|/3, the estimated error of
    the finer grid alone, which conservatively covers the extrapolated value.
    """
    grid = grid or GridSpec()
    if count < 1:
        raise ValueError("count must be positive")
    if count > grid.npoints // 100:
        raise ValueError(f"count={count} exceeds the reliable resolution of {grid.npoints} points")
    coarse = _eigenvalues(model, grid, count, backend)
    if check_boundary:
        for k, w in enumerate(coarse):
            mass = boundary_mass(model, grid, float(w))
            if mass > BOUNDARY_MASS_LIMIT:
                raise BoundaryError(
                    f"level {k} keeps {mass:.2e} of its weight beyond "
                    f"{(1 - BOUNDARY_FRACTION) * grid.xi_max:g}; increase xi_max"
                )
    if not grid.richardson:
        return [OracleEigenvalue(float(w), None, float(w)) for w in coarse]
    fine = _eigenvalues(model, grid.refined(), count, backend)
    return [
        OracleEigenvalue(float((4 * f - c) / 3), float(abs(f - c) / 3), float(c), float(f))
        for c, f in zip(coarse, fine)
    ]


def grid_convergence(model: ScaledModel, grid: GridSpec | None = None, count: int = 4,
                     backend: str | None = None) -> np.ndarray:
    """Contraction ratios (W_{n/2} - W_n) / (W_n - W_{2n}); about 4 for a second-order scheme."""
    grid = grid or GridSpec()
    half = GridSpec(grid.xi_max, grid.npoints // 2, False)
    w = [_eigenvalues(model, g, count, backend) for g in (half, grid, grid.refined())]
    return (w[0] - w[1]) / (w[1] - w[2])
