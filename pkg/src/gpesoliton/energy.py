"""Energy functional, its gradient, and the chemical potential on any geometry.

Components use the doubled convention E = int |grad u|^2 + V|u|^2 - (Q/2)|u|^4
(so the noninteracting isotropic Gaussian scores exactly 3); the chemical
potential is reported as the eigenvalue of the physical GPE operator,
mu = (kinetic + trap + external)/2 + interaction for unit-norm states.

Line-geometry states carry unit line norm, which rescales the cubic
coefficient to Q/(4*pi): the transverse average of the Gaussian mode
contributes 1/2 and the change to unit normalization another 1/(2*pi).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GridMismatchError
from .grid import Geometry, Grid, Wavefunction


@dataclass(frozen=True)
class TrapSpec:
    """Dimensionless trap: transverse anisotropies are 1 by geometry, axial is lambda_z."""

    lambda_z: float = 0.0

    def __post_init__(self):
        if self.lambda_z < 0:
            raise DomainError(f"lambda_z must be non-negative, got {self.lambda_z}")


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy components in units of hbar*omega (doubled-functional convention)."""

    kinetic: float
    trap: float
    interaction: float
    total: float
    chemical_potential: float
    external: float = 0.0

    def csv_row(self):
        return (self.kinetic, self.trap, self.interaction, self.external,
                self.total, self.chemical_potential)

    @staticmethod
    def csv_columns():
        return ("kinetic", "trap", "interaction", "external", "total", "mu")


def quartic_coefficient(kind: Geometry, Q: float) -> float:
    """Coefficient c in the interaction term -c * int |u|^4 (doubled convention)."""
    if Q < 0:
        raise DomainError(f"Q must be non-negative, got {Q}")
    if kind is Geometry.LINE:
        return Q / (4.0 * math.pi)
    return 0.5 * Q


def trap_potential(grid: Grid, trap: TrapSpec):
    """Doubled trap potential: rho^2 + lambda_z^2 s^2 (cylindrical), lambda_z^2 s^2
    (line), r^2 (spherical-radial, which requires isotropy)."""
    if grid.kind is Geometry.LINE:
        return (trap.lambda_z * grid.s) ** 2
    if grid.kind is Geometry.CYLINDRICAL:
        return grid.rho_coords() ** 2 + (trap.lambda_z * grid.s_coords()) ** 2
    if trap.lambda_z != 1.0:
        raise GridMismatchError(
            "spherical-radial geometry models the isotropic trap; lambda_z must be 1, "
            f"got {trap.lambda_z}"
        )
    return grid.r ** 2


def gradient(values, grid: Grid, trap: TrapSpec, Q: float, external=None):
    """Functional gradient [-lap + V + 2*V_ext - 2c|u|^2] u (doubled convention).

    Halving it gives the physical GPE operator applied to u.
    """
    c = quartic_coefficient(grid.kind, Q)
    out = -grid.laplacian(values)
    pot = trap_potential(grid, trap)
    if external is not None:
        pot = pot + 2.0 * external
    out += pot * values
    if Q != 0:
        out -= (2.0 * c) * np.abs(values) ** 2 * values
    return out


def hamiltonian(u: Wavefunction, trap: TrapSpec, Q: float, external=None) -> EnergyBreakdown:
    """Evaluate the energy components of a sampled state.

    `external` is an optional array of extra potential samples (physical
    convention); its contribution is reported separately and included in the
    total.
    """
    grid = u.grid
    c = quartic_coefficient(grid.kind, Q)
    v = u.values
    density = np.abs(v) ** 2
    norm2 = float(np.real(grid.integrate(density)))
    if norm2 == 0.0:
        return EnergyBreakdown(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    kinetic = float(np.real(grid.inner(v, -grid.laplacian(v))))
    trap_e = float(np.real(grid.integrate(trap_potential(grid, trap) * density)))
    quartic = float(np.real(grid.integrate(density * density)))
    interaction = -c * quartic
    ext_e = 0.0
    if external is not None:
        external = np.asarray(external)
        if external.shape != grid.shape:
            raise GridMismatchError(
                f"external potential shape {external.shape} != grid shape {grid.shape}"
            )
        ext_e = 2.0 * float(np.real(grid.integrate(external * density)))
    total = kinetic + trap_e + interaction + ext_e
    mu = (0.5 * (kinetic + trap_e + ext_e) + interaction) / norm2
    return EnergyBreakdown(kinetic=kinetic, trap=trap_e, interaction=interaction,
                           total=total, chemical_potential=mu, external=ext_e)
