"""Conversion between laboratory parameters and the dimensionless solver inputs.

Every solver module works in trap units: lengths in the radial oscillator
length a0, time in 1/omega_r, energies in hbar*omega_r.  The only interaction
parameter is Q = 8*pi*|a|*N/a0 for scattering length a < 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import DomainError, UnsupportedRegimeError

# CODATA 2018
HBAR = 1.054571817e-34           # J s
ATOMIC_MASS = 1.66053906660e-27  # kg

# 7Li: mass 7.016003 u; |a| = 14.5 Angstrom for the attractive hyperfine state
LI7_MASS = 7.016003 * ATOMIC_MASS
LI7_SCATTERING_LENGTH = -14.5e-10  # m

ANGULAR = "angular"  # omega = 2*pi*nu (default; reproduces a0 ~ 3 um at nu = 150 Hz)
LINEAR = "linear"    # omega = nu taken literally


@dataclass(frozen=True)
class PhysicalParams:
    """Laboratory-frame trap and atom parameters."""

    scattering_length_a: float          # m, negative for attractive interactions
    atom_mass_m: float                  # kg
    radial_frequency_nu: float          # Hz (interpreted per frequency_convention)
    particle_number_N: float
    lambda_z: float = 0.0               # axial/radial trap frequency ratio
    frequency_convention: str = ANGULAR

    def __post_init__(self):
        if self.atom_mass_m <= 0:
            raise DomainError(f"atom mass must be positive, got {self.atom_mass_m}")
        if self.radial_frequency_nu <= 0:
            raise DomainError(
                f"radial frequency must be positive, got {self.radial_frequency_nu}"
            )
        if self.particle_number_N < 0:
            raise DomainError(
                f"particle number must be non-negative, got {self.particle_number_N}"
            )
        if self.lambda_z < 0:
            raise DomainError(f"lambda_z must be non-negative, got {self.lambda_z}")
        if self.frequency_convention not in (ANGULAR, LINEAR):
            raise DomainError(
                f"frequency convention must be '{ANGULAR}' or '{LINEAR}', "
                f"got {self.frequency_convention!r}"
            )


@dataclass(frozen=True)
class DimensionlessParams:
    """Solver-side parameters derived from a PhysicalParams."""

    Q: float
    lambda_z: float
    a0: float = field(metadata={"unit": "m"})

    def __post_init__(self):
        if self.a0 <= 0:
            raise DomainError(f"oscillator length must be positive, got {self.a0}")


def angular_frequency(p: PhysicalParams) -> float:
    """Radial angular frequency in rad/s under the chosen convention."""
    if p.frequency_convention == ANGULAR:
        return 2.0 * math.pi * p.radial_frequency_nu
    return p.radial_frequency_nu


def oscillator_length(p: PhysicalParams) -> float:
    """Radial oscillator length a0 = sqrt(hbar/(m*omega)) in meters."""
    return math.sqrt(HBAR / (p.atom_mass_m * angular_frequency(p)))


def q_from_n(p: PhysicalParams) -> float:
    """Dimensionless interaction strength Q = 8*pi*|a|*N/a0 (attractive only)."""
    if p.scattering_length_a >= 0:
        raise UnsupportedRegimeError(
            "scattering length must be negative (attractive condensates only), "
            f"got {p.scattering_length_a}"
        )
    return 8.0 * math.pi * abs(p.scattering_length_a) * p.particle_number_N / oscillator_length(p)


def n_from_q(Q: float, p: PhysicalParams) -> float:
    """Particle number producing interaction strength Q for the given trap/atom."""
    if p.scattering_length_a >= 0:
        raise UnsupportedRegimeError(
            "scattering length must be negative (attractive condensates only), "
            f"got {p.scattering_length_a}"
        )
    if Q < 0:
        raise DomainError(f"Q must be non-negative, got {Q}")
    return Q * oscillator_length(p) / (8.0 * math.pi * abs(p.scattering_length_a))


def to_dimensionless(p: PhysicalParams) -> DimensionlessParams:
    return DimensionlessParams(Q=q_from_n(p), lambda_z=p.lambda_z, a0=oscillator_length(p))


def lithium7_params(
    N: float,
    lambda_z: float = 0.0,
    nu: float = 150.0,
    frequency_convention: str = ANGULAR,
) -> PhysicalParams:
    """Convenience constructor for the standard 7Li cigar-trap parameters."""
    return PhysicalParams(
        scattering_length_a=LI7_SCATTERING_LENGTH,
        atom_mass_m=LI7_MASS,
        radial_frequency_nu=nu,
        particle_number_N=N,
        lambda_z=lambda_z,
        frequency_convention=frequency_convention,
    )
