"""Scalar diagnostics: norm, moments, momentum, widths and profile comparisons."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .energy import EnergyBreakdown
from .errors import DomainError, GridMismatchError
from .grid import Geometry, Wavefunction


@dataclass
class ObservableRecord:
    """One row of trajectory output."""

    tau: float = 0.0
    norm: float = 0.0
    x_s: float = 0.0
    p_s: float = 0.0
    w_s: float = 0.0
    w_rho: float = 0.0
    peak_density: float = 0.0
    grad_v_s: float = float("nan")
    energy: EnergyBreakdown | None = None

    @staticmethod
    def csv_columns():
        return ("tau", "norm", "energy_total", "x_s", "p_s", "w_s", "w_rho",
                "peak_density", "mean_dV_ds")

    def csv_row(self):
        e = self.energy.total if self.energy is not None else float("nan")
        return (self.tau, self.norm, e, self.x_s, self.p_s, self.w_s, self.w_rho,
                self.peak_density, self.grad_v_s)


def _axial_momentum(values, ds, weights, norm2):
    # local phase increment across 2*ds (one-sided at the edges); exact under a
    # plane-wave boost, and insensitive to the garbage phase of near-zero tails
    # because each increment is weighted by |u|^2
    density = np.abs(values) ** 2
    dtheta = np.empty_like(density)
    dtheta[..., 1:-1] = np.angle(values[..., 2:] * np.conj(values[..., :-2])) / (2.0 * ds)
    dtheta[..., 0] = np.angle(values[..., 1] * np.conj(values[..., 0])) / ds
    dtheta[..., -1] = np.angle(values[..., -1] * np.conj(values[..., -2])) / ds
    return float(np.sum(weights * density * dtheta)) / norm2


def moments(u: Wavefunction) -> ObservableRecord:
    """Normalized first/second moments, momentum and peak density of a state."""
    grid = u.grid
    density = u.density()
    norm2 = float(np.real(grid.integrate(density)))
    if norm2 == 0.0:
        raise DomainError("moments of the zero field are undefined")
    rec = ObservableRecord(norm=math.sqrt(norm2), peak_density=float(density.max()))
    if grid.kind is Geometry.SPHERICAL_RADIAL:
        r2 = float(grid.integrate(grid.r ** 2 * density)) / norm2
        rec.x_s = float("nan")
        rec.p_s = float("nan")
        rec.w_s = float("nan")
        rec.w_rho = math.sqrt(r2)
        return rec
    s = grid.s_coords()
    rec.x_s = float(grid.integrate(s * density)) / norm2
    s2 = float(grid.integrate(s ** 2 * density)) / norm2
    rec.w_s = math.sqrt(max(s2 - rec.x_s ** 2, 0.0))
    rec.p_s = _axial_momentum(np.asarray(u.values, dtype=complex), grid.ds,
                              grid.weights, norm2)
    if grid.kind is Geometry.CYLINDRICAL:
        rho2 = float(grid.integrate(grid.rho_coords() ** 2 * density)) / norm2
        rec.w_rho = math.sqrt(rho2)
    else:
        rec.w_rho = float("nan")
    return rec


class ProfileSection(enum.Enum):
    S_SECTION_AT_RHO_ZERO = "s-section"
    RHO_SECTION_AT_S_ZERO = "rho-section"
    FULL = "full"


def _section(u: Wavefunction, mode: ProfileSection):
    grid = u.grid
    if mode is ProfileSection.FULL:
        return np.abs(u.values), grid.weights
    if grid.kind is Geometry.LINE:
        if mode is ProfileSection.RHO_SECTION_AT_S_ZERO:
            raise DomainError("line geometry has no rho section")
        return np.abs(u.values), grid.weights
    if grid.kind is not Geometry.CYLINDRICAL:
        raise DomainError(f"no {mode.value} on {grid.kind.value} grids")
    if mode is ProfileSection.S_SECTION_AT_RHO_ZERO:
        # first half-offset node stands in for the axis (no on-axis sample exists)
        return np.abs(u.values[0, :]), np.full(grid.s.size, grid.ds)
    j0 = int(np.argmin(np.abs(grid.s)))
    return np.abs(u.values[:, j0]), 2.0 * math.pi * grid.rho * grid.drho


def compare_profiles(u: Wavefunction, reference: Wavefunction,
                     mode: ProfileSection = ProfileSection.FULL):
    """Peak-normalized L_inf and weighted relative L_2 deviation of |u| from |reference|.

    Returns a dict with keys 'linf_rel' and 'l2_rel'; the reference peak over
    the selected section normalizes both.
    """
    if not u.grid.matches(reference.grid):
        raise GridMismatchError("profiles must share a grid")
    a, w = _section(u, mode)
    b, _ = _section(reference, mode)
    peak = float(b.max())
    if peak == 0.0:
        raise DomainError("reference section is identically zero")
    diff = a - b
    linf = float(np.max(np.abs(diff))) / peak
    l2 = math.sqrt(float(np.sum(w * diff ** 2)) / float(np.sum(w * b ** 2)))
    return {"linf_rel": linf, "l2_rel": l2}
