"""Constrained energy minimization by normalized steepest descent.

The iteration is plain gradient flow u <- u - dtau * grad(E) with a
renormalization after every step (imaginary-time relaxation).  The step is
clamped to an explicit stability estimate and halved automatically whenever
the energy rises for ten consecutive steps; collapse is flagged through an
amplitude ceiling relative to the analytic profiles plus an
accelerating-descent watchdog, since the physical blowup lies outside the
validity of the mean-field model.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from . import analytic
from .energy import EnergyBreakdown, TrapSpec, hamiltonian, gradient
from .errors import DomainError, StepSizeError
from .grid import Geometry, Grid, Wavefunction

log = logging.getLogger(__name__)

_INSTABILITY_RUN = 10     # consecutive energy increases that trigger a halving
_MAX_HALVINGS = 30
_SNAPSHOT_EVERY = 100
_WINDOW = 200             # iterations per energy-slope window


@dataclass(frozen=True)
class DescentConfig:
    step_size: float = 1e-3      # pseudo-time step (upper bound; clamped for stability)
    max_iters: int = 200_000
    energy_tol: float = 1e-10    # relative energy change per iteration
    residual_tol: float = 1e-5   # L2 eigenresidual target
    collapse_guard: float = 5.0  # amplitude ceiling over the analytic peak

    def __post_init__(self):
        if self.step_size <= 0:
            raise DomainError(f"step_size must be positive, got {self.step_size}")
        if self.energy_tol <= 0 or self.residual_tol <= 0:
            raise DomainError("tolerances must be positive")
        if self.collapse_guard <= 1:
            raise DomainError(f"collapse_guard must exceed 1, got {self.collapse_guard}")
        if self.max_iters < 1:
            raise DomainError("max_iters must be at least 1")


@dataclass
class GroundStateResult:
    wavefunction: Wavefunction
    energy: EnergyBreakdown
    iterations: int
    converged: bool
    collapsed: bool
    residual: float
    final_step_size: float
    energy_increases: int  # accepted steps where energy rose beyond round-off


def reference_peak(grid: Grid, trap: TrapSpec, Q: float) -> float:
    """Peak amplitude of the analytic profile(s) seeding this configuration."""
    peaks = []
    if Q > 0 and grid.kind is not Geometry.SPHERICAL_RADIAL:
        peaks.append(analytic.soliton_amplitude(Q))
    if grid.kind is Geometry.SPHERICAL_RADIAL:
        peaks.append(math.pi ** -0.75)
    elif trap.lambda_z > 0:
        if grid.kind is Geometry.LINE:
            peaks.append((trap.lambda_z / math.pi) ** 0.25)
        else:
            peaks.append(trap.lambda_z ** 0.25 * math.pi ** -0.75)
    if not peaks:
        raise DomainError("no analytic reference profile for this configuration")
    return max(peaks)


def default_initial(grid: Grid, trap: TrapSpec, Q: float) -> Wavefunction:
    """Analytic seed: trap Gaussian when the axis is confined, soliton profile otherwise."""
    if grid.kind is Geometry.SPHERICAL_RADIAL:
        values = math.pi ** -0.75 * np.exp(-0.5 * grid.r ** 2)
    elif trap.lambda_z > 0:
        if grid.kind is Geometry.LINE:
            values = (trap.lambda_z / math.pi) ** 0.25 * np.exp(
                -0.5 * trap.lambda_z * grid.s ** 2)
        else:
            values = analytic.gaussian_ground_state(trap.lambda_z, grid.rho_coords(),
                                                    grid.s_coords())
    else:
        if Q <= 0:
            raise DomainError("need Q > 0 for a localized seed on a trap-free axis")
        if grid.kind is Geometry.LINE:
            # line states carry unit norm; the paper-normalized profile carries 1/pi
            values = math.sqrt(math.pi) * analytic.soliton_profile(Q, grid.s)
        else:
            values = analytic.composite_profile(Q, grid.rho_coords(), grid.s_coords())
    return Wavefunction(grid, values).normalized()


def stability_step_limit(grid: Grid, trap: TrapSpec) -> float:
    """Largest stable descent step, from the stencil eigenvalue bound plus trap maximum."""
    lam = 0.0
    if grid.kind in (Geometry.LINE, Geometry.CYLINDRICAL):
        lam += 4.0 / grid.ds ** 2
    if grid.kind is Geometry.CYLINDRICAL:
        lam += 4.0 / grid.drho ** 2
    if grid.kind is Geometry.SPHERICAL_RADIAL:
        lam += 4.0 / grid.dr ** 2
    from .energy import trap_potential  # local import avoids a cycle at module load

    lam += float(np.max(trap_potential(grid, trap)))
    return 1.8 / lam


def relax(initial: Wavefunction, trap: TrapSpec, Q: float,
          cfg: DescentConfig = DescentConfig()) -> GroundStateResult:
    """Relax an initial state to the constrained minimizer (or detect collapse)."""
    if Q < 0:
        raise DomainError(f"Q must be non-negative, got {Q}")
    grid = initial.grid
    if abs(initial.norm() - 1.0) > 1e-8:
        raise DomainError("initial state must have norm 1; call .normalized() first")

    # real descent when the seed is real: the flow preserves reality
    v = initial.values
    if np.iscomplexobj(v) and np.max(np.abs(v.imag)) == 0.0:
        v = v.real
    v = v.copy()

    ceiling = math.inf
    if Q > 0:
        ceiling = cfg.collapse_guard * reference_peak(grid, trap, Q)

    dtau = min(cfg.step_size, stability_step_limit(grid, trap))
    w = grid.weights
    energy_prev = math.inf
    rises = 0
    halvings = 0
    increases_beyond_tol = 0
    snapshot = v.copy()
    collapsed = False
    converged = False
    residual = math.inf
    window_drop_prev = 0.0
    window_energy_start = None
    accelerating = 0
    iterations = 0

    while iterations < cfg.max_iters:
        iterations += 1
        g = gradient(v, grid, trap, Q)
        vg = float(np.real(np.sum(w * np.conj(v) * g)))
        quartic = float(np.sum(w * np.abs(v) ** 4))
        energy = vg + quartic * (0.5 * Q if grid.kind is not Geometry.LINE
                                 else Q / (4.0 * math.pi))
        mu = 0.5 * vg
        res_vec = 0.5 * g - mu * v
        residual = math.sqrt(float(np.sum(w * np.abs(res_vec) ** 2)))

        if not math.isfinite(energy):
            v = snapshot.copy()
            dtau *= 0.5
            halvings += 1
            rises = 0
            energy_prev = math.inf
            if halvings > _MAX_HALVINGS:
                raise StepSizeError(
                    "descent unstable even at the minimum step size; reduce step_size")
            continue

        scale = max(abs(energy), 1.0)
        if energy > energy_prev + 1e-12 * scale:
            increases_beyond_tol += 1
            rises += 1
            if rises >= _INSTABILITY_RUN:
                v = snapshot.copy()
                dtau *= 0.5
                halvings += 1
                rises = 0
                increases_beyond_tol -= _INSTABILITY_RUN
                energy_prev = math.inf
                if halvings > _MAX_HALVINGS:
                    raise StepSizeError(
                        "descent unstable even at the minimum step size; reduce step_size")
                continue
        else:
            rises = 0

        if (abs(energy - energy_prev) < cfg.energy_tol * scale
                and residual < cfg.residual_tol):
            converged = True
            break
        energy_prev = energy

        peak = float(np.max(np.abs(v)))
        if peak > ceiling:
            collapsed = True
            break

        # accelerating unbounded descent is the other collapse signature
        if Q > 0 and iterations % _WINDOW == 0:
            if window_energy_start is not None:
                drop = window_energy_start - energy
                if drop > 0 and window_drop_prev > 0 and drop > 1.5 * window_drop_prev:
                    accelerating += 1
                    if accelerating >= 3 and peak > reference_peak(grid, trap, Q):
                        collapsed = True
                        break
                else:
                    accelerating = 0
                window_drop_prev = drop if drop > 0 else 0.0
            window_energy_start = energy

        if iterations % _SNAPSHOT_EVERY == 0:
            snapshot = v.copy()

        v -= dtau * g
        nrm = math.sqrt(float(np.sum(w * np.abs(v) ** 2)))
        v /= nrm

    final = Wavefunction(grid, np.asarray(v, dtype=complex))
    breakdown = hamiltonian(final, trap, Q)
    if converged:
        collapsed = False
    log.debug("relax: Q=%g lambda_z=%g iters=%d converged=%s collapsed=%s residual=%.3e",
              Q, trap.lambda_z, iterations, converged, collapsed, residual)
    return GroundStateResult(
        wavefunction=final,
        energy=breakdown,
        iterations=iterations,
        converged=converged,
        collapsed=collapsed,
        residual=residual,
        final_step_size=dtau,
        energy_increases=increases_beyond_tol,
    )
