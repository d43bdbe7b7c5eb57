"""Critical interaction strength above which no stable ground state exists.

Bisection on Q with full relaxation probes; each probe is warm-started from
the converged state at the nearest interaction strength.  "Collapse" is the
relaxation module's numerical proxy (amplitude ceiling / accelerating
unbounded descent), since the physical blowup lies outside the validity of
the mean-field model.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field

from .energy import TrapSpec
from .errors import DomainError
from .grid import (Geometry, Grid, default_cylindrical_grid, default_line_grid,
                   default_spherical_grid)
from .groundstate import DescentConfig, GroundStateResult, default_initial, relax

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ThresholdTrial:
    Q: float
    converged: bool
    collapsed: bool
    resolved: bool       # False when the probe hit max_iters without a verdict
    iterations: int
    energy_total: float


@dataclass
class ThresholdResult:
    q_lo: float          # largest Q with a converged ground state
    q_hi: float          # smallest Q with detected collapse
    tolerance: float
    trials: list[ThresholdTrial] = field(default_factory=list)

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.q_lo + self.q_hi)


def _default_grid(geometry: Geometry, lambda_z: float, q_min: float) -> Grid:
    # the widest state in the bracket (smallest Q) sizes the axial box once,
    # so every warm start lives on the same grid
    if geometry is Geometry.CYLINDRICAL:
        return default_cylindrical_grid(q_min, lambda_z)
    if geometry is Geometry.SPHERICAL_RADIAL:
        return default_spherical_grid()
    return default_line_grid(q_min, lambda_z)


def _probe(grid: Grid, trap: TrapSpec, Q: float, cfg: DescentConfig, seed):
    result = relax(seed, trap, Q, cfg)
    trial = ThresholdTrial(
        Q=Q,
        converged=result.converged,
        collapsed=result.collapsed,
        resolved=result.converged or result.collapsed,
        iterations=result.iterations,
        energy_total=result.energy.total,
    )
    return result, trial


def find_threshold(geometry: Geometry | Grid, lambda_z: float,
                   bracket: tuple[float, float], tol: float,
                   cfg: DescentConfig = DescentConfig()) -> ThresholdResult:
    """Bracketed bisection for the critical Q on the given geometry.

    Probes that exhaust max_iters without converging or collapsing count as
    converged (no collapse signature appeared) but are recorded as unresolved;
    more than three of them triggers a resolution warning.
    """
    q_min, q_max = bracket
    if not 0 < q_min < q_max:
        raise DomainError(f"need 0 < q_min < q_max, got {bracket}")
    if tol <= 0:
        raise DomainError(f"tol must be positive, got {tol}")
    grid = geometry if isinstance(geometry, Grid) else _default_grid(
        geometry, lambda_z, q_min)
    if grid.kind is Geometry.SPHERICAL_RADIAL and lambda_z != 1.0:
        raise DomainError("spherical-radial thresholds model the isotropic trap "
                          "(lambda_z = 1)")
    trap = TrapSpec(lambda_z=lambda_z)

    result = ThresholdResult(q_lo=q_min, q_hi=q_max, tolerance=q_max - q_min)
    lo_res, trial = _probe(grid, trap, q_min, cfg, default_initial(grid, trap, q_min))
    result.trials.append(trial)
    if trial.collapsed or not trial.converged:
        raise DomainError(
            f"invalid bracket: relaxation at q_min = {q_min} did not converge")
    converged_states: dict[float, GroundStateResult] = {q_min: lo_res}

    def nearest_seed(q):
        q_near = min(converged_states, key=lambda qq: abs(qq - q))
        return converged_states[q_near].wavefunction.normalized()

    hi_res, trial = _probe(grid, trap, q_max, cfg, nearest_seed(q_max))
    result.trials.append(trial)
    if not trial.collapsed:
        raise DomainError(
            f"invalid bracket: relaxation at q_max = {q_max} did not collapse")

    unresolved = 0
    while result.q_hi - result.q_lo > tol:
        q_mid = 0.5 * (result.q_lo + result.q_hi)
        res, trial = _probe(grid, trap, q_mid, cfg, nearest_seed(q_mid))
        result.trials.append(trial)
        if not trial.resolved:
            unresolved += 1
        if trial.collapsed:
            result.q_hi = q_mid
        else:
            result.q_lo = q_mid
            if trial.converged:
                converged_states[q_mid] = res
        log.info("threshold probe Q=%.4f -> %s (bracket [%.4f, %.4f])", q_mid,
                 "collapsed" if trial.collapsed else "converged",
                 result.q_lo, result.q_hi)
    result.tolerance = result.q_hi - result.q_lo
    if unresolved > 3:
        warnings.warn(
            f"{unresolved} probes hit max_iters without a verdict; the grid may be "
            "too coarse or max_iters too small for this bracket", RuntimeWarning)
    return result


@dataclass
class OptimalityScan:
    table: list[tuple[float, ThresholdResult]]
    monotone_nonincreasing: bool


def optimality_scan(lambda_zs, bracket: tuple[float, float], tol: float,
                    cfg: DescentConfig = DescentConfig(),
                    geometry: Geometry = Geometry.CYLINDRICAL,
                    grid: Grid | None = None) -> OptimalityScan:
    """Threshold per anisotropy plus a monotonicity report (cigar optimality)."""
    rows = []
    for lz in lambda_zs:
        if not 0.0 <= lz <= 1.0:
            raise DomainError(f"lambda_z values must lie in [0, 1], got {lz}")
        g = grid if grid is not None else _default_grid(geometry, lz, bracket[0])
        rows.append((lz, find_threshold(g, lz, bracket, tol, cfg)))
    mids = [r.midpoint for _, r in rows]
    order = sorted(range(len(rows)), key=lambda k: rows[k][0])
    monotone = all(mids[order[k + 1]] <= mids[order[k]] + 1e-12
                   for k in range(len(order) - 1))
    return OptimalityScan(table=rows, monotone_nonincreasing=monotone)
