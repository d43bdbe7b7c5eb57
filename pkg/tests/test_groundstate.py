import math

import numpy as np
import pytest

from gpesoliton import analytic
from gpesoliton.energy import TrapSpec, hamiltonian
from gpesoliton.errors import DomainError
from gpesoliton.grid import Wavefunction, cylindrical_grid, line_grid, spherical_grid
from gpesoliton.groundstate import (DescentConfig, default_initial, reference_peak,
                                    relax, stability_step_limit)
from gpesoliton.observables import ProfileSection, compare_profiles, moments

FAST = DescentConfig(step_size=3e-3, residual_tol=1e-5, max_iters=120_000)


class TestDefaultInitial:
    @pytest.mark.parametrize("make,trap,Q", [
        (lambda: cylindrical_grid(5.0, -6.0, 6.0, 32, 32), TrapSpec(0.4), 0.1),
        (lambda: cylindrical_grid(5.0, -20.0, 20.0, 32, 64), TrapSpec(0.0), 5.0),
        (lambda: line_grid(-20.0, 20.0, 64), TrapSpec(0.0), 5.0),
        (lambda: line_grid(-10.0, 10.0, 64), TrapSpec(0.5), 0.0),
        (lambda: spherical_grid(6.0, 64), TrapSpec(1.0), 3.0),
    ])
    def test_unit_norm(self, make, trap, Q):
        u = default_initial(make(), trap, Q)
        assert u.norm() == pytest.approx(1.0, abs=1e-12)

    def test_gaussian_seed_when_trapped(self):
        g = cylindrical_grid(5.0, -6.0, 6.0, 32, 32)
        u = default_initial(g, TrapSpec(0.4), 5.0)
        ref = analytic.gaussian_ground_state(0.4, g.rho_coords(), g.s_coords())
        assert np.allclose(u.values, ref / g.norm(ref), rtol=1e-10)

    def test_soliton_seed_when_free(self):
        g = line_grid(-30.0, 30.0, 128)
        u = default_initial(g, TrapSpec(0.0), 5.0)
        ref = math.sqrt(math.pi) * analytic.soliton_profile(5.0, g.s)
        assert np.allclose(u.values, ref / g.norm(ref), rtol=1e-10)

    def test_free_axis_needs_interaction(self):
        g = line_grid(-30.0, 30.0, 128)
        with pytest.raises(DomainError):
            default_initial(g, TrapSpec(0.0), 0.0)


class TestRelax:
    def test_noninteracting_limit_recovers_gaussian(self):
        # small Q with an axial trap stays within 1% of the trap Gaussian
        g = cylindrical_grid(5.0, -7.0, 7.0, 48, 48)
        trap = TrapSpec(0.4)
        res = relax(default_initial(g, trap, 0.1), trap, 0.1, FAST)
        assert res.converged and not res.collapsed
        ref = Wavefunction(g, analytic.gaussian_ground_state(
            0.4, g.rho_coords(), g.s_coords())).normalized()
        d = compare_profiles(res.wavefunction, ref, ProfileSection.FULL)
        assert d["linf_rel"] < 0.01

    def test_monotone_descent_and_norm(self):
        g = line_grid(-25.0, 25.0, 256)
        trap = TrapSpec(0.0)
        res = relax(default_initial(g, trap, 5.0), trap, 5.0, FAST)
        assert res.converged
        assert res.energy_increases == 0
        assert res.wavefunction.norm() == pytest.approx(1.0, abs=1e-12)

    def test_seed_independence(self):
        # gaussian and soliton seeds land on the same minimizer
        g = line_grid(-25.0, 25.0, 256)
        trap = TrapSpec(0.0)
        cfg = DescentConfig(step_size=3e-3, residual_tol=1e-8, max_iters=400_000)
        a = relax(default_initial(g, trap, 5.0), trap, 5.0, cfg)
        gauss = Wavefunction(g, np.exp(-0.25 * g.s ** 2)).normalized()
        b = relax(gauss, trap, 5.0, cfg)
        assert a.converged and b.converged
        dist = g.norm(a.wavefunction.values - b.wavefunction.values)
        assert dist < 1e-4

    def test_line_soliton_matches_analytic(self):
        g = line_grid(-30.0, 30.0, 512)
        trap = TrapSpec(0.0)
        res = relax(default_initial(g, trap, 5.0), trap, 5.0, FAST)
        exact = math.sqrt(math.pi) * analytic.soliton_profile(5.0, g.s)
        err = np.max(np.abs(np.abs(res.wavefunction.values) - exact)) / exact.max()
        assert err < 0.02
        assert res.energy.chemical_potential == pytest.approx(
            -25 / (128 * math.pi ** 2), rel=5e-3)

    def test_supercritical_collapses(self):
        g = cylindrical_grid(6.0, -6.0, 6.0, 48, 48)
        trap = TrapSpec(0.0)
        res = relax(default_initial(g, trap, 25.0), trap, 25.0, FAST)
        assert res.collapsed and not res.converged

    def test_width_monotone_in_anisotropy(self):
        # Q = 5 states widen as the axial trap relaxes and stay finite at 0
        g = cylindrical_grid(5.0, -20.0, 20.0, 48, 128)
        widths = []
        for lz in (0.4, 0.2, 0.0):
            trap = TrapSpec(lz)
            res = relax(default_initial(g, trap, 5.0), trap, 5.0, FAST)
            assert res.converged
            widths.append(moments(res.wavefunction).w_s)
        assert widths[0] < widths[1] < widths[2]
        assert np.isfinite(widths[2])

    def test_variational_upper_bounds(self):
        g = cylindrical_grid(5.0, -20.0, 20.0, 48, 128)
        trap = TrapSpec(0.4)
        res = relax(default_initial(g, trap, 5.0), trap, 5.0, FAST)
        e_gauss = hamiltonian(Wavefunction(g, analytic.gaussian_ground_state(
            0.4, g.rho_coords(), g.s_coords())).normalized(), trap, 5.0)
        e_comp = hamiltonian(Wavefunction(g, analytic.composite_profile(
            5.0, g.rho_coords(), g.s_coords())).normalized(), trap, 5.0)
        assert res.energy.total <= e_gauss.total + 1e-9
        assert res.energy.total <= e_comp.total + 1e-9

    def test_rejects_unnormalized_initial(self):
        g = line_grid(-10.0, 10.0, 64)
        bad = Wavefunction(g, 2.0 * np.exp(-g.s ** 2))
        with pytest.raises(DomainError):
            relax(bad, TrapSpec(0.0), 1.0, FAST)

    def test_oversized_step_recovers_by_halving(self):
        g = line_grid(-25.0, 25.0, 256)
        trap = TrapSpec(0.0)
        cfg = DescentConfig(step_size=1.0, residual_tol=1e-5, max_iters=120_000)
        res = relax(default_initial(g, trap, 5.0), trap, 5.0, cfg)
        assert res.converged
        assert res.final_step_size < 1.0


class TestHelpers:
    def test_stability_limit_scales_with_spacing(self):
        coarse = line_grid(-10.0, 10.0, 64)
        fine = line_grid(-10.0, 10.0, 256)
        assert stability_step_limit(fine, TrapSpec(0.0)) < \
            stability_step_limit(coarse, TrapSpec(0.0))

    def test_reference_peak_covers_gaussian_regime(self):
        # the ceiling must not sit below the noninteracting peak at small Q
        g = cylindrical_grid(5.0, -6.0, 6.0, 32, 32)
        peak = reference_peak(g, TrapSpec(0.4), 0.1)
        gauss_peak = 0.4 ** 0.25 * math.pi ** -0.75
        assert peak >= gauss_peak
