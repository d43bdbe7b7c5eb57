import math

import numpy as np
import pytest

from gpesoliton import analytic
from gpesoliton.errors import DomainError, GridMismatchError
from gpesoliton.grid import (Geometry, Wavefunction, build_grid, cylindrical_grid,
                             default_half_extent_s, line_grid, spherical_grid)


class TestConstruction:
    def test_line_spacing(self):
        g = line_grid(-20.0, 20.0, 400)
        assert g.ds == pytest.approx(0.1, rel=1e-15)
        assert g.s[0] == pytest.approx(-19.95)

    def test_half_offset_radial_nodes(self):
        g = cylindrical_grid(5.0, -1.0, 1.0, 50, 20)
        assert g.rho[0] == pytest.approx(0.05, rel=1e-15)

    def test_resolution_floor(self):
        with pytest.raises(DomainError):
            line_grid(-1.0, 1.0, 8)
        with pytest.raises(DomainError):
            spherical_grid(1.0, 15)

    def test_bad_extents(self):
        with pytest.raises(DomainError):
            line_grid(1.0, -1.0, 64)
        with pytest.raises(DomainError):
            cylindrical_grid(-2.0, -1.0, 1.0, 32, 32)

    def test_build_grid_dispatch(self):
        g = build_grid(Geometry.CYLINDRICAL, rho_max=2.0, s_min=-1.0, s_max=1.0,
                       n_rho=16, n_s=16)
        assert g.kind is Geometry.CYLINDRICAL

    def test_default_extent_rule(self):
        # trap-free axis follows the soliton width; trapped axis the Gaussian width
        assert default_half_extent_s(5.0, 0.0) == pytest.approx(
            6 * analytic.soliton_width(5.0))
        assert default_half_extent_s(20.0, 0.0) >= 6.0
        assert default_half_extent_s(5.0, 0.4) == pytest.approx(
            6 / math.sqrt(0.8))


class TestQuadrature:
    def test_cylinder_volume(self):
        g = cylindrical_grid(2.0, -1.0, 1.0, 50, 40)
        assert g.integrate(np.ones(g.shape)) == pytest.approx(8 * math.pi, rel=1e-12)

    def test_line_length_and_sphere_volume(self):
        gl = line_grid(-3.0, 5.0, 64)
        assert gl.integrate(np.ones(64)) == pytest.approx(8.0, rel=1e-12)
        gs = spherical_grid(3.0, 128)
        assert gs.integrate(np.ones(128)) == pytest.approx(
            4 * math.pi * 27 / 3, rel=1e-12)

    def test_zero_field(self):
        g = line_grid(-1.0, 1.0, 32)
        assert g.integrate(np.zeros(32)) == 0.0

    def test_size_mismatch(self):
        g = line_grid(-1.0, 1.0, 32)
        with pytest.raises(GridMismatchError):
            g.integrate(np.ones(31))

    def test_gaussian_ground_state_norm(self):
        # the radial midpoint rule carries an O(drho^2) axis-boundary term, so
        # the 1e-6 oracle needs a radially fine grid (quadrature only, cheap)
        g = cylindrical_grid(5.0, -8.0, 8.0, 2000, 128)
        u = analytic.gaussian_ground_state(0.4, g.rho_coords(), g.s_coords())
        assert g.integrate(np.abs(u) ** 2) == pytest.approx(1.0, abs=1e-6)

    def test_soliton_line_norm(self):
        Q = 5.0
        half = 9.0 / analytic.soliton_inverse_width(Q)
        g = line_grid(-half, half, 2048)
        phi = analytic.soliton_profile(Q, g.s)
        assert g.integrate(np.abs(phi) ** 2) == pytest.approx(1 / math.pi, abs=1e-6)


class TestLaplacian:
    def test_gaussian_cylindrical(self):
        g = cylindrical_grid(8.0, -8.0, 8.0, 128, 128)
        f = np.exp(-0.5 * (g.rho_coords() ** 2 + g.s_coords() ** 2))
        exact = (g.rho_coords() ** 2 + g.s_coords() ** 2 - 3.0) * f
        assert np.max(np.abs(g.laplacian(f) - exact)) < 0.01

    def test_constant_field_interior(self):
        g = line_grid(-1.0, 1.0, 64)
        lap = g.laplacian(np.ones(64))
        assert np.max(np.abs(lap[1:-1])) == 0.0

    @pytest.mark.parametrize("geometry", ["line", "cylindrical", "spherical"])
    def test_second_order_convergence(self, geometry):
        def err(n):
            if geometry == "line":
                g = line_grid(-8.0, 8.0, n)
                f = np.exp(-0.5 * g.s ** 2)
                exact = (g.s ** 2 - 1.0) * f
            elif geometry == "cylindrical":
                g = cylindrical_grid(8.0, -8.0, 8.0, n, n)
                f = np.exp(-0.5 * (g.rho_coords() ** 2 + g.s_coords() ** 2))
                exact = (g.rho_coords() ** 2 + g.s_coords() ** 2 - 3.0) * f
            else:
                g = spherical_grid(8.0, n)
                f = np.exp(-0.5 * g.r ** 2)
                exact = (g.r ** 2 - 3.0) * f
            return np.max(np.abs(g.laplacian(f) - exact))

        order = math.log2(err(64) / err(128))
        assert 1.8 <= order <= 2.2

    @pytest.mark.parametrize("make", [
        lambda: line_grid(-3.0, 3.0, 48),
        lambda: cylindrical_grid(3.0, -2.0, 2.0, 24, 20),
        lambda: spherical_grid(3.0, 40),
    ])
    def test_symmetric_negative_semidefinite(self, make):
        g = make()
        rng = np.random.default_rng(7)
        f = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        h = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
        a = g.inner(f, g.laplacian(h))
        b = g.inner(g.laplacian(f), h)
        assert abs(a - b) / abs(a) < 1e-10
        assert np.real(g.inner(f, g.laplacian(f))) < 1e-10


class TestWavefunction:
    def test_norm_and_normalize(self):
        g = line_grid(-10.0, 10.0, 256)
        u = Wavefunction(g, np.exp(-g.s ** 2) * (1 + 0j))
        n = u.normalized()
        assert n.norm() == pytest.approx(1.0, abs=1e-12)

    def test_shape_check(self):
        g = line_grid(-1.0, 1.0, 32)
        with pytest.raises(GridMismatchError):
            Wavefunction(g, np.zeros(16))

    def test_zero_normalize_fails(self):
        g = line_grid(-1.0, 1.0, 32)
        with pytest.raises(DomainError):
            Wavefunction(g, np.zeros(32)).normalized()
