import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from inls_lab.corpus import corpus, default_grid
from inls_lab.evolution import (SingularWeight, energy, energy_terms, g_difference, nonlinearity,
                                pde_time, propagate, propagator_bound_probe)
from inls_lab.grid import SpectralField, lp_norm, make_grid
from inls_lab.modspace import ModulationParams, WindowFamily

import fits
import oracles


@pytest.fixture(scope="module")
def g1():
    return default_grid(1)


@pytest.fixture(scope="module")
def gauss(g1):
    return SpectralField(g1, np.exp(-g1.x[0] ** 2))


class TestWeight:
    def test_modes(self, g1):
        assert np.all(SingularWeight(g1, 0.1, "unit").values == 1)
        assert SingularWeight(g1, 0.1, "zero").is_zero
        cap = SingularWeight(g1, 0.1, "cap").values
        assert cap[g1.m // 2] == pytest.approx(g1.h ** -0.1)
        with pytest.raises(ValueError):
            SingularWeight(g1, 0.1, "bogus")

    def test_origin_cell_is_cell_mean(self, g1):
        w = SingularWeight(g1, 0.3).values
        ref = integrate.quad(lambda x: abs(x) ** -0.3, -g1.h / 2, g1.h / 2, points=[0])[0] / g1.h
        assert w[g1.m // 2] == pytest.approx(ref, rel=1e-10)

    def test_neighbours_cell_mean(self, g1):
        w = SingularWeight(g1, 0.3).values
        x = g1.x1d[g1.m // 2 + 1]
        assert x < g1.h * (1 + 1e-9)
        away = SingularWeight(g1, 0.3).values[g1.m // 2 + 2]
        assert away == pytest.approx(abs(g1.x1d[g1.m // 2 + 2]) ** -0.3, rel=1e-14)

    def test_2d_origin_cell(self):
        g = make_grid(2, 64, 8.0)
        w = SingularWeight(g, 0.4).values
        h = g.h
        # one quadrant, by symmetry; Gauss-Kronrod nodes never touch the corner
        ref = 4 * integrate.dblquad(lambda y, x: math.hypot(x, y) ** -0.4, 0, h / 2, 0, h / 2,
                                    epsabs=1e-13, epsrel=1e-11)[0] / h**2
        assert w[32, 32] == pytest.approx(ref, rel=1e-7)

    def test_read_only(self, g1):
        with pytest.raises(ValueError):
            SingularWeight(g1, 0.1).values[0] = 0


class TestPropagate:
    def test_identity_at_zero(self, gauss):
        assert np.array_equal(propagate(gauss, 0).values, gauss.values)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(-5, 5), st.floats(-5, 5))
    def test_unitary_group(self, s, t):
        g = make_grid(1, 128, 10.0)
        f = SpectralField(g, np.exp(-g.x[0] ** 2 + 1j * g.x[0]))
        a = propagate(propagate(f, s), t)
        b = propagate(f, s + t)
        assert np.abs(a.values - b.values).max() < 1e-12
        assert lp_norm(a, 2) == pytest.approx(lp_norm(f, 2), rel=1e-13)

    def test_free_gaussian_spreading(self):
        g = make_grid(1, 1024, 40.0)
        f = SpectralField(g, np.exp(-g.x[0] ** 2 / 2))
        t = 0.8
        # i u_t + u_xx = 0 from exp(-x^2/2): exp(-x^2 / (2(1+2it))) / sqrt(1+2it)
        ref = np.exp(-g.x[0] ** 2 / (2 * (1 + 2j * t))) / np.sqrt(1 + 2j * t)
        assert np.abs(propagate(f, t).values - ref).max() < 1e-12

    def test_cycles_convention(self, gauss):
        a = propagate(gauss, 0.3, convention="cycles")
        b = propagate(gauss, -0.3 / (4 * math.pi))
        assert np.array_equal(a.values, b.values)
        with pytest.raises(ValueError):
            pde_time(1.0, "bogus")


class TestProbe:
    def test_identity_ratio(self, gauss, g1):
        w = WindowFamily(g1)
        assert propagator_bound_probe(gauss, 0, ModulationParams(2, 2), w) == pytest.approx(1.0)

    def test_bounded_by_fitted_constants(self, frozen):
        r = fits.probe_ratios()
        assert max(v for k, v in r.items() if k.startswith("decay")) <= frozen["C_probe_decay"] * 1.5
        assert max(v for k, v in r.items() if k.startswith("growth")) <= frozen["C_probe_growth"] * 1.5

    def test_decay_needs_p_two(self, gauss, g1):
        with pytest.raises(ValueError):
            propagator_bound_probe(gauss, 1, ModulationParams(1.5, 2), WindowFamily(g1))


class TestNonlinearity:
    def test_zero(self, g1):
        w = SingularWeight(g1, 0.1)
        assert np.all(nonlinearity(SpectralField.zeros(g1), w, 1.0, 1).values == 0)

    def test_gauge_and_odd(self, gauss, g1):
        w = SingularWeight(g1, 0.1)
        ph = np.exp(0.7j)
        a = nonlinearity(gauss * ph, w, 1.5, -1).values
        b = ph * nonlinearity(gauss, w, 1.5, -1).values
        assert np.abs(a - b).max() < 1e-14
        assert np.array_equal(nonlinearity(-gauss, w, 1.5, 1).values, -nonlinearity(gauss, w, 1.5, 1).values)

    def test_cubic_with_unit_weight(self, gauss, g1):
        w = SingularWeight(g1, 0.0, "unit")
        assert np.abs(nonlinearity(gauss, w, 2.0, 1).values - gauss.values**3).max() < 1e-14

    def test_alpha_positive(self, gauss, g1):
        with pytest.raises(ValueError):
            nonlinearity(gauss, SingularWeight(g1, 0.1), 0.0, 1)


class TestGDifference:
    def test_equal_arguments(self, gauss):
        assert np.all(g_difference(gauss, gauss * 0.5, gauss * 0.5, 1.0).values == 0)

    def test_collapse(self, gauss, g1):
        z = SpectralField.zeros(g1)
        v = gauss * (1 + 1j)
        assert np.abs(g_difference(z, v, z, 1.5).values - np.abs(v.values) ** 1.5 * v.values).max() < 1e-15

    @pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
    def test_fitted_constant_matches_closed_form(self, alpha, frozen):
        C = frozen["C_g"][str(alpha)]
        assert C <= oracles.g_sup_closed_form(alpha) * (1 + 1e-9)
        assert C >= oracles.g_sup_closed_form(alpha) * (1 - 1e-3)


class TestEnergy:
    def test_zero(self, g1):
        assert energy(SpectralField.zeros(g1), SingularWeight(g1, 0.1), 1.0, 1) == 0

    def test_single_mode_gradient(self, g1):
        xi0 = 2 * math.pi
        f = SpectralField(g1, np.exp(1j * xi0 * g1.x[0]))
        kin, _ = energy_terms(f, SingularWeight(g1, 0.1), 1.0)
        assert kin == pytest.approx(xi0**2 * 2 * g1.L, rel=1e-13)

    def test_matches_quadrature_reference(self):
        # rectangle-rule error of the singular weight is O(h^(1-b)); at h ~ 3e-5 it is below 1e-6
        g = make_grid(1, 2**20, 16.0)
        f = SpectralField(g, np.exp(-g.x[0] ** 2))
        E = energy(f, SingularWeight(g, 0.1), 1.0, -1)
        assert E == pytest.approx(oracles.gaussian_energy_reference(1.0, 0.1, -1), rel=1e-6)
