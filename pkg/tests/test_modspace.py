import math

import numpy as np
import pytest

from inls_lab.corpus import corpus, default_grid
from inls_lab.evolution import propagate
from inls_lab.grid import SpectralField, lp_norm, make_grid
from inls_lab.modspace import (ModulationParams, WindowFamily, block, block_norms, bump,
                               gaussian_window, mod_norm, stft_norm)

import fits


@pytest.fixture(scope="module")
def g1():
    return default_grid(1)


@pytest.fixture(scope="module")
def w1(g1):
    return WindowFamily(g1)


@pytest.fixture(scope="module")
def members(g1):
    return corpus(g1)


class TestBump:
    def test_plateau_and_support(self):
        t = np.linspace(-1.5, 1.5, 3001)
        b = bump(t)
        assert np.all(b[np.abs(t) <= 0.5] == 1.0)
        assert np.all(b[np.abs(t) >= 1.0] == 0.0)
        assert np.all((b >= 0) & (b <= 1))

    def test_symmetric_and_smooth(self):
        t = np.linspace(0.5, 1.0, 2001)
        assert np.allclose(bump(t), bump(-t))
        d = np.diff(bump(t))
        assert np.all(d <= 1e-15)


class TestWindows:
    @pytest.mark.parametrize("n,m,L", [(1, 1024, 20.0), (2, 64, 8.0), (1, 256, 5.0)])
    def test_partition_of_unity(self, n, m, L):
        w = WindowFamily(make_grid(n, m, L))
        assert w.partition_error() <= 1e-12
        total = sum(w.window(k) for k in w.indices)
        assert np.abs(total - 1).max() <= 1e-12

    def test_reconstruction(self, members, w1):
        for _, f in members:
            s = sum((block(f, k, w1).values for k in w1.indices), np.zeros(f.grid.shape, complex))
            assert lp_norm(f.with_values(s - f.values), 2) <= 1e-10 * lp_norm(f, 2)

    def test_outside_active_set(self, w1):
        with pytest.raises(ValueError):
            w1.window(10_000)

    def test_support_radius_at_most_one(self, w1):
        assert all(w1.support_radius(k) <= 1.0 + 1e-12 for k in w1.indices)

    def test_block_commutes_with_propagate(self, members, w1):
        f = members[5][1]
        for k in w1.indices[::5]:
            a = block(propagate(f, 0.7), k, w1)
            b = propagate(block(f, k, w1), 0.7)
            assert np.abs(a.values - b.values).max() <= 1e-12

    def test_single_mode_occupies_one_block(self, g1, w1):
        f = SpectralField(g1, np.exp(2j * math.pi * g1.x[0]))
        ks, norms = block_norms(f, 2, w1)
        nz = ks[norms > 1e-12 * norms.max()]
        assert nz.tolist() == [[1]]


class TestModNorm:
    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            ModulationParams(0.5, 2)

    def test_l2_equivalence_constant(self, frozen):
        ratios = fits.l2_equivalence()
        C = frozen["C_l2"]
        assert all(1 / C <= r <= C for r in ratios.values())

    def test_q_monotone(self, members, w1):
        for _, f in members:
            vals = [mod_norm(f, ModulationParams(3, q), w1) for q in (1, 1.5, 2, 4, math.inf)]
            assert all(a >= b * (1 - 1e-12) for a, b in zip(vals, vals[1:]))

    def test_p_holder_on_bounded_box(self, members, w1, g1):
        for _, f in members[::3]:
            for p1, p2 in [(1.5, 2), (2, 4), (3, math.inf)]:
                lo = mod_norm(f, ModulationParams(p1, 2), w1)
                hi = mod_norm(f, ModulationParams(p2, 2), w1)
                c = (2 * g1.L) ** (1 / p1 - (0 if math.isinf(p2) else 1 / p2))
                assert lo <= c * hi * (1 + 1e-12)

    def test_weight_s_increases_norm(self, members, w1):
        f = members[6][1]
        assert mod_norm(f, ModulationParams(2, 2, 1), w1) >= mod_norm(f, ModulationParams(2, 2, 0), w1)

    def test_algebra_property(self, frozen):
        assert max(fits.algebra_ratios().values()) <= 1.5 * frozen["C_algebra"]


class TestSTFT:
    def test_window_normalized(self, g1):
        assert lp_norm(gaussian_window(g1), 2) == pytest.approx(1.0, rel=1e-13)

    def test_p2_q2_equals_l2(self, members):
        for _, f in members[::4]:
            assert stft_norm(f, ModulationParams(2, 2), stride=4) == pytest.approx(lp_norm(f, 2), rel=1e-10)

    def test_equivalence_with_block_norm(self, frozen):
        C = frozen["C_stft"]
        assert all(1 / C <= r <= C for r in fits.stft_ratios().values())

    def test_zero_window_rejected(self, g1):
        f = SpectralField(g1, np.exp(-g1.x[0] ** 2))
        with pytest.raises(ValueError):
            stft_norm(f, ModulationParams(2, 2), g=SpectralField.zeros(g1))
