"""Spectral kernel: quadrature, transforms, derivatives, amplitude/phase."""

import numpy as np
import pytest

from psilab import (DEFAULT_FLOOR, DegenerateStateError, GaussianPacket, Grid,
                    HOEigenstate, MadelungField, StructuralError, WaveField,
                    compose, decompose, from_momentum, integrate,
                    phase_gradient, sample, spectral_gradient,
                    spectral_laplacian, to_momentum)


def naive_dft_momentum(psi):
    """O(n^2) direct transform, independent oracle for to_momentum."""
    g = psi.grid
    coeffs = np.zeros(g.n_points, dtype=complex)
    for j, k in enumerate(g.k):
        coeffs[j] = np.sum(psi.values * np.exp(-1j * k * g.x)) * g.dx / np.sqrt(g.length)
    return coeffs


class TestIntegrate:
    def test_constant(self, unit_grid):
        assert integrate(np.ones(128), unit_grid) == pytest.approx(2 * np.pi, abs=1e-13)

    def test_sin_squared_closed_form(self):
        # exact for periodic quadrature at any n >= 4
        for n in (8, 64, 256):
            g = Grid(n, 5.0)
            f = np.sin(2 * np.pi * g.x / g.length) ** 2
            assert integrate(f, g) == pytest.approx(g.length / 2, abs=1e-13)

    def test_zero(self, unit_grid):
        assert integrate(np.zeros(128), unit_grid) == 0.0

    def test_length_mismatch(self, unit_grid):
        with pytest.raises(StructuralError):
            integrate(np.ones(64), unit_grid)


class TestGridInvariants:
    def test_wavenumber_lattice(self):
        g = Grid(16, 4.0)
        expected = 2 * np.pi * np.array([0, 1, 2, 3, 4, 5, 6, 7, -8, -7, -6, -5,
                                         -4, -3, -2, -1]) / 4.0
        assert np.allclose(g.k, expected)

    def test_bad_parameters(self):
        with pytest.raises(StructuralError):
            Grid(2, 1.0)
        with pytest.raises(StructuralError):
            Grid(64, -1.0)
        with pytest.raises(StructuralError):
            Grid(64, 1.0, hbar=0.0)
        with pytest.raises(StructuralError):
            Grid(64, 1.0, mass=-2.0)


class TestMomentumTransform:
    def test_single_mode(self, unit_grid):
        psi = WaveField(unit_grid,
                        np.exp(1j * unit_grid.x) / np.sqrt(unit_grid.length))
        c = to_momentum(psi)
        assert abs(c[1]) ** 2 == pytest.approx(1.0, abs=1e-12)
        others = np.sum(np.abs(c) ** 2) - abs(c[1]) ** 2
        assert others < 1e-24

    def test_real_field_conjugate_symmetry(self, unit_grid):
        g = unit_grid
        psi = WaveField(g, np.cos(2 * g.x) + 0.3 * np.cos(5 * g.x)).normalized()
        c = to_momentum(psi)
        for j in range(1, g.n_points // 2):
            assert c[-j] == pytest.approx(np.conj(c[j]), abs=1e-12)

    def test_even_about_center_symmetric_magnitudes(self, unit_grid):
        g = unit_grid
        psi = WaveField(g, np.exp(-np.cos(g.x - np.pi))).normalized()
        c = np.abs(to_momentum(psi))
        for j in range(1, g.n_points // 2):
            assert c[-j] == pytest.approx(c[j], abs=1e-12)

    def test_gaussian_carrier_argmax_and_dft_oracle(self):
        g = Grid(128, 16.0)
        k0 = 2 * np.pi * 6 / g.length
        psi = sample(GaussianPacket(sigma0=1.0, k0=k0), g)
        c = to_momentum(psi)
        assert g.k[np.argmax(np.abs(c) ** 2)] == pytest.approx(k0)
        oracle = naive_dft_momentum(psi)
        assert np.abs(c - oracle).max() < 1e-12

    def test_parseval_and_round_trip(self, rng):
        g = Grid(128, 7.0)
        for _ in range(20):
            values = rng.normal(size=128) + 1j * rng.normal(size=128)
            psi = WaveField(g, values).normalized()
            c = to_momentum(psi)
            assert np.sum(np.abs(c) ** 2) == pytest.approx(psi.norm_squared(),
                                                           abs=1e-12)
            back = from_momentum(c, g)
            rel = np.abs(back.values - psi.values).max() / np.abs(psi.values).max()
            assert rel < 1e-13


class TestSpectralDerivatives:
    def test_gradient_single_mode_exact(self, unit_grid):
        g = unit_grid
        for m in (1, 3, 17):
            f = np.sin(m * g.x)
            df = spectral_gradient(f, g)
            assert np.abs(df - m * np.cos(m * g.x)).max() < 1e-12

    def test_gradient_constant(self, unit_grid):
        assert np.abs(spectral_gradient(np.ones(128), unit_grid)).max() == 0.0

    def test_gradient_vs_finite_difference(self):
        # centered-difference oracle converges at O(dx^2) toward the spectral value
        errors = []
        for n in (128, 256):
            g = Grid(n, 20.0)
            f = np.exp(-((g.x - 10.0) ** 2))
            fd = (np.roll(f, -1) - np.roll(f, 1)) / (2 * g.dx)
            errors.append(np.abs(spectral_gradient(f, g) - fd).max())
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.3)

    def test_laplacian_single_mode(self, unit_grid):
        g = unit_grid
        f = np.cos(3 * g.x)
        assert np.abs(spectral_laplacian(f, g) + 9 * f).max() < 1e-10

    def test_laplacian_linearity(self, unit_grid):
        g = unit_grid
        f1, f2 = np.cos(2 * g.x), np.sin(5 * g.x)
        lhs = spectral_laplacian(1.5 * f1 - 2.0 * f2, g)
        rhs = 1.5 * spectral_laplacian(f1, g) - 2.0 * spectral_laplacian(f2, g)
        # exact linear algebra; bound is FFT round-off amplified by k^2
        assert np.abs(lhs - rhs).max() < 1e-11

    def test_laplacian_vs_finite_difference(self):
        errors = []
        for n in (128, 256):
            g = Grid(n, 20.0)
            f = np.exp(-((g.x - 10.0) ** 2))
            fd = (np.roll(f, -1) - 2 * f + np.roll(f, 1)) / g.dx**2
            errors.append(np.abs(spectral_laplacian(f, g) - fd).max())
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.3)

    def test_complex_input(self, unit_grid):
        g = unit_grid
        f = np.exp(2j * g.x)
        assert np.abs(spectral_gradient(f, g) - 2j * f).max() < 1e-12


class TestDecomposeCompose:
    def test_plane_wave(self, unit_grid):
        g = unit_grid
        psi = WaveField(g, np.exp(1j * g.x) / np.sqrt(g.length))
        m = decompose(psi)
        assert np.abs(m.density - 1.0 / g.length).max() < 1e-14
        ramp = m.phase - g.x
        assert np.abs(ramp - ramp[0]).max() < 1e-10

    def test_real_positive_gaussian_phase_zero(self):
        g = Grid(256, 16.0)
        psi = sample(GaussianPacket(sigma0=1.0), g)
        m = decompose(psi)
        assert np.abs(m.phase).max() == 0.0

    def test_first_excited_pi_jump_at_node(self, osc_grid):
        psi = sample(HOEigenstate(1), osc_grid)
        m = decompose(psi)
        node = osc_grid.n_points // 2  # grid point exactly at the center node
        assert not m.phase_valid[node]
        left = m.phase[node - 2]
        right = m.phase[node + 2]
        assert abs(abs(right - left) - np.pi) < 1e-10

    def test_all_zero_rejected(self, unit_grid):
        with pytest.raises(DegenerateStateError):
            decompose(WaveField(unit_grid, np.zeros(128, dtype=complex)))

    def test_compose_constant(self, unit_grid):
        g = unit_grid
        m = MadelungField(g, np.full(128, 1.0 / g.length), np.zeros(128))
        psi = compose(m)
        assert np.abs(psi.values - 1.0 / np.sqrt(g.length)).max() < 1e-14

    def test_round_trip(self):
        g = Grid(256, 16.0)
        psi = sample(GaussianPacket(sigma0=1.2, k0=2 * np.pi * 3 / g.length), g)
        m = decompose(psi)
        back = compose(m)
        mask = m.mask()
        assert np.abs(back.values - psi.values)[mask].max() < 1e-10

    def test_global_2pi_phase_shift_identical(self, unit_grid):
        g = unit_grid
        m1 = MadelungField(g, np.full(128, 1.0 / g.length), 0.3 * np.sin(g.x))
        m2 = MadelungField(g, m1.density, np.asarray(m1.phase) + 2 * np.pi)
        # same state up to the round-off of exp(i(S + 2*pi))
        assert np.abs(compose(m1).values - compose(m2).values).max() < 1e-14

    def test_negative_density_rejected(self, unit_grid):
        with pytest.raises(StructuralError):
            MadelungField(unit_grid, -np.ones(128), np.zeros(128))

    def test_floor_must_be_positive(self, unit_grid):
        psi = WaveField(unit_grid, np.ones(128, dtype=complex)).normalized()
        with pytest.raises(StructuralError):
            decompose(psi, floor=0.0)


class TestPhaseGradient:
    def test_plane_wave(self, unit_grid):
        g = unit_grid
        psi = WaveField(g, np.exp(2j * g.x) / np.sqrt(g.length))
        pg = phase_gradient(psi)
        assert np.abs(pg.values[pg.valid] - 2.0).max() < 1e-10

    def test_real_gaussian_zero(self):
        g = Grid(256, 16.0)
        psi = sample(GaussianPacket(sigma0=1.0), g)
        pg = phase_gradient(psi)
        assert np.abs(pg.values[pg.valid]).max() < 1e-9

    def test_carrier_envelope_cancels(self):
        # d/dx of (envelope * e^{i k0 x}) phase is exactly k0: symbolic oracle
        g = Grid(512, 20.0)
        k0 = 1.7
        psi = sample(GaussianPacket(sigma0=1.0, k0=k0), g)
        pg = phase_gradient(psi)
        core = pg.valid & (psi.density() >= 1e-6 * psi.density().max())
        assert np.abs(pg.values[core] - k0).max() < 1e-8

    def test_agrees_with_unwrapped_phase_derivative(self):
        # centered differences on the unwrapped phase; the unwrapped ramp is
        # not periodic, so the oracle derivative must not go through Fourier
        g = Grid(512, 20.0)
        psi = sample(GaussianPacket(sigma0=1.3, k0=1.1, x0=9.0), g)
        m = decompose(psi)
        phase = np.asarray(m.phase)
        ds = np.empty_like(phase)
        ds[1:-1] = (phase[2:] - phase[:-2]) / (2 * g.dx)
        ds[0] = ds[1]
        ds[-1] = ds[-2]
        pg = phase_gradient(psi)
        core = pg.valid & (psi.density() >= 1e-6 * psi.density().max())
        core[0] = core[-1] = False
        assert np.abs(pg.values[core] - ds[core]).max() < 1e-8
