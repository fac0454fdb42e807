"""Analytic reference states: normalization, energies, orthogonality, guards."""

import math

import numpy as np
import pytest

from psilab import (ConfigurationError, GaussianPacket, Grid, HOCoherent,
                    HOEigenstate, PlaneWave, StructuralError, Superposition,
                    apply_hamiltonian, free_packet_width, Harmonic, ho_energy,
                    integrate, sample)


def rayleigh_energy(psi, omega0=1.0):
    h_psi = apply_hamiltonian(psi, Harmonic(omega0))
    return integrate(np.conj(psi.values) * h_psi.values, psi.grid).real


ALL_SPECS = [
    PlaneWave(k0=1.0),
    GaussianPacket(sigma0=1.0),
    GaussianPacket(sigma0=0.8, k0=2.0, x0=6.0),
    HOEigenstate(0),
    HOEigenstate(3),
    HOCoherent(0.5),
    Superposition(((1 / math.sqrt(2), HOEigenstate(0)),
                   (1 / math.sqrt(2), HOEigenstate(1)))),
]


@pytest.mark.parametrize("spec", ALL_SPECS, ids=lambda s: type(s).__name__)
def test_every_sampled_state_normalized(spec, osc_grid):
    grid = Grid(128, 2 * np.pi) if isinstance(spec, PlaneWave) else osc_grid
    psi = sample(spec, grid)
    assert abs(psi.norm_squared() - 1.0) < 1e-12


class TestPlaneWave:
    def test_flat_density_and_momentum(self, unit_grid):
        psi = sample(PlaneWave(k0=1.0), unit_grid)
        dens = psi.density()
        assert np.abs(dens - 1.0 / unit_grid.length).max() < 1e-14
        from psilab import mean_momentum
        assert float(mean_momentum(psi, "fourier_sum")) == pytest.approx(1.0, abs=1e-12)

    def test_off_lattice_rejected(self, unit_grid):
        with pytest.raises(ConfigurationError):
            sample(PlaneWave(k0=1.5), unit_grid)


class TestGaussianPacket:
    def test_zero_carrier_zero_momentum(self, osc_grid):
        from psilab import mean_momentum
        psi = sample(GaussianPacket(sigma0=1.0), osc_grid)
        assert abs(float(mean_momentum(psi, "fourier_sum"))) < 1e-12

    def test_sigma_is_density_std(self):
        g = Grid(512, 20.0)
        sigma0 = 1.2
        psi = sample(GaussianPacket(sigma0=sigma0), g)
        dens = psi.density()
        mean = integrate(dens * g.x, g)
        var = integrate(dens * (g.x - mean) ** 2, g)
        assert math.sqrt(var) == pytest.approx(sigma0, abs=1e-10)

    def test_too_wide_rejected(self):
        with pytest.raises(ConfigurationError):
            sample(GaussianPacket(sigma0=3.0), Grid(128, 10.0))

    def test_under_resolved_rejected(self):
        g = Grid(16, 32.0)  # dx = 2.0
        with pytest.raises(ConfigurationError):
            sample(GaussianPacket(sigma0=1.0), g)

    def test_wrap_tails_rejected(self):
        g = Grid(256, 10.0)
        with pytest.raises(ConfigurationError):
            sample(GaussianPacket(sigma0=1.0, x0=2.0), g)

    def test_tail_tol_override_admits(self):
        g = Grid(256, 10.0)
        psi = sample(GaussianPacket(sigma0=1.0, x0=2.5), g, tail_tol=1e-2)
        assert abs(psi.norm_squared() - 1.0) < 1e-12


class TestOscillatorStates:
    def test_rayleigh_quotient_matches_levels(self, osc_grid):
        for n in range(6):
            psi = sample(HOEigenstate(n), osc_grid)
            assert rayleigh_energy(psi) == pytest.approx(n + 0.5, abs=1e-6)

    def test_mutual_orthogonality(self, osc_grid):
        states = [sample(HOEigenstate(n), osc_grid) for n in range(6)]
        for i in range(6):
            for j in range(i + 1, 6):
                assert abs(states[i].inner(states[j])) < 1e-8

    def test_ho_energy_levels(self, osc_grid):
        assert ho_energy(0, 1.0, osc_grid) == 0.5
        assert ho_energy(3, 1.0, osc_grid) == 3.5

    def test_ho_energy_matches_rayleigh_oracle(self, osc_grid):
        for n in (0, 3):
            psi = sample(HOEigenstate(n), osc_grid)
            assert ho_energy(n, 1.0, osc_grid) == pytest.approx(
                rayleigh_energy(psi), abs=1e-6)

    def test_omega_scaling_linearity(self, osc_grid):
        for n in range(4):
            assert ho_energy(n, 2.0, osc_grid) == 2 * ho_energy(n, 1.0, osc_grid)

    def test_nonuniform_hbar_mass(self):
        g = Grid(512, 10.0, hbar=0.5, mass=2.0)
        psi = sample(HOEigenstate(1, omega0=1.5), g)
        h_psi = apply_hamiltonian(psi, Harmonic(1.5))
        e = integrate(np.conj(psi.values) * h_psi.values, g).real
        assert e == pytest.approx(0.5 * 1.5 * (1 + 0.5), abs=1e-6)

    def test_coherent_centroid(self, osc_grid):
        a = 0.8
        psi = sample(HOCoherent(a), osc_grid)
        dens = psi.density()
        mean = integrate(dens * osc_grid.x, osc_grid)
        assert mean == pytest.approx(osc_grid.center + a, abs=1e-10)

    def test_negative_index_rejected(self):
        with pytest.raises(StructuralError):
            HOEigenstate(-1)


class TestFreePacketWidth:
    def test_t_zero(self, osc_grid):
        assert free_packet_width(1.0, 0.0, osc_grid) == 1.0

    def test_closed_form_value(self, osc_grid):
        assert free_packet_width(1.0, 2.0, osc_grid) == pytest.approx(
            math.sqrt(2.0), abs=1e-12)

    def test_even_in_time(self, osc_grid):
        assert free_packet_width(0.7, 1.3, osc_grid) == free_packet_width(
            0.7, -1.3, osc_grid)

    def test_bad_sigma(self, osc_grid):
        with pytest.raises(StructuralError):
            free_packet_width(0.0, 1.0, osc_grid)


class TestSuperposition:
    def test_zero_weights_rejected(self):
        with pytest.raises(StructuralError):
            Superposition(((0.0, HOEigenstate(0)),))

    def test_weighted_projection(self, osc_grid):
        w = (math.sqrt(0.3), math.sqrt(0.7))
        psi = sample(Superposition(((w[0], HOEigenstate(0)),
                                    (w[1], HOEigenstate(2)))), osc_grid)
        c0 = sample(HOEigenstate(0), osc_grid).inner(psi)
        c2 = sample(HOEigenstate(2), osc_grid).inner(psi)
        assert abs(c0) ** 2 == pytest.approx(0.3, abs=1e-10)
        assert abs(c2) ** 2 == pytest.approx(0.7, abs=1e-10)
