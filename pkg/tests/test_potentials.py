"""Potential families: sampling, analytic gradients, ramping, validation."""

import numpy as np
import pytest

from psilab import (Barrier, Constant, Grid, Harmonic, Quartic, StructuralError,
                    Tabulated, TimeRamped, UnsupportedMethodError, Well, Zero,
                    is_time_independent, potential_gradient, sample_potential)


@pytest.fixture
def grid():
    return Grid(64, 8.0)


def test_zero_and_constant(grid):
    assert np.all(sample_potential(Zero(), 0.0, grid) == 0.0)
    assert np.all(sample_potential(Constant(0.3), 5.0, grid) == 0.3)


def test_harmonic_centered(grid):
    v = sample_potential(Harmonic(2.0), 0.0, grid)
    assert v[grid.n_points // 2] == 0.0
    assert v[0] == pytest.approx(0.5 * 4.0 * 16.0)


def test_harmonic_uses_mass():
    g = Grid(64, 8.0, mass=3.0)
    v = sample_potential(Harmonic(1.0), 0.0, g)
    assert v[0] == pytest.approx(0.5 * 3.0 * 16.0)


def test_quartic(grid):
    v = sample_potential(Quartic(strength=2.0), 0.0, grid)
    assert v[0] == pytest.approx(0.5 * 256.0)


def test_barrier_and_well(grid):
    vb = sample_potential(Barrier(1.5, 3.0, 5.0), 0.0, grid)
    inside = (grid.x >= 3.0) & (grid.x <= 5.0)
    assert np.all(vb[inside] == 1.5) and np.all(vb[~inside] == 0.0)
    vw = sample_potential(Well(0.8, 3.0, 5.0), 0.0, grid)
    assert np.all(vw[inside] == -0.8) and np.all(vw[~inside] == 0.0)


def test_bad_edges(grid):
    with pytest.raises(StructuralError):
        Barrier(1.0, 5.0, 3.0)
    with pytest.raises(StructuralError):
        sample_potential(Barrier(1.0, 3.0, 9.0), 0.0, grid)  # x_b beyond L


def test_tabulated_roundtrip(grid):
    table = tuple(float(np.sin(x)) for x in grid.x)
    v = sample_potential(Tabulated(table), 0.0, grid)
    assert np.allclose(v, np.sin(grid.x))
    with pytest.raises(StructuralError):
        sample_potential(Tabulated(table[:32]), 0.0, grid)


def test_time_ramped_rate_zero_bitwise(grid):
    inner = Harmonic(1.0)
    ramped = TimeRamped(inner, rate=0.0)
    a = sample_potential(inner, 1.7, grid)
    b = sample_potential(ramped, 1.7, grid)
    assert np.array_equal(a, b)
    assert is_time_independent(ramped)


def test_time_ramped_scales_linearly(grid):
    ramped = TimeRamped(Constant(1.0), rate=0.5)
    assert sample_potential(ramped, 2.0, grid)[0] == pytest.approx(2.0)
    assert not is_time_independent(ramped)


@pytest.mark.parametrize("spec", [Zero(), Constant(2.0), Harmonic(1.3),
                                  Quartic(0.7), TimeRamped(Harmonic(1.0), 0.2)])
def test_gradient_matches_finite_difference(spec, grid):
    xs = np.linspace(1.0, 7.0, 41)
    h = 1e-6
    fd = (np.asarray([sample_at(spec, 0.5, x + h, grid) for x in xs])
          - np.asarray([sample_at(spec, 0.5, x - h, grid) for x in xs])) / (2 * h)
    an = potential_gradient(spec, 0.5, xs, grid)
    assert np.abs(an - fd).max() < 1e-5


def sample_at(spec, t, x, grid):
    # scalar evaluation helper built on the same formulas via a 1-point trick
    if isinstance(spec, Zero):
        return 0.0
    if isinstance(spec, Constant):
        return spec.v0
    if isinstance(spec, Harmonic):
        c = grid.center if spec.center is None else spec.center
        return 0.5 * grid.mass * spec.omega0**2 * (x - c) ** 2
    if isinstance(spec, Quartic):
        c = grid.center if spec.center is None else spec.center
        return 0.25 * spec.strength * (x - c) ** 4
    if isinstance(spec, TimeRamped):
        return (1.0 + spec.rate * t) * sample_at(spec.inner, t, x, grid)
    raise AssertionError


def test_gradient_unsupported_for_discontinuous(grid):
    with pytest.raises(UnsupportedMethodError):
        potential_gradient(Barrier(1.0, 3.0, 5.0), 0.0, 4.0, grid)
    with pytest.raises(UnsupportedMethodError):
        potential_gradient(Tabulated(tuple(np.zeros(64))), 0.0, 4.0, grid)
