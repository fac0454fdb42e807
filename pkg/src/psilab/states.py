"""Analytic reference states with closed-form moments, energies, and dynamics.

Every verification in the package leans on one of these: they are sampled on a
periodic grid, so each constructor guards that the analytic state actually fits
(wrap-around tails below ``tail_tol`` of the norm, features resolved by the
spacing). ``sigma0`` always means the standard deviation of the position
density |psi|^2, not of psi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigurationError, DegenerateStateError, StructuralError
from .grid import Grid, WaveField

DEFAULT_TAIL_TOL = 1e-10


@dataclass(frozen=True)
class PlaneWave:
    """exp(i k0 x) / sqrt(L); k0 must sit on the grid's wavenumber lattice."""

    k0: float


@dataclass(frozen=True)
class GaussianPacket:
    """Normalized exp(-(x-x0)^2 / (4 sigma0^2)) * exp(i k0 x).

    x0 = None centers the packet on the grid at sampling time.
    """

    sigma0: float
    k0: float = 0.0
    x0: float | None = None

    def __post_init__(self):
        if not (self.sigma0 > 0):
            raise StructuralError(f"sigma0 must be > 0, got {self.sigma0}")


@dataclass(frozen=True)
class HOEigenstate:
    """n-th eigenstate of V = M omega0^2 (x - center)^2 / 2 (center = None -> L/2)."""

    n: int
    omega0: float = 1.0
    center: float | None = None

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 0:
            raise StructuralError(f"n must be an integer >= 0, got {self.n}")
        if not (self.omega0 > 0):
            raise StructuralError(f"omega0 must be > 0, got {self.omega0}")


@dataclass(frozen=True)
class HOCoherent:
    """Oscillator ground state displaced by ``displacement``; <x> = center + displacement."""

    displacement: float
    omega0: float = 1.0
    center: float | None = None

    def __post_init__(self):
        if not (self.omega0 > 0):
            raise StructuralError(f"omega0 must be > 0, got {self.omega0}")


@dataclass(frozen=True)
class Superposition:
    """Weighted sum of component states, renormalized after sampling."""

    components: tuple

    def __post_init__(self):
        if len(self.components) == 0:
            raise StructuralError("superposition needs at least one component")
        if all(abs(complex(w)) == 0.0 for w, _ in self.components):
            raise StructuralError("superposition weights must not all be zero")


StateSpec = Union[PlaneWave, GaussianPacket, HOEigenstate, HOCoherent, Superposition]


def oscillator_length(omega0: float, grid: Grid) -> float:
    """Length scale sqrt(hbar / (M omega0)) of the oscillator states."""
    return math.sqrt(grid.hbar / (grid.mass * omega0))


def _gaussian_tail_mass(x0: float, sigma0: float, grid: Grid) -> float:
    # Probability mass of the analytic density outside [0, L); sigma0 is the rho std.
    lo = x0 / sigma0
    hi = (grid.length - x0) / sigma0
    return 0.5 * (math.erfc(lo / math.sqrt(2.0)) + math.erfc(hi / math.sqrt(2.0)))


def _guard_gaussian(x0: float, sigma0: float, grid: Grid, tail_tol: float):
    if 4.0 * sigma0 >= grid.length:
        raise ConfigurationError(
            f"packet too wide: 4*sigma0 = {4 * sigma0:g} >= L = {grid.length:g}")
    if sigma0 <= 4.0 * grid.dx:
        raise ConfigurationError(
            f"packet under-resolved: sigma0 = {sigma0:g} <= 4*dx = {4 * grid.dx:g}")
    tails = _gaussian_tail_mass(x0, sigma0, grid)
    if tails > tail_tol:
        raise ConfigurationError(
            f"wrap-around tails {tails:.3e} exceed tail_tol {tail_tol:.3e}")


def _edge_tail_mass(dens: np.ndarray, dx: float) -> float:
    # Geometric extrapolation of the decay at both domain edges; estimates the
    # analytic mass that falls outside [0, L) and wraps around. Conservative
    # for faster-than-geometric (e.g. Gaussian) decay.
    dens = dens / (dens.sum() * dx)
    total = 0.0
    for edge, inner in ((dens[0], dens[1]), (dens[-1], dens[-2])):
        if inner <= 0.0:
            continue
        r = edge / inner
        if r >= 1.0:
            return 1.0  # not decaying toward this edge; hopeless fit
        total += edge * dx * r / (1.0 - r)
    return total


def hermite_functions(xi: np.ndarray, n_max: int) -> list[np.ndarray]:
    """Normalized Hermite functions h_0..h_n_max via the stable recurrence.

    h_n(xi) = xi*sqrt(2/n)*h_{n-1} - sqrt((n-1)/n)*h_{n-2}; no raw polynomials,
    so there is no overflow for large n.
    """
    h = [np.pi**-0.25 * np.exp(-0.5 * xi**2)]
    if n_max >= 1:
        h.append(math.sqrt(2.0) * xi * h[0])
    for n in range(2, n_max + 1):
        h.append(xi * math.sqrt(2.0 / n) * h[n - 1]
                 - math.sqrt((n - 1) / n) * h[n - 2])
    return h


def sample(spec: StateSpec, grid: Grid, tail_tol: float = DEFAULT_TAIL_TOL) -> WaveField:
    """Sample a state spec on a grid and normalize it.

    Raises ConfigurationError when the state does not fit the periodic grid
    (wrap-around tails above ``tail_tol`` of the norm, or features finer than
    the resolution guard allows).
    """
    x = grid.x
    if isinstance(spec, PlaneWave):
        j = spec.k0 * grid.length / (2.0 * np.pi)
        if abs(j - round(j)) > 1e-9:
            raise ConfigurationError(
                f"k0 = {spec.k0:g} is not on the wavenumber lattice 2*pi*j/L")
        if abs(round(j)) > grid.n_points // 2 - 1:
            raise ConfigurationError(f"k0 = {spec.k0:g} exceeds the resolvable band")
        values = np.exp(1j * spec.k0 * x) / math.sqrt(grid.length)
        return WaveField(grid, values).normalized()

    if isinstance(spec, GaussianPacket):
        x0 = grid.center if spec.x0 is None else spec.x0
        _guard_gaussian(x0, spec.sigma0, grid, tail_tol)
        # Periodized image sum: the wrapped state is smooth through the seam
        # even when the tails are only loosely guarded.
        values = np.zeros(grid.n_points, dtype=np.complex128)
        for m in range(-2, 3):
            xs = x + m * grid.length
            values += (np.exp(-((xs - x0) ** 2) / (4.0 * spec.sigma0**2))
                       * np.exp(1j * spec.k0 * xs))
        return WaveField(grid, values).normalized()

    if isinstance(spec, HOEigenstate):
        center = grid.center if spec.center is None else spec.center
        ell = oscillator_length(spec.omega0, grid)
        if ell <= 4.0 * grid.dx * math.sqrt(spec.n + 1.0):
            raise ConfigurationError(
                f"eigenstate n={spec.n} under-resolved: dx = {grid.dx:g}")
        if 4.0 * ell * math.sqrt(spec.n + 0.5) >= grid.length:
            raise ConfigurationError(
                f"eigenstate n={spec.n} too wide for L = {grid.length:g}")
        xi = (x - center) / ell
        direct = hermite_functions(xi, spec.n)[spec.n] / math.sqrt(ell)
        tails = _edge_tail_mass(direct**2, grid.dx)
        if tails > tail_tol:
            raise ConfigurationError(
                f"wrap-around tails {tails:.3e} exceed tail_tol {tail_tol:.3e}")
        raw = np.zeros(grid.n_points)
        for m in range(-2, 3):
            xi_m = (x + m * grid.length - center) / ell
            raw += hermite_functions(xi_m, spec.n)[spec.n] / math.sqrt(ell)
        return WaveField(grid, raw).normalized()

    if isinstance(spec, HOCoherent):
        center = grid.center if spec.center is None else spec.center
        ell = oscillator_length(spec.omega0, grid)
        packet = GaussianPacket(sigma0=ell / math.sqrt(2.0), k0=0.0,
                                x0=center + spec.displacement)
        return sample(packet, grid, tail_tol=tail_tol)

    if isinstance(spec, Superposition):
        acc = np.zeros(grid.n_points, dtype=np.complex128)
        for weight, part in spec.components:
            acc = acc + complex(weight) * sample(part, grid, tail_tol=tail_tol).values
        field = WaveField(grid, acc)
        if field.norm_squared() < 1e-14:
            raise DegenerateStateError("superposition components cancel out")
        return field.normalized()

    raise StructuralError(f"unknown state spec {spec!r}")


def free_packet_width(sigma0: float, t: float, grid: Grid) -> float:
    """Exact position std of a freely evolving Gaussian packet at time t.

    sigma(t) = sigma0 * sqrt(1 + (hbar t / (2 M sigma0^2))^2); even in t.
    """
    if not (sigma0 > 0):
        raise StructuralError(f"sigma0 must be > 0, got {sigma0}")
    rate = grid.hbar * t / (2.0 * grid.mass * sigma0**2)
    return sigma0 * math.sqrt(1.0 + rate * rate)


def ho_energy(n: int, omega0: float, grid: Grid) -> float:
    """Oscillator level hbar * omega0 * (n + 1/2)."""
    if int(n) != n or n < 0:
        raise StructuralError(f"n must be an integer >= 0, got {n}")
    return grid.hbar * omega0 * (n + 0.5)
