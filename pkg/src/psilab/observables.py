"""Expectation values and local fields, each computable by independent routes.

The whole point of this module is redundancy: the mean momentum, kinetic and
total energy each come in (at least) three algebraically equivalent forms —
momentum-space sums, real-space sandwich integrals, and density/phase
(Madelung) integrals — so their agreement is an executable identity check, not
an implementation detail. Phase-based routes integrate over the density mask
and attach the excluded probability mass to the result.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedMethodError
from .grid import (DEFAULT_FLOOR, Grid, WaveField, integrate, phase_gradient,
                   spectral_gradient, spectral_laplacian, to_momentum)
from .potentials import Harmonic, PotentialSpec, sample_potential
from .propagators import apply_hamiltonian, time_derivative
from .states import HOEigenstate, ho_energy, sample
from .errors import ConfigurationError


class Expectation(float):
    """A float that remembers what a density-floor-restricted integral left out.

    ``excluded_mass`` is the probability mass at sub-floor nodes (0.0 for
    routes that need no mask); ``completeness_defect`` is 1 - sum |C_n|^2 for
    truncated eigen-expansions, None otherwise.
    """

    __slots__ = ("excluded_mass", "completeness_defect")

    def __new__(cls, value, excluded_mass: float = 0.0, completeness_defect=None):
        obj = super().__new__(cls, float(value))
        obj.excluded_mass = float(excluded_mass)
        obj.completeness_defect = completeness_defect
        return obj

    @property
    def node_warning(self) -> bool:
        return self.excluded_mass > 0.0


def _masked_integral(values: np.ndarray, valid: np.ndarray, density: np.ndarray,
                     grid: Grid) -> Expectation:
    total = float(values[valid].sum() * grid.dx)
    excluded = float(density[~valid].sum() * grid.dx)
    return Expectation(total, excluded_mass=excluded)


def mean_momentum(psi: WaveField, method: str = "fourier_sum") -> Expectation:
    """<p> by one of three equivalent routes.

    fourier_sum:  sum_k hbar k |Psi_k|^2
    real_space:   -i hbar * integral (psi* grad psi - psi grad psi*) / 2
    phase_form:   hbar * integral |psi|^2 grad S   (density-mask restricted)
    """
    g = psi.grid
    if method == "fourier_sum":
        coeffs = to_momentum(psi)
        return Expectation(float(np.sum(g.hbar * g.k * np.abs(coeffs) ** 2)))
    if method == "real_space":
        grad = spectral_gradient(psi.values, g)
        return Expectation(g.hbar * integrate((np.conj(psi.values) * grad).imag, g))
    if method == "phase_form":
        dens = psi.density()
        grad_s = phase_gradient(psi)
        contrib = np.where(grad_s.valid, dens * np.where(grad_s.valid, grad_s.values, 0.0), 0.0)
        out = _masked_integral(g.hbar * contrib, grad_s.valid, dens, g)
        return out
    raise UnsupportedMethodError(f"unknown momentum route {method!r}")


def mean_kinetic(psi: WaveField, method: str = "fourier_sum") -> Expectation:
    """<E_kin> by one of three equivalent routes.

    fourier_sum:   sum_k (hbar^2 k^2 / 2M) |Psi_k|^2
    real_space:    -(hbar^2/2M) * integral (psi* lap psi + psi lap psi*) / 2
    madelung_form: (hbar^2/2M) * integral |psi|^2 ((grad S)^2 - lap|psi| / |psi|)
    """
    g = psi.grid
    if method == "fourier_sum":
        coeffs = to_momentum(psi)
        return Expectation(float(np.sum(
            g.hbar**2 * g.k**2 / (2.0 * g.mass) * np.abs(coeffs) ** 2)))
    if method == "real_space":
        lap = spectral_laplacian(psi.values, g)
        val = -(g.hbar**2 / (2.0 * g.mass)) * integrate(
            (np.conj(psi.values) * lap).real, g)
        return Expectation(val)
    if method == "madelung_form":
        dens = psi.density()
        amp = np.sqrt(dens)
        grad_s = phase_gradient(psi)
        valid = grad_s.valid
        lap_amp = spectral_laplacian(amp, g)
        confinement = np.where(valid, lap_amp / np.where(valid, amp, 1.0), 0.0)
        gs2 = np.where(valid, grad_s.values, 0.0) ** 2
        contrib = g.hbar**2 / (2.0 * g.mass) * dens * (gs2 - confinement)
        return _masked_integral(contrib, valid, dens, g)
    raise UnsupportedMethodError(f"unknown kinetic route {method!r}")


def mean_total_energy(psi: WaveField, potential: PotentialSpec, t: float = 0.0,
                      method: str = "hamiltonian", n_max: int = 32) -> Expectation:
    """<E> by Hamiltonian sandwich, analytic time derivative, or eigen-expansion.

    The time_derivative route uses dpsi/dt from the equation's right-hand side,
    never numerical time differencing, so it must agree with the Hamiltonian
    route to round-off. eigen_expansion is defined for harmonic potentials only
    and reports its truncation through ``completeness_defect``.
    """
    g = psi.grid
    if method == "hamiltonian":
        h_psi = apply_hamiltonian(psi, potential, t)
        return Expectation(integrate((np.conj(psi.values) * h_psi.values), g).real)
    if method == "time_derivative":
        dpsi = time_derivative(psi, potential, t)
        return Expectation(-g.hbar * integrate(
            (np.conj(psi.values) * dpsi.values).imag, g))
    if method == "eigen_expansion":
        if not isinstance(potential, Harmonic):
            raise UnsupportedMethodError(
                "eigen_expansion is defined only for harmonic potentials")
        total = 0.0
        captured = 0.0
        for n in range(n_max + 1):
            try:
                basis = sample(HOEigenstate(n, potential.omega0, potential.center), g)
            except ConfigurationError:
                break  # basis no longer representable on this grid
            c = basis.inner(psi)
            w = abs(c) ** 2
            captured += w
            total += ho_energy(n, potential.omega0, g) * w
        return Expectation(total, completeness_defect=1.0 - captured)
    raise UnsupportedMethodError(f"unknown total-energy route {method!r}")


def quantum_potential(psi: WaveField, floor: float = DEFAULT_FLOOR):
    """Q = -hbar^2 lap|psi| / (2 M |psi|), NaN below the density floor.

    Homogeneous of degree zero in |psi|: rescaling the field leaves Q unchanged.
    Returns (values, valid mask).
    """
    g = psi.grid
    dens = psi.density()
    amp = np.sqrt(dens)
    valid = dens >= floor * dens.max()
    lap_amp = spectral_laplacian(amp, g)
    q = np.where(valid,
                 -(g.hbar**2 / (2.0 * g.mass)) * lap_amp / np.where(valid, amp, 1.0),
                 np.nan)
    return q, valid


def mean_quantum_potential(psi: WaveField, floor: float = DEFAULT_FLOOR) -> Expectation:
    """<Q> = integral rho Q dx over the valid mask."""
    dens = psi.density()
    q, valid = quantum_potential(psi, floor)
    contrib = np.where(valid, dens * np.where(valid, q, 0.0), 0.0)
    return _masked_integral(contrib, valid, dens, psi.grid)


@dataclass(frozen=True, eq=False)
class LocalFields:
    """Pointwise momentum/kinetic/energy fields derived from one wave function.

    Where the density is below the floor the phase-derived entries are NaN and
    ``valid_mask`` is False. ``current`` is the wave-function form
    (i hbar / 2M)(psi grad psi* - psi* grad psi); ``current_madelung`` is
    rho * u. The two agree within round-off wherever the mask holds.
    """

    grid: Grid
    density: np.ndarray
    momentum: np.ndarray
    kinetic: np.ndarray
    quantum_potential: np.ndarray
    current: np.ndarray
    current_madelung: np.ndarray
    velocity: np.ndarray
    total_energy: np.ndarray
    valid_mask: np.ndarray


def local_fields(psi: WaveField, potential: PotentialSpec, t: float = 0.0,
                 floor: float = DEFAULT_FLOOR) -> LocalFields:
    """All local fields at one instant.

    momentum = hbar grad S, kinetic = p^2/2M + Q, velocity = p/M,
    total_energy = -hbar Im(dpsi/dt / psi) with the analytic time derivative.
    """
    g = psi.grid
    dens = psi.density()
    grad_s = phase_gradient(psi, floor)
    valid = grad_s.valid
    p = g.hbar * grad_s.values
    q, _ = quantum_potential(psi, floor)
    kinetic = p**2 / (2.0 * g.mass) + q
    velocity = p / g.mass

    grad_psi = spectral_gradient(psi.values, g)
    current = g.hbar / g.mass * (np.conj(psi.values) * grad_psi).imag
    current_madelung = np.where(valid, dens * np.where(valid, velocity, 0.0), np.nan)

    dpsi = time_derivative(psi, potential, t)
    ratio = np.where(valid, dpsi.values / np.where(valid, psi.values, 1.0), np.nan)
    total_energy = -g.hbar * ratio.imag

    return LocalFields(grid=g, density=dens, momentum=p, kinetic=kinetic,
                       quantum_potential=q, current=current,
                       current_madelung=current_madelung, velocity=velocity,
                       total_energy=total_energy, valid_mask=valid)


def fisher_information(psi: WaveField, method: str = "log_gradient",
                       floor: float = DEFAULT_FLOOR) -> Expectation:
    """Position Fisher information by two equivalent forms.

    log_gradient:   integral rho (grad ln rho)^2 dx  =  integral (grad rho)^2 / rho dx
    laplacian_form: -4 * integral |psi| lap|psi| dx
    Also satisfies FI = 8 M <Q> / hbar^2.
    """
    g = psi.grid
    dens = psi.density()
    valid = dens >= floor * dens.max()
    if method == "log_gradient":
        grad_rho = spectral_gradient(dens, g)
        contrib = np.where(valid, grad_rho**2 / np.where(valid, dens, 1.0), 0.0)
        return _masked_integral(contrib, valid, dens, g)
    if method == "laplacian_form":
        amp = np.sqrt(dens)
        lap_amp = spectral_laplacian(amp, g)
        contrib = np.where(valid, -4.0 * amp * lap_amp, 0.0)
        return _masked_integral(contrib, valid, dens, g)
    raise UnsupportedMethodError(f"unknown Fisher route {method!r}")
