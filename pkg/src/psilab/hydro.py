"""Direct integration of the density/phase pair as coupled real PDEs.

The solver advances rho and S under

    d rho / dt = -d/dx (rho * hbar * dS/dx / M)
    d S   / dt = -(hbar/2M) (dS/dx)^2 + (hbar/2M) (d^2 sqrt(rho)/dx^2) / sqrt(rho) - V/hbar

with classical 4-stage Runge-Kutta and spectral spatial derivatives. It is a
nodeless-regime solver: the quantum-pressure term is singular at nodes, so any
density below the hard floor aborts the run instead of being regularized.

S is stored unwrapped and unbounded (it drifts linearly in time for stationary
states). It need only be periodic modulo an integer winding ramp 2*pi*w*x/L;
the winding is a conserved topological integer for nodeless states and is
split off before any spectral derivative.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ConfigurationError, DensityFloorError, NumericalError, StructuralError
from .grid import (DEFAULT_FLOOR, Grid, MadelungField, WaveField, decompose,
                   spectral_gradient, spectral_laplacian)
from .potentials import PotentialSpec, is_time_independent, sample_potential
from .propagators import evolve

HARD_FLOOR = 1e-9  # of max density; below this the nodeless regime is gone
RENORM_LIMIT = 1e-9  # max tolerated mass defect per step before renormalization

_FILTER_CUTOFF = 0.58  # of k_max; zero beyond, smooth exp rolloff below
_FILTER_STRENGTH = 36.0
_FILTER_ORDER = 24


@lru_cache(maxsize=8)
def _spectral_tables(n: int, dx: float):
    """rfft wavenumbers, derivative multipliers, and the dealiasing filter.

    The right-hand sides are low-passed: flat to ~0.34 k_max, smooth
    exponential rolloff, exactly zero above _FILTER_CUTOFF * k_max. Two jobs:
    (1) kill the feedback loop in which per-point noise near the density
    minimum is amplified by k^2 / rho_min through the quantum-pressure term
    (the unfiltered solver blows up within a step on tight-tailed states), and
    (2) keep every retained mode inside the RK4 imaginary-axis stability
    region, so the stable step obeys (hbar/2M) (cutoff*k_max)^2 dt <= 2.8.
    Resolved physics must live below the rolloff; that is the solver's
    resolution contract.
    """
    k = 2.0 * np.pi * np.fft.rfftfreq(n, d=dx)
    k_c = _FILTER_CUTOFF * k[-1]
    filt = np.exp(-_FILTER_STRENGTH * (k / k_c) ** _FILTER_ORDER)
    filt[k > k_c] = 0.0
    grad_mult = 1j * k
    if n % 2 == 0:
        grad_mult = grad_mult.copy()
        grad_mult[-1] = 0.0
    return k, grad_mult, -(k**2), filt


@dataclass(frozen=True, eq=False)
class HydroState:
    """A Madelung field at one instant of the hydrodynamic evolution."""

    field: MadelungField
    time: float = 0.0


def phase_winding(phase: np.ndarray, grid: Grid) -> int:
    """Integer winding (1/2pi) * closed-loop integral of dS, from cyclic differences."""
    d = np.diff(phase, append=phase[:1])
    wrapped = (d + np.pi) % (2.0 * np.pi) - np.pi
    return int(round(wrapped.sum() / (2.0 * np.pi)))


def _gradient_with_winding(phase: np.ndarray, grid: Grid) -> np.ndarray:
    """dS/dx for a phase that is periodic modulo an integer winding ramp."""
    w = phase_winding(phase, grid)
    ramp_rate = 2.0 * np.pi * w / grid.length
    periodic_part = phase - ramp_rate * grid.x
    return ramp_rate + spectral_gradient(periodic_part, grid)


def _rhs(rho: np.ndarray, phase: np.ndarray, t: float, grid: Grid,
         hard_floor: float, v_samples: np.ndarray, winding: int | None):
    peak = rho.max()
    if rho.min() < hard_floor * peak:
        raise DensityFloorError(
            f"density fell below {hard_floor:g} of max at t = {t:g}; "
            "the nodeless-regime solver refuses to continue", time=t)
    n = grid.n_points
    hbar, mass = grid.hbar, grid.mass
    _, grad_mult, lap_mult, filt = _spectral_tables(n, grid.dx)

    w = phase_winding(phase, grid) if winding is None else winding
    ramp_rate = 2.0 * np.pi * w / grid.length
    grad_s = ramp_rate + np.fft.irfft(grad_mult * np.fft.rfft(phase - ramp_rate * grid.x), n=n)
    flux = rho * (hbar / mass) * grad_s
    drho = -np.fft.irfft(filt * grad_mult * np.fft.rfft(flux), n=n)
    amp = np.sqrt(rho)
    lap_amp = np.fft.irfft(lap_mult * np.fft.rfft(amp), n=n)
    ds = (-(hbar / (2.0 * mass)) * grad_s**2
          + (hbar / (2.0 * mass)) * lap_amp / amp
          - v_samples / hbar)
    ds = np.fft.irfft(filt * np.fft.rfft(ds), n=n)
    return drho, ds


def madelung_rhs(state: HydroState, potential: PotentialSpec,
                 hard_floor: float = HARD_FLOOR):
    """(d rho/dt, d S/dt) at the state's instant; spectral spatial derivatives."""
    grid = state.field.grid
    return _rhs(np.asarray(state.field.density), np.asarray(state.field.phase),
                state.time, grid, hard_floor,
                sample_potential(potential, state.time, grid), None)


def hydro_step(state: HydroState, potential: PotentialSpec, dt: float,
               hard_floor: float = HARD_FLOOR) -> HydroState:
    """One classical RK4 step on the (rho, S) vector field.

    The density is renormalized afterwards; the pre-renormalization mass defect
    must stay below RENORM_LIMIT or the step raises. The phase winding, a
    conserved integer for nodeless states, is extracted once per step.
    """
    grid = state.field.grid
    rho0 = np.asarray(state.field.density, dtype=np.float64)
    s0 = np.asarray(state.field.phase, dtype=np.float64)
    t = state.time
    if dt == 0.0:
        return state

    w = phase_winding(s0, grid)
    v_0 = sample_potential(potential, t, grid)
    if is_time_independent(potential):
        v_mid, v_1 = v_0, v_0
    else:
        v_mid = sample_potential(potential, t + 0.5 * dt, grid)
        v_1 = sample_potential(potential, t + dt, grid)

    k1r, k1s = _rhs(rho0, s0, t, grid, hard_floor, v_0, w)
    k2r, k2s = _rhs(rho0 + 0.5 * dt * k1r, s0 + 0.5 * dt * k1s,
                    t + 0.5 * dt, grid, hard_floor, v_mid, w)
    k3r, k3s = _rhs(rho0 + 0.5 * dt * k2r, s0 + 0.5 * dt * k2s,
                    t + 0.5 * dt, grid, hard_floor, v_mid, w)
    k4r, k4s = _rhs(rho0 + dt * k3r, s0 + dt * k3s,
                    t + dt, grid, hard_floor, v_1, w)
    rho1 = rho0 + dt / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r)
    s1 = s0 + dt / 6.0 * (k1s + 2.0 * k2s + 2.0 * k3s + k4s)

    if rho1.min() < 0.0:
        if rho1.min() < -hard_floor * rho1.max():
            raise DensityFloorError(
                f"density went negative at t = {t + dt:g}", time=t + dt)
        rho1 = np.clip(rho1, 0.0, None)
    mass = float(rho1.sum() * grid.dx)
    defect = abs(mass - 1.0)
    if defect > RENORM_LIMIT:
        raise NumericalError(
            f"mass defect {defect:.3e} exceeds {RENORM_LIMIT:g} per step at t = {t + dt:g}")
    rho1 = rho1 / mass
    field = MadelungField(grid, rho1, s1)
    return HydroState(field, t + dt)


@dataclass(frozen=True, eq=False)
class HydroResult:
    """Hydrodynamic trajectory snapshots plus bookkeeping."""

    snapshots: tuple
    times: tuple
    max_renorm_defect: float

    @property
    def final(self) -> HydroState:
        return self.snapshots[-1]


def run_hydro(initial: HydroState, potential: PotentialSpec, t1: float, dt: float,
              snapshot_every: int = 1, hard_floor: float = HARD_FLOOR) -> HydroResult:
    """Step from the initial state to t1, capturing snapshots like propagators.evolve."""
    if snapshot_every < 1:
        raise ConfigurationError("snapshot_every must be >= 1")
    span = t1 - initial.time
    if span == 0.0:
        return HydroResult((initial,), (initial.time,), 0.0)
    if dt == 0.0 or span / dt <= 0.0:
        raise ConfigurationError(f"dt = {dt:g} cannot reach t1 = {t1:g}")
    n_steps = int(round(span / dt))
    if n_steps < 1 or abs(n_steps * dt - span) > 1e-9 * max(abs(span), abs(dt)):
        raise ConfigurationError(
            f"dt = {dt:g} does not divide the interval of length {span:g}")
    state = initial
    snapshots = [initial]
    times = [initial.time]
    max_defect = 0.0
    for m in range(1, n_steps + 1):
        pre_mass = float(np.asarray(state.field.density).sum() * state.field.grid.dx)
        state = hydro_step(state, potential, dt, hard_floor)
        max_defect = max(max_defect, abs(pre_mass - 1.0))
        if m % snapshot_every == 0 or m == n_steps:
            snapshots.append(state)
            times.append(state.time)
    return HydroResult(tuple(snapshots), tuple(times), max_defect)


@dataclass(frozen=True, eq=False)
class EquivalenceReport:
    """Hydro vs. wave-equation trajectory differences as functions of time.

    Both trajectories start from the same initial condition; the wave-equation
    snapshots are decomposed so all three metrics compare like with like:
    plain L2 density difference, density-weighted L2 velocity difference, and
    density-weighted RMS phase difference modulo a global constant. Velocity
    and phase are weighted because S and u are physically meaningless where
    the density vanishes; the density metric needs no weight.
    """

    times: tuple
    density_l2: tuple
    velocity_l2: tuple
    phase_dev: tuple

    def max_density_l2(self) -> float:
        return max(self.density_l2)


def equivalence_report(psi0: WaveField, potential: PotentialSpec, t1: float,
                       dt: float, snapshot_every: int = 1,
                       hard_floor: float = HARD_FLOOR) -> EquivalenceReport:
    """Run both solvers from psi0 and report their drift apart over [0, t1].

    The caller asserts psi0 stays nodeless on [0, t1]; a floor breach aborts.
    """
    grid = psi0.grid
    m0 = decompose(psi0)
    hydro = run_hydro(HydroState(m0, 0.0), potential, t1, dt, snapshot_every,
                      hard_floor=hard_floor)
    schro = evolve(psi0, potential, 0.0, t1, dt, scheme="split",
                   snapshot_every=snapshot_every)
    if len(hydro.times) != len(schro.times):
        raise StructuralError("snapshot schedules diverged between the two solvers")

    dens_l2, vel_l2, phase_rms = [], [], []
    for h_state, psi in zip(hydro.snapshots, schro.snapshots):
        rho_h = np.asarray(h_state.field.density)
        s_h = np.asarray(h_state.field.phase)
        m_s = decompose(psi)
        rho_s = np.asarray(m_s.density)
        s_s = np.asarray(m_s.phase)

        dens_l2.append(float(np.sqrt(((rho_h - rho_s) ** 2).sum() * grid.dx)))

        u_h = (grid.hbar / grid.mass) * _gradient_with_winding(s_h, grid)
        u_s = (grid.hbar / grid.mass) * _gradient_with_winding(s_s, grid)
        vel_l2.append(float(np.sqrt((rho_s * (u_h - u_s) ** 2).sum() * grid.dx)))

        delta = s_h - s_s
        mean_angle = np.angle(np.sum(rho_s * np.exp(1j * delta)))
        residual = (delta - mean_angle + np.pi) % (2.0 * np.pi) - np.pi
        phase_rms.append(float(np.sqrt((rho_s * residual**2).sum() * grid.dx)))

    return EquivalenceReport(tuple(schro.times), tuple(dens_l2), tuple(vel_l2),
                             tuple(phase_rms))
