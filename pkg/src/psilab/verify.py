"""Executable forms of the derivational claims: residuals, potential recovery,
plane-wave dispersion, the classical limit, and tunneling.

Time derivatives are always taken analytically from the equation's right-hand
side, so the continuity and phase-evolution residuals reflect spatial
discretization only — for well-resolved states they sit at transform round-off.
The classical-limit probe sweeps hbar only; the large-velocity reading of the
limit is not tested here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .errors import ConfigurationError, StructuralError
from .grid import (DEFAULT_FLOOR, Grid, WaveField, integrate, phase_gradient,
                   spectral_gradient, spectral_laplacian)
from .observables import mean_kinetic, mean_quantum_potential, mean_total_energy
from .potentials import Barrier, Constant, PotentialSpec, potential_gradient, sample_potential
from .propagators import EvolutionResult, evolve, time_derivative
from .states import GaussianPacket, PlaneWave, StateSpec, sample


@dataclass(frozen=True, eq=False)
class ResidualSeries:
    """Per-snapshot L2 residuals of the continuity and phase-evolution equations.

    ``mask_fraction`` is the probability mass excluded from the (density-floor
    masked) phase-evolution residual at each time.
    """

    times: tuple
    continuity_residual: tuple
    qhj_residual: tuple
    mask_fraction: tuple

    def max_continuity(self) -> float:
        return max(self.continuity_residual)

    def max_qhj(self) -> float:
        return max(self.qhj_residual)


RESIDUAL_FLOOR = 1e-6  # relative density mask for the phase-evolution residual


def residuals(trajectory: EvolutionResult, potential: PotentialSpec,
              floor: float = RESIDUAL_FLOOR) -> ResidualSeries:
    """Continuity and quantum Hamilton-Jacobi residuals along a trajectory.

    d rho/dt = 2 Re(psi* dpsi/dt) and dS/dt = Im(dpsi/dt / psi) come from the
    analytic right-hand side, never from differencing stored snapshots. The
    continuity residual involves no division and is unmasked; the
    phase-evolution residual divides by |psi|, which amplifies transform
    round-off by 1/|psi| at deep-tail nodes, so it is masked at a higher
    default floor than the phase-validity one; the excluded probability mass
    is reported per time.
    """
    cont, qhj, excluded = [], [], []
    for psi, t in zip(trajectory.snapshots, trajectory.times):
        g = psi.grid
        v = psi.values
        dens = psi.density()
        dpsi = time_derivative(psi, potential, t).values

        drho_dt = 2.0 * (np.conj(v) * dpsi).real
        current = g.hbar / g.mass * (np.conj(v) * spectral_gradient(v, g)).imag
        r_cont = drho_dt + spectral_gradient(current, g)
        cont.append(float(np.sqrt((r_cont**2).sum() * g.dx)))

        valid = dens >= floor * dens.max()
        ds_dt = np.where(valid, (dpsi / np.where(valid, v, 1.0)).imag, 0.0)
        grad_s = phase_gradient(psi, floor)
        amp = np.sqrt(dens)
        lap_amp = spectral_laplacian(amp, g)
        confinement = np.where(valid, lap_amp / np.where(valid, amp, 1.0), 0.0)
        gs2 = np.where(valid, grad_s.values, 0.0) ** 2
        v_pot = sample_potential(potential, t, g)
        r_qhj = (g.hbar * ds_dt
                 + g.hbar**2 / (2.0 * g.mass) * (gs2 - confinement)
                 + v_pot)
        qhj.append(float(np.sqrt((np.where(valid, r_qhj, 0.0) ** 2).sum() * g.dx)))
        excluded.append(float(dens[~valid].sum() * g.dx))
    return ResidualSeries(tuple(trajectory.times), tuple(cont), tuple(qhj),
                          tuple(excluded))


@dataclass(frozen=True, eq=False)
class RecoveredPotential:
    """Pointwise potential pulled back out of a solution snapshot."""

    values: np.ndarray      # real part of the quotient; NaN off the mask
    valid: np.ndarray
    max_imag: float


def recover_potential(psi: WaveField, v_true: PotentialSpec, t: float = 0.0,
                      floor: float = DEFAULT_FLOOR) -> RecoveredPotential:
    """V = (i hbar dpsi/dt + (hbar^2/2M) lap psi) / psi, with dpsi/dt from v_true.

    For a genuine solution snapshot the quotient is real and reproduces the
    sampled potential; max |imaginary part| over the mask is returned as the
    reality check.
    """
    g = psi.grid
    v = psi.values
    dens = psi.density()
    valid = dens >= floor * dens.max()
    dpsi = time_derivative(psi, v_true, t).values
    numerator = (1j * g.hbar * dpsi
                 + g.hbar**2 / (2.0 * g.mass) * spectral_laplacian(v, g))
    quotient = np.where(valid, numerator / np.where(valid, v, 1.0), np.nan)
    max_imag = float(np.abs(quotient.imag[valid]).max()) if valid.any() else math.nan
    return RecoveredPotential(quotient.real, valid, max_imag)


def dispersion_check(k0: float, v0: float, grid: Grid, t_final: float,
                     dt: float, snapshot_every: int = 10):
    """Evolve a plane wave under constant v0 and fit its global phase rate.

    Returns (omega_measured, omega_predicted) with the prediction
    hbar k0^2 / 2M + v0 / hbar. The phase is read from arg<psi(0)|psi(t)>
    unwrapped over snapshots, which is node-free and exact for plane waves.
    """
    psi0 = sample(PlaneWave(k0), grid)
    traj = evolve(psi0, Constant(v0), 0.0, t_final, dt, scheme="split",
                  snapshot_every=snapshot_every)
    phases = np.unwrap([np.angle(psi0.inner(p)) for p in traj.snapshots])
    times = np.asarray(traj.times)
    slope = np.polynomial.polynomial.polyfit(times, phases, 1)[1]
    omega_measured = -float(slope)
    omega_predicted = grid.hbar * k0**2 / (2.0 * grid.mass) + v0 / grid.hbar
    return omega_measured, omega_predicted


def classical_rk4(potential: PotentialSpec, x0: float, p0: float, t_final: float,
                  dt: float, grid: Grid, times=None):
    """Reference point-particle integrator: RK4 on dx/dt = p/M, dp/dt = -dV/dx.

    Independent of all wave-function machinery; uses only the analytic
    potential gradient. Returns (times, xs, ps) at the requested times
    (defaults to every step).
    """
    mass = grid.mass

    def deriv(t, x, p):
        return p / mass, -float(potential_gradient(potential, t, x, grid))

    n_steps = int(round(t_final / dt))
    if abs(n_steps * dt - t_final) > 1e-9 * max(t_final, dt):
        raise ConfigurationError(f"dt = {dt:g} does not divide t_final = {t_final:g}")
    ts = [0.0]
    xs = [x0]
    ps = [p0]
    x, p = x0, p0
    for m in range(1, n_steps + 1):
        t = (m - 1) * dt
        k1x, k1p = deriv(t, x, p)
        k2x, k2p = deriv(t + 0.5 * dt, x + 0.5 * dt * k1x, p + 0.5 * dt * k1p)
        k3x, k3p = deriv(t + 0.5 * dt, x + 0.5 * dt * k2x, p + 0.5 * dt * k2p)
        k4x, k4p = deriv(t + dt, x + dt * k3x, p + dt * k3p)
        x = x + dt / 6.0 * (k1x + 2 * k2x + 2 * k3x + k4x)
        p = p + dt / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p)
        ts.append(m * dt)
        xs.append(x)
        ps.append(p)
    ts = np.asarray(ts)
    xs = np.asarray(xs)
    ps = np.asarray(ps)
    if times is not None:
        xs = np.interp(times, ts, xs)
        ps = np.interp(times, ts, ps)
        ts = np.asarray(times)
    return ts, xs, ps


@dataclass(frozen=True, eq=False)
class ClassicalRun:
    """hbar sweep of the packet-centroid error against the point-particle oracle.

    ``quantum_potential_share`` is <Q>/<E_kin> at t = 0 per hbar; its log-log
    slope against hbar is the confinement-term scaling exponent (2 for a fixed
    packet width). ``ehrenfest_degenerate`` flags potentials (quadratic) whose
    centroid follows the classical trajectory exactly, making the decrease test
    vacuous.
    """

    hbar_values: tuple
    packet_center_error: tuple
    quantum_potential_share: tuple
    resolved: tuple
    ehrenfest_degenerate: bool

    def share_slope(self) -> float:
        """Least-squares log-log slope of the quantum-potential share vs hbar."""
        ok = [i for i, r in enumerate(self.resolved) if r]
        if len(ok) < 2:
            raise StructuralError("need >= 2 resolved sweep entries for a slope")
        lh = np.log([self.hbar_values[i] for i in ok])
        ls = np.log([self.quantum_potential_share[i] for i in ok])
        return float(np.polynomial.polynomial.polyfit(lh, ls, 1)[1])

    def error_decreasing(self, slack: float = 0.10) -> bool:
        """True when the centroid error never grows by more than ``slack`` as hbar drops."""
        errs = [e for e, r in zip(self.packet_center_error, self.resolved) if r]
        return all(b <= a * (1.0 + slack) for a, b in zip(errs, errs[1:]))


EHRENFEST_TOL = 1e-5  # absolute centroid error below which the sweep is degenerate


def classical_limit_sweep(potential: PotentialSpec, x0: float, p0: float,
                          sigma0: float, hbar_values, t_final: float, dt: float,
                          grid: Grid, snapshot_every: int = 20) -> ClassicalRun:
    """Sweep hbar downward and compare the packet centroid with classical motion.

    The packet width sigma0 is held fixed across the sweep (so the confinement
    share scales as hbar^2); its carrier wavenumber p0/hbar grows as hbar
    shrinks, and any entry whose packet stops fitting the grid is marked
    unresolved rather than failing the run.
    """
    hbar_values = tuple(float(h) for h in hbar_values)
    if len(hbar_values) == 0:
        raise StructuralError("empty hbar sweep")
    if any(b >= a for a, b in zip(hbar_values, hbar_values[1:])):
        raise StructuralError("hbar sweep must be strictly decreasing")

    errors, shares, resolved = [], [], []
    for hbar in hbar_values:
        g = replace(grid, hbar=hbar)
        spec = GaussianPacket(sigma0=sigma0, k0=p0 / hbar, x0=x0)
        try:
            psi0 = sample(spec, g)
            _guard_band(spec, g)
        except ConfigurationError:
            errors.append(math.nan)
            shares.append(math.nan)
            resolved.append(False)
            continue
        share = (mean_quantum_potential(psi0)
                 / mean_kinetic(psi0, method="fourier_sum"))
        traj = evolve(psi0, potential, 0.0, t_final, dt, scheme="split",
                      snapshot_every=snapshot_every)
        centroids = [integrate(p.density() * g.x, g) for p in traj.snapshots]
        _, x_cl, _ = classical_rk4(potential, x0, p0, t_final, dt, g,
                                   times=traj.times)
        errors.append(float(np.abs(np.asarray(centroids) - x_cl).max()))
        shares.append(float(share))
        resolved.append(True)

    finite = [e for e, r in zip(errors, resolved) if r]
    degenerate = len(finite) > 0 and max(finite) < EHRENFEST_TOL
    return ClassicalRun(hbar_values, tuple(errors), tuple(shares),
                        tuple(resolved), degenerate)


def _guard_band(spec: GaussianPacket, grid: Grid):
    # The carrier plus envelope bandwidth must fit inside the resolvable band.
    k_need = abs(spec.k0) + 5.0 / spec.sigma0
    k_max = np.pi / grid.dx
    if k_need > 0.8 * k_max:
        raise ConfigurationError(
            f"carrier k0 = {spec.k0:g} pushes the packet band past the grid limit")


@dataclass(frozen=True, eq=False)
class TunnelingReport:
    """Outcome of driving a sub-barrier packet into a barrier."""

    applicable: bool            # barrier present and mean energy below it
    mean_energy: float
    barrier_height: float
    transmitted_mass: float     # probability beyond x_b at t_final
    min_kinetic_in_barrier: float  # min over snapshots of the local kinetic field inside


def tunneling_probe(barrier: PotentialSpec, packet: StateSpec, t_final: float,
                    dt: float, grid: Grid, snapshot_every: int = 50) -> TunnelingReport:
    """Evolve a packet at a barrier; report transmitted mass and the local
    kinetic-energy minimum inside the barrier (negative in the forbidden region).
    """
    from .observables import local_fields  # local import keeps module load cheap

    psi0 = sample(packet, grid)
    energy = float(mean_total_energy(psi0, barrier, 0.0, method="hamiltonian"))
    if isinstance(barrier, Barrier):
        height = barrier.v0
        applicable = energy < height
        inside = (grid.x >= barrier.x_a) & (grid.x <= barrier.x_b)
        beyond = grid.x > barrier.x_b
    else:
        height = 0.0
        applicable = False
        inside = np.zeros(grid.n_points, dtype=bool)
        beyond = grid.x > grid.center

    traj = evolve(psi0, barrier, 0.0, t_final, dt, scheme="split",
                  snapshot_every=snapshot_every)
    transmitted = float(traj.final.density()[beyond].sum() * grid.dx)

    min_kin = math.inf
    if inside.any():
        for psi in traj.snapshots:
            fields = local_fields(psi, barrier, 0.0)
            picks = inside & fields.valid_mask
            if picks.any():
                min_kin = min(min_kin, float(np.nanmin(fields.kinetic[picks])))
    if not math.isfinite(min_kin):
        min_kin = math.nan
    return TunnelingReport(applicable, energy, height, transmitted, min_kin)
