"""Scenario execution: propagate, run the requested checks, emit series files.

Everything written to disk is deterministic: fixed 17-significant-digit
formatting, name-sorted aggregation, and no wall-clock in any file (the
in-memory report carries wall-clock for console display only).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import UnsupportedMethodError
from .grid import WaveField, decompose, integrate
from .hydro import equivalence_report
from .observables import (fisher_information, local_fields, mean_kinetic,
                          mean_momentum, mean_quantum_potential,
                          mean_total_energy)
from .potentials import Constant, Quartic, is_time_independent, sample_potential
from .propagators import EvolutionResult, evolve
from .scenario import Scenario
from .states import PlaneWave, sample
from .verify import (classical_limit_sweep, dispersion_check, recover_potential,
                     residuals, tunneling_probe)

FMT = "%.16e"  # 17 significant digits


@dataclass(frozen=True)
class CheckResult:
    name: str
    tolerance: float | None
    measured: tuple
    passed: bool
    detail: str


@dataclass(frozen=True, eq=False)
class ScenarioReport:
    name: str
    checks: tuple
    passed: bool
    provenance: dict  # grid/scheme/dt plus wall_clock (console only)

    def summary_lines(self):
        lines = []
        for c in self.checks:
            verdict = "pass" if c.passed else "FAIL"
            tol = "on" if c.tolerance is None else FMT % c.tolerance
            meas = " ".join(FMT % m for m in c.measured)
            lines.append(f"check {c.name} measured={meas} tolerance={tol} "
                         f"verdict={verdict} detail={c.detail}")
        lines.append("overall " + ("pass" if self.passed else "FAIL"))
        return lines


class _Context:
    """Lazily evaluated shared artifacts for the checks of one scenario."""

    def __init__(self, scenario: Scenario, scheme: str):
        self.scenario = scenario
        self.scheme = scheme
        self.grid = scenario.grid
        self.psi0 = sample(scenario.state, scenario.grid,
                           tail_tol=scenario.tail_tol)
        self._trajectory = None
        self._residuals = None

    @property
    def trajectory(self) -> EvolutionResult:
        if self._trajectory is None:
            s = self.scenario.schedule
            self._trajectory = evolve(self.psi0, self.scenario.potential,
                                      s.t0, s.t1, s.dt, scheme=self.scheme,
                                      snapshot_every=s.snapshot_every)
        return self._trajectory

    @property
    def residual_series(self):
        if self._residuals is None:
            self._residuals = residuals(self.trajectory, self.scenario.potential)
        return self._residuals


def _check_norm_drift(ctx, tol):
    d = ctx.trajectory.norm_drift
    return (d,), d < tol, "max | ||psi||^2 - 1 | over the run"


def _check_energy_drift(ctx, tol):
    if not is_time_independent(ctx.scenario.potential):
        return (math.nan,), False, "energy_drift requires a time-independent potential"
    traj = ctx.trajectory
    es = [float(mean_total_energy(p, ctx.scenario.potential, t, "hamiltonian"))
          for p, t in zip(traj.snapshots, traj.times)]
    drift = max(abs(e - es[0]) for e in es) / max(abs(es[0]), 1e-300)
    return (drift,), drift < tol, "relative <E> drift across snapshots"


def _check_stationarity(ctx, tol):
    overlap = abs(ctx.psi0.inner(ctx.trajectory.final))
    dev = abs(overlap - 1.0)
    return (dev,), dev < tol, "| |<psi(T)|psi(0)>| - 1 |"


def _check_total_energy_constant(ctx, tol):
    fields = local_fields(ctx.trajectory.final, ctx.scenario.potential,
                          ctx.trajectory.times[-1], floor=1e-9)
    e = fields.total_energy[fields.valid_mask]
    spread = float(e.max() - e.min())
    return (spread,), spread < tol, "spread of the local total-energy field (masked)"


def _check_continuity_residual(ctx, tol):
    worst = ctx.residual_series.max_continuity()
    return (worst,), worst < tol, "max L2 continuity residual over snapshots"


def _check_qhj_residual(ctx, tol):
    worst = ctx.residual_series.max_qhj()
    frac = max(ctx.residual_series.mask_fraction)
    return (worst, frac), worst < tol, \
        "max masked L2 phase-evolution residual; excluded mass alongside"


def _check_recover_potential(ctx, tol):
    traj = ctx.trajectory
    rec = recover_potential(traj.final, ctx.scenario.potential, traj.times[-1])
    v_true = sample_potential(ctx.scenario.potential, traj.times[-1], ctx.grid)
    err = float(np.abs(rec.values[rec.valid] - v_true[rec.valid]).max())
    worst = max(err, rec.max_imag)
    return (err, rec.max_imag), worst < tol, \
        "max |V_rec - V_true| on mask and max |Im| of the quotient"


def _check_dispersion(ctx, tol):
    state = ctx.scenario.state
    pot = ctx.scenario.potential
    if not isinstance(state, PlaneWave):
        return (math.nan,), False, "dispersion requires a plane_wave state"
    if isinstance(pot, Constant):
        v0 = pot.v0
    elif is_time_independent(pot) and not isinstance(pot, Quartic) \
            and np.ptp(sample_potential(pot, 0.0, ctx.grid)) == 0.0:
        v0 = float(sample_potential(pot, 0.0, ctx.grid)[0])
    else:
        return (math.nan,), False, "dispersion requires a constant potential"
    s = ctx.scenario.schedule
    measured, predicted = dispersion_check(state.k0, v0, ctx.grid, s.t1 - s.t0,
                                           s.dt, snapshot_every=s.snapshot_every)
    err = abs(measured - predicted)
    return (measured, predicted, err), err < tol, \
        "fitted phase rate vs hbar k^2 / 2M + V/hbar"


def _check_three_route_momentum(ctx, tol):
    vals = [float(mean_momentum(ctx.psi0, m))
            for m in ("fourier_sum", "real_space", "phase_form")]
    spread = max(vals) - min(vals)
    return tuple(vals) + (spread,), spread < tol, "fourier/real-space/phase routes"


def _check_three_route_kinetic(ctx, tol):
    vals = [float(mean_kinetic(ctx.psi0, m))
            for m in ("fourier_sum", "real_space", "madelung_form")]
    spread = max(vals) - min(vals)
    return tuple(vals) + (spread,), spread < tol, "fourier/real-space/madelung routes"


def _check_fisher(ctx, tol):
    f1 = float(fisher_information(ctx.psi0, "log_gradient"))
    f2 = float(fisher_information(ctx.psi0, "laplacian_form"))
    q = float(mean_quantum_potential(ctx.psi0))
    g = ctx.grid
    rel = abs(f1 - f2) / max(abs(f1), 1e-300)
    q_dev = abs(f2 * g.hbar**2 / (8.0 * g.mass) - q)
    worst = max(rel, q_dev)
    return (f1, f2, rel, q_dev), worst < tol, \
        "two-form relative deviation and the mean-quantum-potential identity"


def _check_local_balance(ctx, tol):
    fields = local_fields(ctx.trajectory.final, ctx.scenario.potential,
                          ctx.trajectory.times[-1], floor=1e-9)
    m = fields.valid_mask
    eq7 = float(np.abs(fields.kinetic
                       - (fields.momentum**2 / (2.0 * ctx.grid.mass)
                          + fields.quantum_potential))[m].max())
    two_form = float(np.abs(fields.current - fields.current_madelung)[m].max())
    worst = max(eq7, two_form)
    return (eq7, two_form), worst < tol, \
        "pointwise kinetic decomposition and current two-form agreement"


def _check_equivalence_density(ctx, tol):
    s = ctx.scenario.schedule
    rep = equivalence_report(ctx.psi0, ctx.scenario.potential, s.t1 - s.t0,
                             s.dt, snapshot_every=s.snapshot_every)
    worst = max(rep.density_l2)
    return (worst, max(rep.velocity_l2), max(rep.phase_dev)), worst < tol, \
        "max L2 density difference, hydro vs wave trajectory"


def _check_tunneling(ctx, _tol):
    s = ctx.scenario.schedule
    rep = tunneling_probe(ctx.scenario.potential, ctx.scenario.state,
                          s.t1 - s.t0, s.dt, ctx.grid,
                          snapshot_every=s.snapshot_every)
    if not rep.applicable:
        return (rep.transmitted_mass, rep.min_kinetic_in_barrier), False, \
            "not applicable: no barrier above the packet's mean energy"
    ok = rep.transmitted_mass > 0.0 and rep.min_kinetic_in_barrier < 0.0
    return (rep.transmitted_mass, rep.min_kinetic_in_barrier), ok, \
        "transmitted probability > 0 and min local kinetic < 0 inside barrier"


def _check_classical_limit(ctx, tol):
    spec = ctx.scenario.classical
    run = classical_limit_sweep(ctx.scenario.potential,
                                ctx.grid.center + spec.x0_offset, spec.p0,
                                spec.sigma0, spec.hbar_values, spec.t_final,
                                spec.dt, ctx.grid)
    slope = run.share_slope()
    slope_ok = abs(slope - 2.0) < tol
    if run.ehrenfest_degenerate:
        return (slope,), slope_ok, \
            "Ehrenfest-degenerate potential: centroid errors at quadrature level"
    decrease_ok = run.error_decreasing()
    return (slope,) + run.packet_center_error, slope_ok and decrease_ok, \
        "share slope vs 2 and monotone centroid-error decrease"


_CHECKS = {
    "norm_drift": _check_norm_drift,
    "energy_drift": _check_energy_drift,
    "stationarity": _check_stationarity,
    "total_energy_constant": _check_total_energy_constant,
    "continuity_residual": _check_continuity_residual,
    "qhj_residual": _check_qhj_residual,
    "recover_potential": _check_recover_potential,
    "dispersion": _check_dispersion,
    "three_route_momentum": _check_three_route_momentum,
    "three_route_kinetic": _check_three_route_kinetic,
    "fisher": _check_fisher,
    "local_balance": _check_local_balance,
    "equivalence_density": _check_equivalence_density,
    "tunneling": _check_tunneling,
    "classical_limit": _check_classical_limit,
}


def run(scenario: Scenario, out_dir=None, scheme: str = "split") -> ScenarioReport:
    """Execute a scenario: propagate, evaluate its checks, write its outputs."""
    started = time.perf_counter()
    ctx = _Context(scenario, scheme)
    results = []
    for check in scenario.checks:
        measured, passed, detail = _CHECKS[check.name](ctx, check.tolerance)
        results.append(CheckResult(check.name, check.tolerance,
                                   tuple(float(m) for m in measured), passed, detail))
    overall = all(r.passed for r in results)
    provenance = {
        "grid": f"n={scenario.grid.n_points} length={FMT % scenario.grid.length} "
                f"hbar={FMT % scenario.grid.hbar} mass={FMT % scenario.grid.mass}",
        "scheme": scheme,
        "dt": FMT % scenario.schedule.dt,
        "wall_clock": time.perf_counter() - started,
    }
    report = ScenarioReport(scenario.name, tuple(results), overall, provenance)
    if out_dir is not None:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        emit_series(ctx.trajectory if _needs_trajectory(scenario) else None,
                    scenario, out)
        write_report(report, out / f"{scenario.name}__report.txt")
    return report


def _needs_trajectory(scenario: Scenario) -> bool:
    return bool(scenario.outputs)


def write_report(report: ScenarioReport, path) -> None:
    """Deterministic report file: no wall-clock, stable ordering."""
    lines = ["# psilab report v1",
             f"# scenario: {report.name}",
             f"# grid: {report.provenance['grid']}",
             f"# scheme: {report.provenance['scheme']} dt={report.provenance['dt']}"]
    lines.extend(report.summary_lines())
    Path(path).write_text("\n".join(lines) + "\n")


def emit_series(trajectory: EvolutionResult | None, scenario: Scenario,
                out_dir) -> list:
    """Write the selected series as columnar plain text, plus a manifest.

    One file per selected series; every file is header-first and formatted
    with 17 significant digits so re-runs are byte-identical. The manifest
    lists what was emitted (header-only when the selection is empty).
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for series in scenario.outputs:
        path = out / f"{scenario.name}__{series}.dat"
        rows = _series_rows(trajectory, scenario, series)
        header = _series_header(scenario, series)
        with open(path, "w") as fh:
            fh.write(header)
            for row in rows:
                fh.write(" ".join(FMT % v for v in row) + "\n")
        written.append(path.name)
    manifest = out / f"{scenario.name}__manifest.dat"
    with open(manifest, "w") as fh:
        fh.write("# psilab series manifest v1\n")
        fh.write(f"# scenario: {scenario.name}\n")
        fh.write("# columns: file\n")
        for name in written:
            fh.write(name + "\n")
    return written + [manifest.name]


def _series_header(scenario: Scenario, series: str) -> str:
    columns = {
        "density": "t x density",
        "phase": "t x phase",
        "current": "t x current",
        "kinetic": "t x local_kinetic",
        "expectations": "t norm x_mean p_mean energy",
    }[series]
    units = "natural units (hbar, mass as configured); lengths in grid units"
    return (f"# psilab series v1\n"
            f"# scenario: {scenario.name}  series: {series}\n"
            f"# columns: {columns}\n"
            f"# units: {units}\n")


def _series_rows(trajectory: EvolutionResult | None, scenario: Scenario,
                 series: str):
    if trajectory is None:
        return
    grid = scenario.grid
    for psi, t in zip(trajectory.snapshots, trajectory.times):
        if series == "expectations":
            yield (t, psi.norm_squared(),
                   integrate(psi.density() * grid.x, grid),
                   float(mean_momentum(psi, "fourier_sum")),
                   float(mean_total_energy(psi, scenario.potential, t,
                                           "hamiltonian")))
            continue
        if series == "density":
            values = psi.density()
        elif series == "phase":
            values = decompose(psi).phase
        elif series == "current":
            values = local_fields(psi, scenario.potential, t).current
        elif series == "kinetic":
            values = local_fields(psi, scenario.potential, t).kinetic
        else:
            raise UnsupportedMethodError(f"unknown series {series!r}")
        for x, v in zip(grid.x, values):
            yield (t, x, v)
