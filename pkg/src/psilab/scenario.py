"""Declarative scenario files: a strict, line-oriented key-value format.

Grammar (versioned header line required):

    # psilab scenario v1
    [scenario]
    name = dispersion_k1_v0
    [grid]
    n_points = 128
    length = 6.283185307179586
    hbar = 1.0          # optional, default 1.0
    mass = 1.0          # optional, default 1.0
    [state]
    kind = plane_wave | gaussian_packet | ho_eigenstate | ho_coherent
    ... kind-specific keys ...
    tail_tol = 1e-10    # optional periodization guard override
    [potential]
    kind = zero | constant | harmonic | quartic | barrier | well | time_ramped
    ... kind-specific keys (time_ramped: rate plus inner_* keys) ...
    [schedule]
    t0 = 0.0
    t1 = 2.0
    dt = 1e-3
    snapshot_every = 100
    [checks]
    <check-name> = <tolerance or "on">
    [classical]          # only with the classical_limit check
    hbar_values = 0.2, 0.1, 0.05, 0.025
    p0 = 1.0
    sigma0 = 0.5
    x0_offset = -1.0
    t_final = 3.0
    dt = 1e-3
    [outputs]
    series = density, expectations   # optional; may be empty

Unknown sections, unknown keys, malformed values, and violated invariants are
all rejected with the offending line number. Comments start with '#'; blank
lines are ignored.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import ScenarioParseError
from .grid import Grid
from .potentials import (Barrier, Constant, Harmonic, PotentialSpec, Quartic,
                         TimeRamped, Well, Zero)
from .states import (GaussianPacket, HOCoherent, HOEigenstate, PlaneWave,
                     StateSpec)

HEADER = "# psilab scenario v1"

# check name -> kind of value it takes ("tol" = positive float, "flag" = "on")
KNOWN_CHECKS = {
    "norm_drift": "tol",
    "energy_drift": "tol",
    "stationarity": "tol",
    "total_energy_constant": "tol",
    "continuity_residual": "tol",
    "qhj_residual": "tol",
    "recover_potential": "tol",
    "dispersion": "tol",
    "three_route_momentum": "tol",
    "three_route_kinetic": "tol",
    "fisher": "tol",
    "local_balance": "tol",
    "equivalence_density": "tol",
    "tunneling": "flag",
    "classical_limit": "tol",
}

KNOWN_SERIES = ("density", "phase", "current", "kinetic", "expectations")


@dataclass(frozen=True)
class Schedule:
    t0: float
    t1: float
    dt: float
    snapshot_every: int


@dataclass(frozen=True)
class ClassicalSweepSpec:
    hbar_values: tuple
    p0: float
    sigma0: float
    x0_offset: float
    t_final: float
    dt: float


@dataclass(frozen=True)
class Check:
    name: str
    tolerance: float | None  # None for flag checks


@dataclass(frozen=True)
class Scenario:
    name: str
    grid: Grid
    state: StateSpec
    tail_tol: float
    potential: PotentialSpec
    schedule: Schedule
    checks: tuple
    outputs: tuple
    classical: ClassicalSweepSpec | None = None
    warnings: tuple = ()


_REQUIRED = object()


class _Section:
    """One parsed section: key -> (value string, line number)."""

    def __init__(self, name: str, line: int):
        self.name = name
        self.line = line
        self.items: dict = {}

    def take(self, key: str, conv, default=_REQUIRED):
        if key in self.items:
            raw, line = self.items.pop(key)
            try:
                return conv(raw)
            except ScenarioParseError:
                raise
            except Exception:
                raise ScenarioParseError(f"malformed value for '{key}': {raw!r}", line)
        if default is _REQUIRED:
            raise ScenarioParseError(
                f"section [{self.name}] is missing required key '{key}'", self.line)
        return default

    def reject_leftovers(self, strict: bool = True, warnings: list | None = None):
        for key, (_, line) in self.items.items():
            message = f"unknown key '{key}' in section [{self.name}]"
            if strict:
                raise ScenarioParseError(message, line)
            warnings.append(f"line {line}: {message} (ignored)")


def _float(raw: str) -> float:
    return float(raw)


def _positive(raw: str) -> float:
    v = float(raw)
    if not (v > 0):
        raise ValueError
    return v


def _int(raw: str) -> int:
    v = float(raw)
    if int(v) != v:
        raise ValueError
    return int(v)


def _float_list(raw: str) -> tuple:
    return tuple(float(part) for part in raw.split(",") if part.strip())


def _split_sections(text: str) -> dict:
    lines = text.splitlines()
    if not lines or lines[0].strip() != HEADER:
        raise ScenarioParseError(f"first line must be the header {HEADER!r}", 1)
    sections: dict = {}
    current = None
    for idx, rawline in enumerate(lines[1:], start=2):
        line = rawline.split("#", 1)[0].strip() if not rawline.lstrip().startswith("#") \
            else ""
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            name = line[1:-1].strip()
            if name in sections:
                raise ScenarioParseError(f"duplicate section [{name}]", idx)
            current = _Section(name, idx)
            sections[name] = current
            continue
        if "=" not in line:
            raise ScenarioParseError(f"expected 'key = value', got {line!r}", idx)
        if current is None:
            raise ScenarioParseError("key outside of any section", idx)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key in current.items:
            raise ScenarioParseError(f"duplicate key '{key}' in [{current.name}]", idx)
        if not value:
            current.items[key] = ("", idx)
        else:
            current.items[key] = (value, idx)
    return sections


def _parse_state(sec: _Section, grid: Grid, strict: bool, warnings: list):
    kind = sec.take("kind", str)
    if kind == "plane_wave":
        spec = PlaneWave(k0=sec.take("k0", _float))
    elif kind == "gaussian_packet":
        spec = GaussianPacket(sigma0=sec.take("sigma0", _positive),
                              k0=sec.take("k0", _float, 0.0),
                              x0=sec.take("x0", _float, None))
    elif kind == "ho_eigenstate":
        spec = HOEigenstate(n=sec.take("n", _int),
                            omega0=sec.take("omega0", _positive, 1.0),
                            center=sec.take("center", _float, None))
    elif kind == "ho_coherent":
        spec = HOCoherent(displacement=sec.take("displacement", _float),
                          omega0=sec.take("omega0", _positive, 1.0),
                          center=sec.take("center", _float, None))
    else:
        raise ScenarioParseError(f"unknown state kind {kind!r}", sec.line)
    tail_tol = sec.take("tail_tol", _positive, 1e-10)
    sec.reject_leftovers(strict, warnings)
    return spec, tail_tol


def _parse_potential(sec: _Section, grid: Grid, prefix: str = "",
                     strict: bool = True, warnings: list | None = None) -> PotentialSpec:
    kind = sec.take(prefix + "kind", str)
    t = lambda key, conv, *d: sec.take(prefix + key, conv, *d)
    if kind == "zero":
        spec = Zero()
    elif kind == "constant":
        spec = Constant(v0=t("v0", _float))
    elif kind == "harmonic":
        spec = Harmonic(omega0=t("omega0", _positive),
                        center=t("center", _float, None))
    elif kind == "quartic":
        spec = Quartic(strength=t("strength", _positive, 1.0),
                       center=t("center", _float, None))
    elif kind == "barrier":
        x_a, x_b = t("x_a", _float), t("x_b", _float)
        if not (0.0 < x_a < x_b < grid.length):
            raise ScenarioParseError(
                f"barrier edges must satisfy 0 < x_a < x_b < L, got [{x_a}, {x_b}]",
                sec.line)
        spec = Barrier(v0=t("v0", _float), x_a=x_a, x_b=x_b)
    elif kind == "well":
        x_a, x_b = t("x_a", _float), t("x_b", _float)
        if not (0.0 < x_a < x_b < grid.length):
            raise ScenarioParseError(
                f"well edges must satisfy 0 < x_a < x_b < L, got [{x_a}, {x_b}]",
                sec.line)
        spec = Well(depth=t("depth", _float), x_a=x_a, x_b=x_b)
    elif kind == "time_ramped":
        if prefix:
            raise ScenarioParseError("time_ramped cannot nest", sec.line)
        rate = t("rate", _float)
        inner = _parse_potential(sec, grid, prefix="inner_",
                                 strict=strict, warnings=warnings)
        spec = TimeRamped(inner=inner, rate=rate)
    else:
        raise ScenarioParseError(f"unknown potential kind {kind!r}", sec.line)
    if not prefix:
        sec.reject_leftovers(strict, warnings)
    return spec


def parse_scenario(text: str, strict: bool = True) -> Scenario:
    """Parse and fully validate scenario text.

    In strict mode (the default) any unknown key or section is a fatal parse
    error; otherwise those are collected into ``Scenario.warnings`` and
    ignored. Unknown checks, series, and malformed values are always fatal.
    """
    sections = _split_sections(text)
    warnings: list = []

    def pop_section(name: str, required: bool = True):
        if name in sections:
            return sections.pop(name)
        if required:
            raise ScenarioParseError(f"missing required section [{name}]", 1)
        return None

    meta = pop_section("scenario")
    name = meta.take("name", str)
    if not name or any(c.isspace() for c in name):
        raise ScenarioParseError("scenario name must be non-empty without spaces",
                                 meta.line)
    meta.reject_leftovers(strict, warnings)

    gsec = pop_section("grid")
    grid = Grid(n_points=gsec.take("n_points", _int),
                length=gsec.take("length", _positive),
                hbar=gsec.take("hbar", _positive, 1.0),
                mass=gsec.take("mass", _positive, 1.0))
    gsec.reject_leftovers(strict, warnings)

    state, tail_tol = _parse_state(pop_section("state"), grid, strict, warnings)
    potential = _parse_potential(pop_section("potential"), grid,
                                 strict=strict, warnings=warnings)

    ssec = pop_section("schedule")
    schedule = Schedule(t0=ssec.take("t0", _float, 0.0),
                        t1=ssec.take("t1", _float),
                        dt=ssec.take("dt", _positive),
                        snapshot_every=ssec.take("snapshot_every", _int, 1))
    ssec.reject_leftovers(strict, warnings)
    if schedule.t1 < schedule.t0:
        raise ScenarioParseError("schedule requires t1 >= t0", 1)
    if schedule.snapshot_every < 1:
        raise ScenarioParseError("snapshot_every must be >= 1", 1)

    csec = pop_section("checks")
    checks = []
    for key, (raw, line) in list(csec.items.items()):
        if key not in KNOWN_CHECKS:
            raise ScenarioParseError(f"unknown check {key!r}", line)
        if KNOWN_CHECKS[key] == "flag":
            if raw != "on":
                raise ScenarioParseError(f"check {key!r} takes the value 'on'", line)
            checks.append(Check(key, None))
        else:
            try:
                tol = float(raw)
            except ValueError:
                raise ScenarioParseError(f"malformed tolerance for {key!r}: {raw!r}", line)
            if not (tol > 0):
                raise ScenarioParseError(f"tolerance for {key!r} must be positive", line)
            checks.append(Check(key, tol))
        del csec.items[key]
    if not checks:
        raise ScenarioParseError("section [checks] lists no checks", csec.line)

    classical = None
    if "classical" in sections:
        ksec = sections.pop("classical")
        classical = ClassicalSweepSpec(
            hbar_values=ksec.take("hbar_values", _float_list),
            p0=ksec.take("p0", _float),
            sigma0=ksec.take("sigma0", _positive),
            x0_offset=ksec.take("x0_offset", _float, 0.0),
            t_final=ksec.take("t_final", _positive),
            dt=ksec.take("dt", _positive))
        ksec.reject_leftovers(strict, warnings)
        if len(classical.hbar_values) < 1:
            raise ScenarioParseError("hbar_values must be non-empty", ksec.line)
        if any(b >= a for a, b in zip(classical.hbar_values,
                                      classical.hbar_values[1:])):
            raise ScenarioParseError("hbar_values must be strictly decreasing",
                                     ksec.line)
    if any(c.name == "classical_limit" for c in checks) and classical is None:
        raise ScenarioParseError(
            "check 'classical_limit' requires a [classical] section", 1)

    outputs = ()
    if "outputs" in sections:
        osec = sections.pop("outputs")
        raw_series = osec.take("series", str, "")
        osec.reject_leftovers(strict, warnings)
        outputs = tuple(s.strip() for s in raw_series.split(",") if s.strip())
        for s in outputs:
            if s not in KNOWN_SERIES:
                raise ScenarioParseError(f"unknown output series {s!r}", osec.line)

    for sec in sections.values():
        if strict:
            raise ScenarioParseError(f"unknown section [{sec.name}]", sec.line)
        warnings.append(f"line {sec.line}: unknown section [{sec.name}] (ignored)")

    return Scenario(name=name, grid=grid, state=state, tail_tol=tail_tol,
                    potential=potential, schedule=schedule, checks=tuple(checks),
                    outputs=outputs, classical=classical,
                    warnings=tuple(warnings))
