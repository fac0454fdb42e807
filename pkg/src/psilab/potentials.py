"""Symbolic potential families V(t, x), sampleable on any grid at any time.

All potentials are real-valued. Smooth families also expose an analytic spatial
gradient so the classical reference integrator never touches quantum code.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import StructuralError, UnsupportedMethodError
from .grid import Grid


@dataclass(frozen=True)
class Zero:
    """Free particle, V = 0."""


@dataclass(frozen=True)
class Constant:
    v0: float


@dataclass(frozen=True)
class Harmonic:
    """V = M omega0^2 (x - center)^2 / 2; center = None -> L/2."""

    omega0: float
    center: float | None = None

    def __post_init__(self):
        if not (self.omega0 > 0):
            raise StructuralError(f"omega0 must be > 0, got {self.omega0}")


@dataclass(frozen=True)
class Quartic:
    """V = strength * (x - center)^4 / 4; center = None -> L/2."""

    strength: float = 1.0
    center: float | None = None

    def __post_init__(self):
        if not (self.strength > 0):
            raise StructuralError(f"strength must be > 0, got {self.strength}")


@dataclass(frozen=True)
class Barrier:
    """V = v0 on [x_a, x_b], 0 elsewhere."""

    v0: float
    x_a: float
    x_b: float

    def __post_init__(self):
        if not (0.0 < self.x_a < self.x_b):
            raise StructuralError(
                f"barrier edges must satisfy 0 < x_a < x_b, got [{self.x_a}, {self.x_b}]")


@dataclass(frozen=True)
class Well:
    """V = -depth on [x_a, x_b], 0 elsewhere."""

    depth: float
    x_a: float
    x_b: float

    def __post_init__(self):
        if not (0.0 < self.x_a < self.x_b):
            raise StructuralError(
                f"well edges must satisfy 0 < x_a < x_b, got [{self.x_a}, {self.x_b}]")


@dataclass(frozen=True)
class Tabulated:
    """Fixed samples on the grid nodes; length must match the grid in use."""

    values: tuple

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.float64)
        if vals.ndim != 1 or vals.size < 4:
            raise StructuralError("tabulated potential needs a 1-D table of >= 4 reals")
        object.__setattr__(self, "values", tuple(float(v) for v in vals))


@dataclass(frozen=True)
class TimeRamped:
    """V(t, x) = (1 + rate * t) * inner(t, x); rate 0 reproduces inner exactly."""

    inner: "PotentialSpec"
    rate: float = 0.0


PotentialSpec = Union[Zero, Constant, Harmonic, Quartic, Barrier, Well,
                      Tabulated, TimeRamped]


def sample_potential(spec: PotentialSpec, t: float, grid: Grid) -> np.ndarray:
    """Evaluate V(t, x) on the grid nodes."""
    x = grid.x
    if isinstance(spec, Zero):
        return np.zeros(grid.n_points)
    if isinstance(spec, Constant):
        return np.full(grid.n_points, spec.v0)
    if isinstance(spec, Harmonic):
        c = grid.center if spec.center is None else spec.center
        return 0.5 * grid.mass * spec.omega0**2 * (x - c) ** 2
    if isinstance(spec, Quartic):
        c = grid.center if spec.center is None else spec.center
        return 0.25 * spec.strength * (x - c) ** 4
    if isinstance(spec, Barrier):
        _check_edges(spec.x_a, spec.x_b, grid)
        return np.where((x >= spec.x_a) & (x <= spec.x_b), spec.v0, 0.0)
    if isinstance(spec, Well):
        _check_edges(spec.x_a, spec.x_b, grid)
        return np.where((x >= spec.x_a) & (x <= spec.x_b), -spec.depth, 0.0)
    if isinstance(spec, Tabulated):
        vals = np.asarray(spec.values)
        if vals.size != grid.n_points:
            raise StructuralError(
                f"tabulated potential has {vals.size} samples, grid has {grid.n_points}")
        return vals.copy()
    if isinstance(spec, TimeRamped):
        return (1.0 + spec.rate * t) * sample_potential(spec.inner, t, grid)
    raise StructuralError(f"unknown potential spec {spec!r}")


def potential_gradient(spec: PotentialSpec, t: float, x, grid: Grid):
    """Analytic dV/dx at arbitrary positions; smooth families only."""
    if isinstance(spec, (Zero, Constant)):
        return np.zeros_like(np.asarray(x, dtype=np.float64))
    if isinstance(spec, Harmonic):
        c = grid.center if spec.center is None else spec.center
        return grid.mass * spec.omega0**2 * (np.asarray(x, dtype=np.float64) - c)
    if isinstance(spec, Quartic):
        c = grid.center if spec.center is None else spec.center
        return spec.strength * (np.asarray(x, dtype=np.float64) - c) ** 3
    if isinstance(spec, TimeRamped):
        return (1.0 + spec.rate * t) * potential_gradient(spec.inner, t, x, grid)
    raise UnsupportedMethodError(
        f"{type(spec).__name__} has no smooth analytic gradient")


def is_time_independent(spec: PotentialSpec) -> bool:
    if isinstance(spec, TimeRamped):
        return spec.rate == 0.0 and is_time_independent(spec.inner)
    return True


def _check_edges(x_a: float, x_b: float, grid: Grid):
    if not (0.0 < x_a < x_b < grid.length):
        raise StructuralError(
            f"edges [{x_a:g}, {x_b:g}] must satisfy 0 < x_a < x_b < L = {grid.length:g}")
