"""Periodic 1-D grid, spectral calculus, and the amplitude/phase field types.

Everything else in the package sits on the three types defined here:
``Grid`` (the discretization substrate with the physical constants), ``WaveField``
(complex wave-function samples), and ``MadelungField`` (real density/phase pair).
All derivatives are spectral, so they are exact for band-limited fields on the
periodic domain, and the trapezoid-free Riemann sum is the exact quadrature for
periodic band-limited integrands.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import DegenerateStateError, StructuralError

# Relative density threshold below which phase-derived quantities are unreliable.
DEFAULT_FLOOR = 1e-12


@dataclass(frozen=True)
class Grid:
    """Uniform periodic lattice on [0, L) plus the physical constants ``hbar``, ``mass``.

    Wavenumbers follow the FFT layout ``2*pi/L * [0, 1, ..., n/2-1, -n/2, ..., -1]``,
    i.e. the integers in the symmetric range [-n/2, n/2).

    Attributes:
        n_points: Number of lattice nodes (>= 4; powers of two are fastest).
        length: Domain size L > 0.
        hbar: Action constant > 0 (natural units by default).
        mass: Particle mass > 0.
    """

    n_points: int
    length: float
    hbar: float = 1.0
    mass: float = 1.0
    x: np.ndarray = field(init=False, repr=False, compare=False)
    k: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 4:
            raise StructuralError(f"n_points must be an integer >= 4, got {self.n_points}")
        if not (self.length > 0):
            raise StructuralError(f"length must be > 0, got {self.length}")
        if not (self.hbar > 0) or not (self.mass > 0):
            raise StructuralError("hbar and mass must be strictly positive")
        n = int(self.n_points)
        dx = self.length / n
        x = np.arange(n) * dx
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
        x.setflags(write=False)
        k.setflags(write=False)
        object.__setattr__(self, "n_points", n)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "k", k)

    @property
    def dx(self) -> float:
        return self.length / self.n_points

    @property
    def center(self) -> float:
        return 0.5 * self.length


def integrate(f, grid: Grid):
    """Integrate samples over the periodic domain: sum(f) * dx.

    Returns a float for real input, complex for complex input.
    """
    f = np.asarray(f)
    if f.shape != (grid.n_points,):
        raise StructuralError(
            f"field has shape {f.shape}, expected ({grid.n_points},)")
    total = f.sum() * grid.dx
    return complex(total) if np.iscomplexobj(f) else float(total)


@dataclass(frozen=True, eq=False)
class WaveField:
    """Complex wave-function samples on a grid (units length^(-1/2) in 1-D)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        if v.shape != (self.grid.n_points,):
            raise StructuralError(
                f"values has shape {v.shape}, expected ({self.grid.n_points},)")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def norm_squared(self) -> float:
        dens = self.values.real**2 + self.values.imag**2
        return float(dens.sum() * self.grid.dx)

    def normalized(self) -> "WaveField":
        n2 = self.norm_squared()
        if n2 <= 0.0:
            raise DegenerateStateError("cannot normalize an all-zero field")
        return WaveField(self.grid, self.values / np.sqrt(n2))

    def inner(self, other: "WaveField") -> complex:
        """<self|other> = integral conj(self) * other dx."""
        if other.grid.n_points != self.grid.n_points:
            raise StructuralError("inner product requires matching grids")
        return complex(np.vdot(self.values, other.values) * self.grid.dx)

    def density(self) -> np.ndarray:
        return self.values.real**2 + self.values.imag**2


@dataclass(frozen=True, eq=False)
class MadelungField:
    """Real density rho = |psi|^2 and real phase S on a grid.

    ``phase_valid`` flags the nodes where the density sits above the floor used
    at construction; the phase is unreliable elsewhere. ``None`` means all valid.
    """

    grid: Grid
    density: np.ndarray
    phase: np.ndarray
    phase_valid: np.ndarray | None = None

    def __post_init__(self):
        rho = np.array(self.density, dtype=np.float64)
        s = np.array(self.phase, dtype=np.float64)
        shape = (self.grid.n_points,)
        if rho.shape != shape or s.shape != shape:
            raise StructuralError("density/phase length must equal grid.n_points")
        if rho.min() < -1e-13 * max(rho.max(), 1.0):
            raise StructuralError("density must be nonnegative")
        np.clip(rho, 0.0, None, out=rho)
        rho.setflags(write=False)
        s.setflags(write=False)
        object.__setattr__(self, "density", rho)
        object.__setattr__(self, "phase", s)
        if self.phase_valid is not None:
            m = np.array(self.phase_valid, dtype=bool)
            if m.shape != shape:
                raise StructuralError("phase_valid length must equal grid.n_points")
            m.setflags(write=False)
            object.__setattr__(self, "phase_valid", m)

    def mask(self) -> np.ndarray:
        if self.phase_valid is None:
            return np.ones(self.grid.n_points, dtype=bool)
        return self.phase_valid


# ---------------------------------------------------------------------------
# Spectral transforms and derivatives
# ---------------------------------------------------------------------------

def to_momentum(psi: WaveField) -> np.ndarray:
    """Momentum amplitudes in FFT order, normalized so sum |Psi_k|^2 = integral |psi|^2 dx."""
    g = psi.grid
    scale = g.dx / np.sqrt(g.length)
    return np.fft.fft(psi.values) * scale


def from_momentum(coefficients, grid: Grid) -> WaveField:
    """Inverse of :func:`to_momentum`."""
    c = np.asarray(coefficients, dtype=np.complex128)
    if c.shape != (grid.n_points,):
        raise StructuralError(
            f"coefficients has shape {c.shape}, expected ({grid.n_points},)")
    scale = grid.dx / np.sqrt(grid.length)
    return WaveField(grid, np.fft.ifft(c / scale))


def spectral_gradient(f, grid: Grid) -> np.ndarray:
    """d/dx by multiplying Fourier coefficients by ik; exact for band-limited f.

    The Nyquist mode (even n) gets a zero multiplier: an odd-order derivative of
    that mode is not representable on the grid. Real input returns a real array.
    """
    f = np.asarray(f)
    if f.shape != (grid.n_points,):
        raise StructuralError(
            f"field has shape {f.shape}, expected ({grid.n_points},)")
    n = grid.n_points
    if np.iscomplexobj(f):
        mult = 1j * grid.k.copy()
        if n % 2 == 0:
            mult[n // 2] = 0.0
        return np.fft.ifft(mult * np.fft.fft(f))
    kr = 2.0 * np.pi * np.fft.rfftfreq(n, d=grid.dx)
    mult = 1j * kr
    if n % 2 == 0:
        mult[-1] = 0.0
    return np.fft.irfft(mult * np.fft.rfft(f), n=n)


def spectral_laplacian(f, grid: Grid) -> np.ndarray:
    """d^2/dx^2 by multiplying Fourier coefficients by -k^2."""
    f = np.asarray(f)
    if f.shape != (grid.n_points,):
        raise StructuralError(
            f"field has shape {f.shape}, expected ({grid.n_points},)")
    if np.iscomplexobj(f):
        return np.fft.ifft(-(grid.k**2) * np.fft.fft(f))
    kr = 2.0 * np.pi * np.fft.rfftfreq(grid.n_points, d=grid.dx)
    return np.fft.irfft(-(kr**2) * np.fft.rfft(f), n=grid.n_points)


# ---------------------------------------------------------------------------
# Amplitude/phase decomposition
# ---------------------------------------------------------------------------

def decompose(psi: WaveField, floor: float = DEFAULT_FLOOR) -> MadelungField:
    """Split psi into density |psi|^2 and a left-to-right unwrapped phase.

    Principal-argument jumps larger than pi are folded by 2*pi. The unwrapped
    phase is re-anchored so the leftmost above-floor node keeps its principal
    value; nodes with density below floor * max(density) are flagged invalid.
    """
    if not (floor > 0):
        raise StructuralError("floor must be positive")
    dens = psi.density()
    peak = dens.max()
    if peak == 0.0:
        raise DegenerateStateError("cannot decompose an all-zero field")
    valid = dens >= floor * peak
    raw = np.angle(psi.values)
    phase = np.unwrap(raw)
    anchor = int(np.argmax(valid))
    phase = phase - (phase[anchor] - raw[anchor])
    return MadelungField(psi.grid, dens, phase, phase_valid=valid)


def compose(m: MadelungField) -> WaveField:
    """psi = sqrt(density) * exp(i * phase); inverse of :func:`decompose` above floor."""
    if np.asarray(m.density).min() < 0:
        raise StructuralError("density must be nonnegative")
    return WaveField(m.grid, np.sqrt(m.density) * np.exp(1j * m.phase))


class PhaseGradient(NamedTuple):
    """grad S samples plus the mask where the density supports them."""

    values: np.ndarray
    valid: np.ndarray


def phase_gradient(psi: WaveField, floor: float = DEFAULT_FLOOR) -> PhaseGradient:
    """grad S = Im(conj(psi) * grad psi) / |psi|^2, no unwrapping involved.

    Entries where the density is below floor * max(density) are NaN and flagged
    invalid; consumers integrate over the valid mask.
    """
    if not (floor > 0):
        raise StructuralError("floor must be positive")
    dens = psi.density()
    peak = dens.max()
    if peak == 0.0:
        raise DegenerateStateError("phase gradient of an all-zero field")
    valid = dens >= floor * peak
    grad = spectral_gradient(psi.values, psi.grid)
    num = (np.conj(psi.values) * grad).imag
    out = np.where(valid, num / np.where(valid, dens, 1.0), np.nan)
    return PhaseGradient(out, valid)
