# pytdpt/grid.py
"""Spatial grid and two-component wave functions.

The grid is periodic with ``r_max`` excluded, so that ``dr`` is exact and the
momentum layout is the standard discrete-Fourier one. Wave functions carry
the amplitudes of electronic state |1> in ``psi1`` and of state |0> in
``psi0``. Internally the propagators work on stacked ``(2, n_points)``
arrays with row 0 holding |1> and row 1 holding |0>.
"""

import logging
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy import fft as sp_fft

from .constants import MIN_GRID_POINTS, MIN_POINTS_PER_SIGMA
from .errors import ConfigurationError, GridMismatchError, ResolutionError


@dataclass(frozen=True, eq=False)
class SpatialGrid:
    """Uniform periodic grid over ``[r_min, r_max)``.

    Attributes:
        r_min (float): Left edge of the box (a.u.).
        r_max (float): Right edge of the box (a.u.), not itself a grid point.
        n_points (int): Number of grid points, a power of two.
        dr (float): Grid spacing, ``(r_max - r_min) / n_points``.
        positions (np.ndarray): The ``n_points`` grid coordinates.
        momentum_values (np.ndarray): Wavenumbers in discrete-Fourier layout.
    """
    r_min: float
    r_max: float
    n_points: int
    dr: float = field(init=False)
    positions: np.ndarray = field(init=False, repr=False)
    momentum_values: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        dr = (self.r_max - self.r_min) / self.n_points
        object.__setattr__(self, 'dr', dr)
        object.__setattr__(self, 'positions', self.r_min + dr * np.arange(self.n_points))
        object.__setattr__(self, 'momentum_values', 2.0 * np.pi * sp_fft.fftfreq(self.n_points, d=dr))

    @property
    def length(self) -> float:
        return self.r_max - self.r_min

    @property
    def dk(self) -> float:
        """Spacing of the momentum grid."""
        return 2.0 * np.pi / (self.n_points * self.dr)

    def same_as(self, other: 'SpatialGrid') -> bool:
        """Returns True if both grids describe the same discretization."""
        if self is other:
            return True
        return (self.r_min, self.r_max, self.n_points) == (other.r_min, other.r_max, other.n_points)


def make_grid(r_min: float, r_max: float, n_points: int) -> SpatialGrid:
    """Builds a periodic grid after validating its parameters.

    Args:
        r_min (float): Left edge of the box (a.u.).
        r_max (float): Right edge of the box (a.u.); must exceed ``r_min``.
        n_points (int): Number of points; a power of two, at least 16.

    Returns:
        SpatialGrid: The validated grid.

    Raises:
        ConfigurationError: If the interval is degenerate or ``n_points`` is
            not a power of two of sufficient size.
    """
    if not np.isfinite(r_min) or not np.isfinite(r_max) or r_max <= r_min:
        raise ConfigurationError(f"Grid interval is degenerate: r_min={r_min}, r_max={r_max}.")
    if int(n_points) != n_points:
        raise ConfigurationError(f"n_points must be an integer, got {n_points}.")
    n_points = int(n_points)
    if n_points < MIN_GRID_POINTS or n_points & (n_points - 1):
        raise ConfigurationError(
            f"n_points must be a power of two and at least {MIN_GRID_POINTS}, got {n_points}."
        )
    return SpatialGrid(float(r_min), float(r_max), n_points)


@dataclass(frozen=True, eq=False)
class TwoComponentWaveFunction:
    """Complex amplitudes of the electronic states |1> and |0> on a grid."""
    psi1: np.ndarray
    psi0: np.ndarray
    grid: SpatialGrid

    def __post_init__(self):
        psi1 = np.asarray(self.psi1, dtype=complex)
        psi0 = np.asarray(self.psi0, dtype=complex)
        n = self.grid.n_points
        if psi1.shape != (n,) or psi0.shape != (n,):
            raise ConfigurationError(
                f"Both components must have length {n}, got {psi1.shape} and {psi0.shape}."
            )
        object.__setattr__(self, 'psi1', psi1)
        object.__setattr__(self, 'psi0', psi0)

    @classmethod
    def from_array(cls, amplitudes: np.ndarray, grid: SpatialGrid) -> 'TwoComponentWaveFunction':
        """Wraps a stacked ``(2, n_points)`` array (row 0 is |1>)."""
        return cls(amplitudes[0].copy(), amplitudes[1].copy(), grid)

    @classmethod
    def zeros(cls, grid: SpatialGrid) -> 'TwoComponentWaveFunction':
        return cls(np.zeros(grid.n_points, complex), np.zeros(grid.n_points, complex), grid)

    def as_array(self) -> np.ndarray:
        """Returns the stacked ``(2, n_points)`` amplitude array."""
        return np.stack([self.psi1, self.psi0])

    def norm(self) -> float:
        """Squared norm, the Riemann sum of both densities with weight dr."""
        return float((np.vdot(self.psi1, self.psi1).real + np.vdot(self.psi0, self.psi0).real) * self.grid.dr)

    def populations(self) -> Tuple[float, float]:
        """Returns the populations (P1, P0) of the two electronic states."""
        dr = self.grid.dr
        return float(np.sum(np.abs(self.psi1) ** 2) * dr), float(np.sum(np.abs(self.psi0) ** 2) * dr)

    def position_moments(self) -> Tuple[float, float]:
        """Returns the mean position and the standard deviation of the total density."""
        density = np.abs(self.psi1) ** 2 + np.abs(self.psi0) ** 2
        r = self.grid.positions
        weight = np.sum(density)
        mean = np.sum(r * density) / weight
        variance = np.sum((r - mean) ** 2 * density) / weight
        return float(mean), float(np.sqrt(variance))

    def _check_grid(self, other: 'TwoComponentWaveFunction'):
        if not self.grid.same_as(other.grid):
            raise GridMismatchError("Wave functions live on different grids.")

    def __add__(self, other: 'TwoComponentWaveFunction') -> 'TwoComponentWaveFunction':
        self._check_grid(other)
        return TwoComponentWaveFunction(self.psi1 + other.psi1, self.psi0 + other.psi0, self.grid)

    def __sub__(self, other: 'TwoComponentWaveFunction') -> 'TwoComponentWaveFunction':
        self._check_grid(other)
        return TwoComponentWaveFunction(self.psi1 - other.psi1, self.psi0 - other.psi0, self.grid)

    def __mul__(self, scalar: complex) -> 'TwoComponentWaveFunction':
        return TwoComponentWaveFunction(scalar * self.psi1, scalar * self.psi0, self.grid)

    __rmul__ = __mul__


def gaussian_packet(grid: SpatialGrid,
                    center: float,
                    width: float,
                    momentum: float = 0.0,
                    which_state: int = 1) -> TwoComponentWaveFunction:
    """Creates a normalized Gaussian packet on one electronic state.

    The density of the packet has standard deviation ``width``; the other
    electronic component is identically zero.

    Args:
        grid (SpatialGrid): The grid to sample on.
        center (float): Packet centre (a.u.).
        width (float): Standard deviation of the position density (a.u.).
        momentum (float, optional): Mean momentum (a.u.). Defaults to 0.
        which_state (int, optional): 1 for |1>, 0 for |0>. Defaults to 1.

    Returns:
        TwoComponentWaveFunction: The packet, normalized to 1.

    Raises:
        ConfigurationError: If ``width`` is not positive or ``which_state``
            is not 0 or 1.
        ResolutionError: If fewer than 4 grid points fall within one
            standard deviation.
    """
    if width <= 0:
        raise ConfigurationError(f"Packet width must be positive, got {width}.")
    if which_state not in (0, 1):
        raise ConfigurationError(f"which_state must be 0 or 1, got {which_state}.")
    if width / grid.dr < MIN_POINTS_PER_SIGMA:
        raise ResolutionError(
            f"Packet width {width} spans only {width / grid.dr:.2f} grid points; "
            f"at least {MIN_POINTS_PER_SIGMA} are required."
        )
    if center - 5 * width < grid.r_min or center + 5 * width > grid.r_max:
        logging.warning(f"Packet at {center} with width {width} is not well inside [{grid.r_min}, {grid.r_max}).")

    offset = grid.positions - center
    packet = np.exp(-offset ** 2 / (4.0 * width ** 2) + 1j * momentum * offset)
    packet /= np.sqrt(np.sum(np.abs(packet) ** 2) * grid.dr)

    empty = np.zeros(grid.n_points, dtype=complex)
    if which_state == 1:
        return TwoComponentWaveFunction(packet, empty, grid)
    return TwoComponentWaveFunction(empty, packet, grid)


def inner_product(a: TwoComponentWaveFunction, b: TwoComponentWaveFunction) -> complex:
    """Computes <a|b>, antilinear in ``a`` and linear in ``b``.

    Raises:
        GridMismatchError: If the two wave functions use different grids.
    """
    if not a.grid.same_as(b.grid):
        raise GridMismatchError("Cannot form an inner product of wave functions on different grids.")
    return complex((np.vdot(a.psi1, b.psi1) + np.vdot(a.psi0, b.psi0)) * a.grid.dr)


def to_momentum_space(wf: TwoComponentWaveFunction) -> Tuple[np.ndarray, np.ndarray]:
    """Transforms both components to momentum space.

    The scaling makes ``sum(|phi|^2) * grid.dk`` equal to the position-space
    norm.
    """
    scale = wf.grid.dr / np.sqrt(2.0 * np.pi)
    return sp_fft.fft(wf.psi1) * scale, sp_fft.fft(wf.psi0) * scale


def from_momentum_space(phi1: np.ndarray, phi0: np.ndarray, grid: SpatialGrid) -> TwoComponentWaveFunction:
    """Inverse of :func:`to_momentum_space`."""
    scale = np.sqrt(2.0 * np.pi) / grid.dr
    return TwoComponentWaveFunction(sp_fft.ifft(phi1) * scale, sp_fft.ifft(phi0) * scale, grid)


def momentum_norm(phi1: np.ndarray, phi0: np.ndarray, grid: SpatialGrid) -> float:
    return float((np.sum(np.abs(phi1) ** 2) + np.sum(np.abs(phi0) ** 2)) * grid.dk)


def boundary_population(amplitudes: np.ndarray, grid: SpatialGrid, fraction: float) -> float:
    """Share of the density inside the outer ``fraction`` of the box.

    Args:
        amplitudes (np.ndarray): Array whose last axis runs over the grid;
            all leading axes are summed.
        grid (SpatialGrid): The grid of the amplitudes.
        fraction (float): Width of each edge band relative to the box length.
            A value of 0 selects the two edge cells only.

    Returns:
        float: Band density over total density (0 for an empty state).
    """
    density = np.abs(amplitudes) ** 2
    density = density.reshape(-1, grid.n_points).sum(axis=0)
    total = density.sum()
    if total == 0.0:
        return 0.0
    r = grid.positions
    if fraction <= 0.0:
        band = np.zeros(grid.n_points, dtype=bool)
        band[[0, -1]] = True
    else:
        margin = fraction * grid.length
        band = (r < grid.r_min + margin) | (r >= grid.r_max - margin)
    return float(density[band].sum() / total)
