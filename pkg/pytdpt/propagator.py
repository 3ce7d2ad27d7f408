# pytdpt/propagator.py
"""Propagators for the two-state system.

* :func:`split_operator_step` applies the field-free propagator
  ``exp(-i H0 dt)`` with the symmetric split-operator scheme.
* :func:`simple_algorithm_step` advances every perturbative order of the
  simple algorithm by one step.
* :func:`exact_step` propagates the fully coupled Hamiltonian and serves as
  the reference solution.
* :func:`perturbative_reference_one_step` evaluates the iterated integral of
  perturbation theory over one step with fine quadrature.
* :func:`convergence_split` separates a norm series into its
  step-independent part and the part linear in the time step.

Amplitude arrays have shape ``(..., 2, n_points)``; index 0 of the
second-to-last axis is state |1>, index 1 is state |0>.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Tuple, Union

import numpy as np
import pandas as pd
from scipy import fft as sp_fft

from .constants import MAX_ORDER
from .errors import ConfigurationError, GridMismatchError
from .grid import SpatialGrid, TwoComponentWaveFunction
from .pulse import LaserPulse, field_at


@dataclass(frozen=True)
class LinearPotentialPair:
    """Linear diabatic potentials ``V_j(R) = m_j R + C_j`` with ``m1 = -m0``."""
    m0: float
    C0: float = 0.0
    C1: float = 0.0

    def potentials(self, positions: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Returns (V1, V0) sampled at ``positions``."""
        return -self.m0 * positions + self.C1, self.m0 * positions + self.C0


@dataclass(eq=False)
class SystemHamiltonian:
    """Field-free Hamiltonian H0 = T + diag(V1, V0) on a grid."""
    grid: SpatialGrid
    potential1: np.ndarray
    potential0: np.ndarray
    mass: float = 1.0
    _factor_cache: Dict[float, Tuple[np.ndarray, np.ndarray]] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self):
        self.potential1 = np.asarray(self.potential1, dtype=float)
        self.potential0 = np.asarray(self.potential0, dtype=float)
        n = self.grid.n_points
        if self.potential1.shape != (n,) or self.potential0.shape != (n,):
            raise ConfigurationError(f"Potentials must be real arrays of length {n}.")
        if self.mass <= 0:
            raise ConfigurationError(f"mass must be positive, got {self.mass}.")

    @classmethod
    def from_linear_potentials(cls, grid: SpatialGrid, pair: LinearPotentialPair,
                               mass: float = 1.0) -> 'SystemHamiltonian':
        v1, v0 = pair.potentials(grid.positions)
        return cls(grid, v1, v0, mass)

    @classmethod
    def constant(cls, grid: SpatialGrid, c1: float, c0: float, mass: float = 1.0) -> 'SystemHamiltonian':
        return cls(grid, np.full(grid.n_points, float(c1)), np.full(grid.n_points, float(c0)), mass)

    @classmethod
    def free(cls, grid: SpatialGrid, mass: float = 1.0) -> 'SystemHamiltonian':
        return cls.constant(grid, 0.0, 0.0, mass)

    @property
    def potentials(self) -> np.ndarray:
        """Stacked ``(2, n_points)`` potential array."""
        return np.stack([self.potential1, self.potential0])

    @property
    def kinetic_energy(self) -> np.ndarray:
        return self.grid.momentum_values ** 2 / (2.0 * self.mass)

    def step_factors(self, dt: float) -> Tuple[np.ndarray, np.ndarray]:
        """Returns the potential half-step and kinetic phase factors for ``dt``."""
        key = float(dt)
        if key not in self._factor_cache:
            if len(self._factor_cache) > 16:
                self._factor_cache.clear()
            half = np.exp(-0.5j * key * self.potentials)
            kinetic = np.exp(-1j * key * self.kinetic_energy)
            self._factor_cache[key] = (half, kinetic)
        return self._factor_cache[key]


@dataclass(frozen=True)
class CouplingOperator:
    """Dipole coupling W(t) = -mu E(t) sigma_x.

    W(t) swaps the electronic components; W(t)^2 acts as the scalar
    ``(mu E(t))^2`` on both of them.
    """
    mu: float
    pulse: LaserPulse

    def amplitude(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        """Off-diagonal matrix element ``-mu E(t)``."""
        return -self.mu * field_at(self.pulse, t)

    def squared(self, t: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
        return (self.mu * field_at(self.pulse, t)) ** 2

    def apply(self, state: TwoComponentWaveFunction, t: float) -> TwoComponentWaveFunction:
        w = self.amplitude(t)
        return TwoComponentWaveFunction(w * state.psi0, w * state.psi1, state.grid)


def _swap(amplitudes: np.ndarray, w: complex) -> np.ndarray:
    """Applies ``w * sigma_x`` to ``(..., 2, n)`` amplitudes."""
    return w * amplitudes[..., ::-1, :]


def _split_kernel(amplitudes: np.ndarray, H: SystemHamiltonian, dt: float) -> np.ndarray:
    half, kinetic = H.step_factors(dt)
    amplitudes = amplitudes * half
    amplitudes = sp_fft.ifft(sp_fft.fft(amplitudes, axis=-1) * kinetic, axis=-1)
    return amplitudes * half


def split_operator_step(state: TwoComponentWaveFunction, H: SystemHamiltonian, dt: float) -> TwoComponentWaveFunction:
    """Applies ``exp(-iV dt/2) exp(-iT dt) exp(-iV dt/2)`` to each component.

    A negative ``dt`` gives the adjoint step.
    """
    if not state.grid.same_as(H.grid):
        raise GridMismatchError("State and Hamiltonian live on different grids.")
    return TwoComponentWaveFunction.from_array(_split_kernel(state.as_array(), H, dt), state.grid)


def propagate_free(states: np.ndarray, H: SystemHamiltonian, taus: np.ndarray) -> np.ndarray:
    """Applies one split step of size ``taus[b]`` to each ``states[b]``.

    Args:
        states (np.ndarray): Amplitudes of shape ``(B, 2, n_points)``.
        H (SystemHamiltonian): Field-free Hamiltonian.
        taus (np.ndarray): Step sizes of shape ``(B,)``; zero leaves a state unchanged.

    Returns:
        np.ndarray: Propagated amplitudes with the same shape as ``states``.
    """
    taus = np.asarray(taus, dtype=float)[:, None, None]
    half = np.exp(-0.5j * taus * H.potentials[None])
    kinetic = np.exp(-1j * taus * H.kinetic_energy[None, None, :])
    out = states * half
    out = sp_fft.ifft(sp_fft.fft(out, axis=-1) * kinetic, axis=-1)
    return out * half


@dataclass(frozen=True, eq=False)
class PerturbativeState:
    """All order components of the simple algorithm at step ``step_index``.

    ``amplitudes[m]`` holds the order-m component as a ``(2, n_points)``
    array; their sum is the perturbative wave function of order ``k``.
    """
    amplitudes: np.ndarray
    grid: SpatialGrid
    step_index: int
    dt: float
    t0: float = 0.0

    @classmethod
    def initial(cls, psi: TwoComponentWaveFunction, k: int, dt: float, t0: float = 0.0) -> 'PerturbativeState':
        """Order 0 holds ``psi``; every higher order starts at zero."""
        if not 0 <= k <= MAX_ORDER:
            raise ConfigurationError(f"Perturbation order k must lie in [0, {MAX_ORDER}], got {k}.")
        if dt <= 0:
            raise ConfigurationError(f"dt must be positive, got {dt}.")
        amplitudes = np.zeros((k + 1, 2, psi.grid.n_points), dtype=complex)
        amplitudes[0] = psi.as_array()
        return cls(amplitudes, psi.grid, 0, float(dt), float(t0))

    @property
    def k(self) -> int:
        return self.amplitudes.shape[0] - 1

    @property
    def time(self) -> float:
        return self.t0 + self.step_index * self.dt

    def order(self, m: int) -> TwoComponentWaveFunction:
        return TwoComponentWaveFunction.from_array(self.amplitudes[m], self.grid)

    @property
    def orders(self) -> List[TwoComponentWaveFunction]:
        return [self.order(m) for m in range(self.k + 1)]

    def reconstruct(self, up_to: int = None) -> TwoComponentWaveFunction:
        """Sums the order components ``0..up_to`` (all of them by default)."""
        stop = self.k if up_to is None else up_to
        return TwoComponentWaveFunction.from_array(self.amplitudes[:stop + 1].sum(axis=0), self.grid)


def simple_algorithm_step(ps: PerturbativeState, H: SystemHamiltonian, Wop: CouplingOperator) -> PerturbativeState:
    """Advances every order of the simple algorithm by one time step.

    ``new[0] = U old[0]`` and ``new[m] = U old[m] - i dt W(t_{n+1}) new[m-1]``,
    with ``U`` the split-operator step and the field sampled at the end of
    the step.
    """
    dt = ps.dt
    w = -1j * dt * Wop.amplitude(ps.t0 + (ps.step_index + 1) * dt)
    new = _split_kernel(ps.amplitudes, H, dt)
    for m in range(1, new.shape[0]):
        new[m] += _swap(new[m - 1], w)
    return PerturbativeState(new, ps.grid, ps.step_index + 1, dt, ps.t0)


def iterate_simple_algorithm(ps: PerturbativeState, H: SystemHamiltonian, Wop: CouplingOperator,
                             n_steps: int) -> Iterator[PerturbativeState]:
    """Yields the state after each of ``n_steps`` simple-algorithm steps."""
    for _ in range(n_steps):
        ps = simple_algorithm_step(ps, H, Wop)
        yield ps


def _coupled_half_step(amplitudes: np.ndarray, H: SystemHamiltonian, coupling: float, tau: float) -> np.ndarray:
    # exp(-i tau [[V1, c], [c, V0]]) in closed form.
    v_mean = 0.5 * (H.potential1 + H.potential0)
    delta = 0.5 * (H.potential1 - H.potential0)
    omega = np.sqrt(delta ** 2 + coupling ** 2)
    cos = np.cos(omega * tau)
    sin_over = tau * np.sinc(omega * tau / np.pi)
    phase = np.exp(-1j * v_mean * tau)
    psi1, psi0 = amplitudes[0], amplitudes[1]
    new1 = phase * (cos * psi1 - 1j * sin_over * (delta * psi1 + coupling * psi0))
    new0 = phase * (cos * psi0 - 1j * sin_over * (coupling * psi1 - delta * psi0))
    return np.stack([new1, new0])


def exact_step(state: TwoComponentWaveFunction, H: SystemHamiltonian, Wop: CouplingOperator,
               t_mid: float, dt: float) -> TwoComponentWaveFunction:
    """Split-operator step of the fully coupled Hamiltonian.

    The potential half-steps use the analytic exponential of the 2x2
    potential-plus-coupling matrix with the field frozen at ``t_mid``.
    """
    coupling = Wop.amplitude(t_mid)
    amplitudes = _coupled_half_step(state.as_array(), H, coupling, 0.5 * dt)
    amplitudes = sp_fft.ifft(sp_fft.fft(amplitudes, axis=-1) * H.step_factors(dt)[1], axis=-1)
    amplitudes = _coupled_half_step(amplitudes, H, coupling, 0.5 * dt)
    return TwoComponentWaveFunction.from_array(amplitudes, state.grid)


def propagate_exact(psi: TwoComponentWaveFunction, H: SystemHamiltonian, Wop: CouplingOperator,
                    dt: float, n_steps: int, t0: float = 0.0) -> TwoComponentWaveFunction:
    """Runs ``n_steps`` exact steps with midpoint field sampling."""
    state = psi
    for n in range(n_steps):
        state = exact_step(state, H, Wop, t0 + (n + 0.5) * dt, dt)
    return state


def perturbative_reference_one_step(psi0: TwoComponentWaveFunction, H: SystemHamiltonian, Wop: CouplingOperator,
                                    dt: float, k: int, n_sub: int = 256, t0: float = 0.0) -> TwoComponentWaveFunction:
    """Evaluates the order-``k`` perturbative wave function after one step.

    Order by order, ``Psi(t, l) = U(t) psi0 - i int_0^t U(t - t') W(t') Psi(t', l - 1) dt'``
    is evaluated on ``n_sub + 1`` sub-nodes with the composite trapezoid rule.
    ``U(tau)`` is the field-free split step of size ``tau``.

    Args:
        psi0 (TwoComponentWaveFunction): State at ``t0``.
        H (SystemHamiltonian): Field-free Hamiltonian.
        Wop (CouplingOperator): Coupling.
        dt (float): Step length.
        k (int): Perturbation order.
        n_sub (int, optional): Number of quadrature intervals, at least 64.
        t0 (float, optional): Start time of the step.

    Returns:
        TwoComponentWaveFunction: The order-``k`` state at ``t0 + dt``.
    """
    if n_sub < 64:
        raise ConfigurationError(f"n_sub must be at least 64, got {n_sub}.")
    if k < 0 or k > MAX_ORDER:
        raise ConfigurationError(f"k must lie in [0, {MAX_ORDER}], got {k}.")

    h = dt / n_sub
    nodes = h * np.arange(n_sub + 1)
    couplings = Wop.amplitude(t0 + nodes)
    start = np.broadcast_to(psi0.as_array(), (n_sub + 1, 2, psi0.grid.n_points))
    free = propagate_free(np.array(start), H, nodes)

    level = free
    for _ in range(k):
        sources = couplings[:, None, None] * level[:, ::-1, :]
        integral = np.zeros_like(level)
        # Diagonal term i == j carries half weight for j >= 1.
        integral[1:] += 0.5 * h * sources[1:]
        for d in range(1, n_sub + 1):
            moved = propagate_free(sources[:n_sub + 1 - d], H, np.full(n_sub + 1 - d, d * h))
            weights = np.full(n_sub + 1 - d, h)
            weights[0] = 0.5 * h
            integral[d:] += weights[:, None, None] * moved
        level = free - 1j * integral
    return TwoComponentWaveFunction.from_array(level[-1], psi0.grid)


@dataclass
class ConvergenceReport:
    """Richardson split of a norm-deviation series.

    Attributes:
        times (np.ndarray): Common time points of the two runs.
        dt (float): Coarse time step.
        deviation_coarse (np.ndarray): Norm deviation e(dt).
        deviation_fine (np.ndarray): Norm deviation e(dt/2).
        dt_independent (np.ndarray): Estimate of the step-independent part.
        linear_coefficient (np.ndarray): Estimate of the coefficient of dt.
    """
    times: np.ndarray
    dt: float
    deviation_coarse: np.ndarray
    deviation_fine: np.ndarray
    dt_independent: np.ndarray
    linear_coefficient: np.ndarray

    @property
    def dt_independent_fraction(self) -> np.ndarray:
        """|step-independent part| / |e(dt)|, NaN where e(dt) vanishes."""
        with np.errstate(divide='ignore', invalid='ignore'):
            return np.where(self.deviation_coarse != 0.0,
                            np.abs(self.dt_independent) / np.abs(self.deviation_coarse), np.nan)

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({
            't': self.times,
            'deviation_dt': self.deviation_coarse,
            'deviation_half_dt': self.deviation_fine,
            'dt_independent': self.dt_independent,
            'linear_coefficient': self.linear_coefficient,
        })


def convergence_split(run_a: pd.Series, run_b: pd.Series, dt: float = None) -> ConvergenceReport:
    """Splits the norm deviation into a step-independent and a linear part.

    Args:
        run_a (pd.Series): Total norm indexed by time, computed with step dt.
        run_b (pd.Series): Total norm indexed by time, computed with step dt/2.
        dt (float, optional): The coarse step; inferred from ``run_a`` if omitted.

    Returns:
        ConvergenceReport: Per common time, ``2 e(dt/2) - e(dt)`` and
        ``(e(dt) - e(dt/2)) / (dt/2)``.

    Raises:
        GridMismatchError: If a time of ``run_a`` has no counterpart in ``run_b``.
    """
    times_a = np.asarray(run_a.index, dtype=float)
    times_b = np.asarray(run_b.index, dtype=float)
    if dt is None:
        if len(times_a) < 2:
            raise GridMismatchError("Cannot infer dt from a series with fewer than two points.")
        dt = float(np.min(np.diff(times_a)))
    if len(times_b) == 0:
        raise GridMismatchError("The fine run is empty.")

    scale = max(1.0, float(np.max(np.abs(times_a))) if len(times_a) else 1.0)
    positions = np.searchsorted(times_b, times_a)
    positions = np.clip(positions, 0, len(times_b) - 1)
    candidates = np.stack([positions, np.clip(positions - 1, 0, len(times_b) - 1)])
    nearest = np.where(np.abs(times_b[candidates[0]] - times_a) <= np.abs(times_b[candidates[1]] - times_a),
                       candidates[0], candidates[1])
    mismatch = np.abs(times_b[nearest] - times_a) > 1e-9 * scale
    if np.any(mismatch):
        raise GridMismatchError(
            f"{int(mismatch.sum())} time point(s) of the coarse run are missing from the fine run."
        )

    e_coarse = np.asarray(run_a.values, dtype=float) - 1.0
    e_fine = np.asarray(run_b.values, dtype=float)[nearest] - 1.0
    logging.info(f"Convergence split over {len(times_a)} common time points (dt={dt}).")
    return ConvergenceReport(
        times=times_a,
        dt=dt,
        deviation_coarse=e_coarse,
        deviation_fine=e_fine,
        dt_independent=2.0 * e_fine - e_coarse,
        linear_coefficient=(e_coarse - e_fine) / (0.5 * dt),
    )
