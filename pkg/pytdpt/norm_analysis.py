# pytdpt/norm_analysis.py
"""Decomposition of the perturbative norm into orders.

With ``Psi_j`` the order components of a :class:`PerturbativeState`, the
squared norm of their sum splits as ``sum_j sum_h <Psi_j|Psi_h>``. Grouping
the brackets by ``j + h = 2m`` gives the norm orders ``N_2m``; brackets with
odd ``j + h`` vanish because the two components live on different
electronic states. Orders with ``2m <= k`` are called stationary, the
others oscillatory.
"""

import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Sequence

import numpy as np
import pandas as pd

from .constants import (
    BOUNDARY_BAND_FRACTION, BOUNDARY_BAND_LIMIT, EDGE_CELL_LIMIT,
    IMAGINARY_RESIDUE_TOL, STATIONARY_AGREEMENT_TOL,
)
from .errors import ConfigurationError, DomainError, NumericalConsistencyError, PhysicsGuardError
from .grid import boundary_population
from .propagator import PerturbativeState


class NormOrderClass(str, Enum):
    STATIONARY = 'Stationary'
    OSCILLATORY = 'Oscillatory'


def classify(m: int, k: int) -> NormOrderClass:
    """Classifies the norm order ``N_2m`` of an order-``k`` wave function.

    Raises:
        DomainError: If ``m`` is not in ``1..k``.
    """
    if not 1 <= m <= k:
        raise DomainError(f"Norm order m={m} does not exist for k={k}.")
    return NormOrderClass.STATIONARY if 2 * m <= k else NormOrderClass.OSCILLATORY


@dataclass(frozen=True)
class NormOrderEntry:
    m: int
    value: float
    order_class: NormOrderClass


@dataclass
class NormOrderReport:
    """Norm orders of one perturbative state.

    Attributes:
        time (float): Simulation time (a.u.).
        step_index (int): Number of steps taken.
        total_norm (float): Squared norm of the summed wave function.
        zeroth_order_norm (float): ``<Psi_0|Psi_0>``, 1 for a normalized start.
        entries (List[NormOrderEntry]): One entry per ``m = 1..k``.
    """
    time: float
    step_index: int
    total_norm: float
    zeroth_order_norm: float
    entries: List[NormOrderEntry] = field(default_factory=list)

    @property
    def k(self) -> int:
        return len(self.entries)

    def value(self, m: int) -> float:
        return self.entries[m - 1].value

    @property
    def stationary_sum(self) -> float:
        return float(sum(e.value for e in self.entries if e.order_class is NormOrderClass.STATIONARY))

    @property
    def oscillatory_sum(self) -> float:
        return float(sum(e.value for e in self.entries if e.order_class is NormOrderClass.OSCILLATORY))

    def reconstructed_norm(self) -> float:
        return self.zeroth_order_norm + sum(e.value for e in self.entries)

    def to_row(self) -> Dict[str, Any]:
        """Flattens the report into ``t, total_norm, N_2, ..., class_1, ...``."""
        row: Dict[str, Any] = {'t': self.time, 'total_norm': self.total_norm}
        for e in self.entries:
            row[f'N_{2 * e.m}'] = e.value
        for e in self.entries:
            row[f'class_{e.m}'] = e.order_class.value
        return row


def overlap_matrix(ps: PerturbativeState) -> np.ndarray:
    """Returns the Hermitian matrix ``M[j, h] = <Psi_j|Psi_h>``."""
    flat = ps.amplitudes.reshape(ps.k + 1, -1)
    return (flat.conj() @ flat.T) * ps.grid.dr


def norm_orders(ps: PerturbativeState) -> NormOrderReport:
    """Computes the norm orders ``N_2m`` for ``m = 1..k``.

    Raises:
        NumericalConsistencyError: If an order keeps an imaginary part above
            the tolerance, relative to the magnitude of its brackets.
    """
    k = ps.k
    M = overlap_matrix(ps)
    entries = []
    for m in range(1, k + 1):
        brackets = [M[j, 2 * m - j] for j in range(max(0, 2 * m - k), min(2 * m, k) + 1)]
        value = complex(sum(brackets))
        scale = max(1.0, float(sum(abs(b) for b in brackets)))
        if abs(value.imag) > IMAGINARY_RESIDUE_TOL * scale:
            raise NumericalConsistencyError(
                f"Norm order N_{2 * m} at step {ps.step_index} has imaginary part {value.imag:.3e}."
            )
        entries.append(NormOrderEntry(m, value.real, classify(m, k)))

    return NormOrderReport(
        time=ps.time,
        step_index=ps.step_index,
        total_norm=ps.reconstruct().norm(),
        zeroth_order_norm=float(M[0, 0].real),
        entries=entries,
    )


def check_boundary(ps: PerturbativeState) -> bool:
    """Checks how close each order component comes to the box edges.

    The share of an order is weighed by its norm relative to the zeroth
    order, so an order that has decayed to round-off level (a virtual
    component after an off-resonant pulse) cannot trip the guard. Orders
    with a norm at or above the zeroth order are judged by their own share.

    Returns:
        bool: True if some order has more than the allowed density share in
        the outer band of the box.

    Raises:
        PhysicsGuardError: If an order has a significant share in an edge cell.
    """
    reference = float(np.sum(np.abs(ps.amplitudes[0]) ** 2) * ps.grid.dr)
    near = False
    for m in range(ps.k + 1):
        amplitudes = ps.amplitudes[m]
        if not np.any(amplitudes):
            continue
        order_norm = float(np.sum(np.abs(amplitudes) ** 2) * ps.grid.dr)
        weight = min(1.0, order_norm / reference) if reference > 0.0 else 1.0
        edge = weight * boundary_population(amplitudes, ps.grid, 0.0)
        if edge > EDGE_CELL_LIMIT:
            raise PhysicsGuardError(
                f"Order {m} reached the box edge at t={ps.time:.6g} (edge share {edge:.2e})."
            )
        if weight * boundary_population(amplitudes, ps.grid, BOUNDARY_BAND_FRACTION) > BOUNDARY_BAND_LIMIT:
            near = True
    return near


def reports_to_dataframe(reports: Sequence[NormOrderReport]) -> pd.DataFrame:
    return pd.DataFrame([r.to_row() for r in reports])


def _order_columns(frame: pd.DataFrame, order_class: NormOrderClass) -> List[str]:
    columns = []
    for name in frame.columns:
        if not name.startswith('class_'):
            continue
        m = int(name.split('_')[1])
        if len(frame) and frame[name].iloc[0] == order_class.value:
            columns.append(f'N_{2 * m}')
    return columns


def stationary_baseline(frame: pd.DataFrame) -> pd.Series:
    """``1 + sum of the stationary orders`` for every row of a norm frame."""
    columns = _order_columns(frame, NormOrderClass.STATIONARY)
    return 1.0 + frame[columns].sum(axis=1)


def divergence_onset(frame: pd.DataFrame, threshold: float = 0.1) -> float:
    """First time at which the total norm exceeds the stationary baseline by ``threshold``.

    Returns ``inf`` if that never happens within the frame.
    """
    if frame.empty:
        return np.inf
    excess = frame['total_norm'] - stationary_baseline(frame)
    hits = np.flatnonzero(excess.to_numpy() > threshold)
    if len(hits) == 0:
        return np.inf
    return float(frame['t'].iloc[hits[0]])


def stationary_vs_hamiltonian_check(config, gradients: Sequence[float], which: str = 'stationary') -> bool:
    """Runs ``config`` once per potential gradient and compares the norm orders.

    Args:
        config (ScenarioConfig): Base parameter point; ``m0`` is replaced.
        gradients (Sequence[float]): At least two gradient values ``m0``.
        which (str, optional): 'stationary' or 'oscillatory' orders to compare.

    Returns:
        bool: True if the selected orders agree within 1e-11 at every step.
    """
    from .api import simulate

    if len(gradients) < 2:
        raise ConfigurationError("At least two gradient values are needed for the comparison.")
    order_class = NormOrderClass(which.capitalize())

    frames = [simulate(replace(config, m0=float(g), report_stride=1)) for g in gradients]
    columns = _order_columns(frames[0], order_class)
    if not columns:
        logging.warning(f"k={config.k} has no {which} norm orders; the comparison is vacuous.")
        return True

    reference = frames[0][columns].to_numpy()
    for g, frame in zip(gradients[1:], frames[1:]):
        deviation = float(np.max(np.abs(frame[columns].to_numpy() - reference)))
        if deviation > STATIONARY_AGREEMENT_TOL:
            logging.info(f"{which.capitalize()} orders for m0={g} deviate by {deviation:.3e}.")
            return False
    return True
