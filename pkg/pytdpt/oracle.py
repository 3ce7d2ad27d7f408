# pytdpt/oracle.py
"""Exact and brute-force checks of the simple algorithm.

The functions in this module enumerate combinations with repetition,
evaluate closed forms of the perturbative wave function and its stationary
norm orders, and verify the combinatorial identities behind the norm
behaviour. Counting and the help function xi use exact integers and
``fractions.Fraction``; every enumeration is protected by a hard capacity
guard.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .constants import (
    ANNIHILATION_MAX_GRID, ANNIHILATION_MAX_STEPS, ANNIHILATION_MAX_TWO_M,
    CLOSED_FORM_MAX_ORDER, CLOSED_FORM_MAX_STEPS, ENUMERATION_MAX_TERMS,
    MAX_BRACKET_BITS, MAX_COUNT_BITS, PYRAMID_MAX_TWO_M,
)
from .errors import CapacityError, DomainError
from .grid import SpatialGrid, TwoComponentWaveFunction, make_grid
from .norm_analysis import norm_orders
from .propagator import (
    CouplingOperator, LinearPotentialPair, PerturbativeState, SystemHamiltonian,
    iterate_simple_algorithm, split_operator_step,
)
from .pulse import LaserPulse


# --- Combinations with repetition ---

@dataclass(frozen=True)
class CombinationVector:
    """Occupation numbers ``(nu_1, ..., nu_n)`` of a combination with repetition."""
    components: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, 'components', tuple(int(c) for c in self.components))
        if any(c < 0 for c in self.components):
            raise DomainError(f"Combination components must be non-negative, got {self.components}.")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def order(self) -> int:
        return sum(self.components)

    def __iter__(self):
        return iter(self.components)

    def __getitem__(self, index):
        return self.components[index]


def combination_count(n: int, m: int) -> int:
    """Number of combinations with repetition, ``C(n + m - 1, m)``."""
    if n < 1 or m < 0:
        raise DomainError(f"Combinations need n >= 1 and m >= 0, got n={n}, m={m}.")
    return math.comb(n + m - 1, m)


def iter_combinations(n: int, m: int) -> Iterator[Tuple[int, ...]]:
    """Yields all ``n``-tuples of non-negative integers summing to ``m``.

    The order is lexicographically descending, e.g. ``(3, 0), (2, 1), (1, 2), (0, 3)``.
    """
    if n < 1 or m < 0:
        raise DomainError(f"Combinations need n >= 1 and m >= 0, got n={n}, m={m}.")
    if n == 1:
        yield (m,)
        return
    for first in range(m, -1, -1):
        for rest in iter_combinations(n - 1, m - first):
            yield (first,) + rest


def combinations_with_repetition(n: int, m: int) -> List[CombinationVector]:
    """Materializes every combination with repetition of ``m`` over ``n`` slots.

    Raises:
        CapacityError: If the count exceeds 2**63 or the enumeration limit.
    """
    count = combination_count(n, m)
    if count.bit_length() > MAX_COUNT_BITS:
        raise CapacityError(f"C({n + m - 1}, {m}) does not fit into {MAX_COUNT_BITS} bits.")
    if count > ENUMERATION_MAX_TERMS:
        raise CapacityError(f"Refusing to materialize {count} combinations (limit {ENUMERATION_MAX_TERMS}).")
    return [CombinationVector(c) for c in iter_combinations(n, m)]


# --- Closed forms ---

def _apply_word(psi: TwoComponentWaveFunction, nu: Sequence[int], H: SystemHamiltonian,
                couplings: Sequence[float], dt: float) -> np.ndarray:
    # For q = 1..n: one field-free step, then W(t_q)^nu_q.
    state = psi
    for power, w in zip(nu, couplings):
        state = split_operator_step(state, H, dt)
        if power:
            amplitudes = w ** power * state.as_array()
            if power % 2:
                amplitudes = amplitudes[::-1]
            state = TwoComponentWaveFunction.from_array(amplitudes, state.grid)
    return state.as_array()


def closed_form_wavefunction(n: int, k: int, dt: float, H: SystemHamiltonian, Wop: CouplingOperator,
                             psi_init: TwoComponentWaveFunction, t0: float = 0.0) -> TwoComponentWaveFunction:
    """Evaluates the simple algorithm after ``n`` steps as an explicit sum.

    ``Psi(n, k) = sum_m (-i dt)^m sum_nu W(t_n)^nu_n U ... W(t_1)^nu_1 U Psi(0)``,
    the inner sum running over all combinations with repetition ``nu`` of
    ``m`` over ``n`` time slots.

    Raises:
        CapacityError: For ``n > 8`` or ``k > 5``.
    """
    if n > CLOSED_FORM_MAX_STEPS or k > CLOSED_FORM_MAX_ORDER:
        raise CapacityError(
            f"Closed form limited to n <= {CLOSED_FORM_MAX_STEPS} and k <= {CLOSED_FORM_MAX_ORDER}, got n={n}, k={k}."
        )
    if n < 0 or k < 0:
        raise DomainError(f"n and k must be non-negative, got n={n}, k={k}.")
    if n == 0:
        return psi_init

    couplings = [Wop.amplitude(t0 + q * dt) for q in range(1, n + 1)]
    total = np.zeros((2, psi_init.grid.n_points), dtype=complex)
    for m in range(k + 1):
        factor = (-1j * dt) ** m
        for nu in iter_combinations(n, m):
            total += factor * _apply_word(psi_init, nu, H, couplings, dt)
    return TwoComponentWaveFunction.from_array(total, psi_init.grid)


def stationary_closed_form(n: int, m: int, dt: float, w_values: Sequence[float], method: str = 'enumerate') -> float:
    """Stationary norm order ``N_2m`` after ``n`` steps from the field samples alone.

    ``N_2m = (-1)^m dt^2m sum_nu prod_j W(j)^(2 nu_j)``. No Hamiltonian enters.

    Args:
        n (int): Number of steps.
        m (int): Half the norm order.
        dt (float): Time step.
        w_values (Sequence[float]): ``W(j) = -mu E(t_j)`` for ``j = 1..n``.
        method (str, optional): 'enumerate' sums over every combination;
            'recurrence' builds the complete homogeneous symmetric
            polynomial step by step.

    Raises:
        CapacityError: If 'enumerate' would visit more than 10**7 terms.
    """
    w = np.asarray(w_values, dtype=float)
    if len(w) != n:
        raise DomainError(f"Expected {n} field samples, got {len(w)}.")
    if m < 0:
        raise DomainError(f"m must be non-negative, got {m}.")
    prefactor = (-1) ** m * dt ** (2 * m)
    if n == 0:
        return 1.0 if m == 0 else 0.0
    squares = w ** 2

    if method == 'recurrence':
        h = np.zeros(m + 1)
        h[0] = 1.0
        for x in squares:
            for j in range(1, m + 1):
                h[j] += x * h[j - 1]
        return float(prefactor * h[m])
    if method != 'enumerate':
        raise DomainError(f"Unknown method '{method}'.")

    count = combination_count(n, m)
    if count > ENUMERATION_MAX_TERMS:
        raise CapacityError(f"Stationary closed form would enumerate {count} terms (limit {ENUMERATION_MAX_TERMS}).")
    total = math.fsum(math.prod(float(x) ** p for x, p in zip(squares, nu) if p) for nu in iter_combinations(n, m))
    return float(prefactor * total)


# --- The help function xi ---

def xi_direct(m: int, k: int) -> Fraction:
    """``sum_{j=-(k-m)}^{k-m} (-1)^j / ((m+j)! (m-j)!)`` as an exact rational.

    Terms with ``|j| > m`` are skipped; the sum is empty (zero) for ``k < m``.
    """
    if m < 1 or k < 0:
        raise DomainError(f"xi needs m >= 1 and k >= 0, got m={m}, k={k}.")
    span = min(k - m, m)
    total = Fraction(0)
    for j in range(-span, span + 1):
        total += Fraction((-1) ** abs(j), math.factorial(m + j) * math.factorial(m - j))
    return total


def xi_closed(m: int, k: int) -> Fraction:
    """``(-1)^(k-m) / (m k! (2m-1-k)!)`` for ``k < 2m <= 2k``.

    Raises:
        DomainError: Outside the oscillatory window.
    """
    if not (m >= 1 and k < 2 * m <= 2 * k):
        raise DomainError(f"(m, k) = ({m}, {k}) lies outside the oscillatory window k < 2m <= 2k.")
    return Fraction((-1) ** (k - m), m * math.factorial(k) * math.factorial(2 * m - 1 - k))


# --- Bracket counting ---

def _check_window(m: int, k: int):
    if not (m >= 1 and k < 2 * m <= 2 * k):
        raise DomainError(f"(m, k) = ({m}, {k}) lies outside the oscillatory window k < 2m <= 2k.")


def bracket_sign_sum(n: int, m: int, k: int) -> int:
    """``sum_{j=2m-k}^{k} (-1)^j C(n+j-1, j) C(n+2m-j-1, 2m-j)``."""
    _check_window(m, k)
    if n < 1:
        raise DomainError(f"n must be positive, got {n}.")
    total = 0
    for j in range(2 * m - k, k + 1):
        total += (-1) ** j * math.comb(n + j - 1, j) * math.comb(n + 2 * m - j - 1, 2 * m - j)
        if total.bit_length() > MAX_BRACKET_BITS:
            raise CapacityError(f"Bracket sum for n={n} exceeds {MAX_BRACKET_BITS} bits.")
    return total


def surviving_bracket_count(n: int, m: int, k: int) -> int:
    """Number of bracket terms of ``N_2m`` left after pairwise annihilation."""
    return abs(bracket_sign_sum(n, m, k))


# --- Annihilation of bracket terms ---

@dataclass
class AnnihilationReport:
    """Outcome of grouping all bracket terms of one oscillatory norm order.

    Attributes:
        n, m, k (int): Steps, half order and perturbation order.
        groups (Dict[tuple, int]): Net signed multiplicity per operator word.
        representatives (Dict[tuple, tuple]): One ``(nu, rho)`` pair per word.
        expected_sign (int): ``(-1)^(k-m)``.
        passed (bool): Every word with non-zero net carries the expected sign.
        reconstructed (float): ``N_2m`` rebuilt from the surviving words.
        simulated (float): ``N_2m`` from the simple algorithm.
    """
    n: int
    m: int
    k: int
    groups: Dict[tuple, int]
    representatives: Dict[tuple, tuple]
    expected_sign: int
    passed: bool
    reconstructed: float = np.nan
    simulated: float = np.nan

    @property
    def survivors(self) -> Dict[tuple, int]:
        return {key: net for key, net in self.groups.items() if net != 0}

    @property
    def surviving_total(self) -> int:
        return sum(abs(net) for net in self.groups.values())

    @property
    def reconstruction_error(self) -> float:
        return abs(self.reconstructed - self.simulated)


def _word_key(nu: Tuple[int, ...], rho: Tuple[int, ...]) -> tuple:
    # <O_nu psi|O_rho psi>: slots above the last odd total collapse to scalars.
    totals = tuple(a + b for a, b in zip(nu, rho))
    odd = [q for q, t in enumerate(totals) if t % 2]
    if not odd:
        return (totals,)
    r = odd[-1]
    return (totals, tuple(a % 2 for a in nu[:r]))


def _default_small_system(n_points: int = 16) -> Tuple[SystemHamiltonian, CouplingOperator]:
    grid = make_grid(-4.0, 4.0, n_points)
    H = SystemHamiltonian.from_linear_potentials(grid, LinearPotentialPair(m0=0.3, C0=0.0, C1=0.5), mass=1.0)
    Wop = CouplingOperator(1.0, LaserPulse.unchirped(0.8, 0.05, t_d=0.2, omega0=1.3))
    return H, Wop


def _default_packet(grid: SpatialGrid) -> TwoComponentWaveFunction:
    # Built directly; the small grids used here are too coarse for gaussian_packet.
    r = grid.positions
    packet = np.exp(-(r - 0.3) ** 2 / 2.0 + 0.4j * r)
    packet /= np.sqrt(np.sum(np.abs(packet) ** 2) * grid.dr)
    return TwoComponentWaveFunction(packet, np.zeros(grid.n_points, complex), grid)


def annihilation_report(n: int, m: int, k: int, H: Optional[SystemHamiltonian] = None,
                        Wop: Optional[CouplingOperator] = None, dt: float = 0.1,
                        psi: Optional[TwoComponentWaveFunction] = None) -> AnnihilationReport:
    """Enumerates and groups every bracket term of the oscillatory order ``N_2m``.

    Each bracket ``<O_nu Psi0|O_rho Psi0>`` with ``|nu| = j`` and
    ``|rho| = 2m - j`` carries the factor ``(-1)^(m-j) dt^2m``. Brackets
    with the same operator word are summed; the words are integer tuples,
    so grouping is exact.

    Raises:
        DomainError: Outside the oscillatory window.
        CapacityError: For ``n > 4``, ``2m > 8`` or grids above 16 points.
    """
    _check_window(m, k)
    if n < 1 or n > ANNIHILATION_MAX_STEPS or 2 * m > ANNIHILATION_MAX_TWO_M:
        raise CapacityError(
            f"Annihilation check limited to 1 <= n <= {ANNIHILATION_MAX_STEPS} and 2m <= {ANNIHILATION_MAX_TWO_M}."
        )
    if H is None or Wop is None:
        default_H, default_W = _default_small_system()
        H = default_H if H is None else H
        Wop = default_W if Wop is None else Wop
    if psi is None:
        psi = _default_packet(H.grid)
    if H.grid.n_points > ANNIHILATION_MAX_GRID:
        raise CapacityError(f"Annihilation check limited to grids of {ANNIHILATION_MAX_GRID} points.")

    groups: Counter = Counter()
    representatives: Dict[tuple, tuple] = {}
    for j in range(2 * m - k, k + 1):
        sign = (-1) ** (m - j)
        for nu in iter_combinations(n, j):
            for rho in iter_combinations(n, 2 * m - j):
                key = _word_key(nu, rho)
                groups[key] += sign
                representatives.setdefault(key, (nu, rho))

    expected = (-1) ** (k - m)
    passed = all(net * expected > 0 for net in groups.values() if net != 0)

    couplings = [Wop.amplitude(q * dt) for q in range(1, n + 1)]
    cache: Dict[tuple, np.ndarray] = {}

    def word(nu):
        if nu not in cache:
            cache[nu] = _apply_word(psi, nu, H, couplings, dt)
        return cache[nu]

    reconstructed = 0.0 + 0.0j
    for key, net in groups.items():
        if net:
            nu, rho = representatives[key]
            reconstructed += net * np.vdot(word(nu), word(rho)) * psi.grid.dr
    reconstructed *= dt ** (2 * m)

    ps = PerturbativeState.initial(psi, k, dt)
    for ps in iterate_simple_algorithm(ps, H, Wop, n):
        pass
    simulated = norm_orders(ps).value(m)

    report = AnnihilationReport(n, m, k, dict(groups), representatives, expected, passed,
                                float(reconstructed.real), simulated)
    logging.info(
        f"Annihilation (n={n}, m={m}, k={k}): {len(report.survivors)} surviving words, "
        f"passed={passed}, reconstruction error {report.reconstruction_error:.2e}"
    )
    return report


def annihilation_check(n: int, m: int, k: int, H: Optional[SystemHamiltonian] = None,
                       Wop: Optional[CouplingOperator] = None, dt: float = 0.1,
                       psi: Optional[TwoComponentWaveFunction] = None) -> bool:
    """True if every surviving bracket word of ``N_2m`` has sign ``(-1)^(k-m)``."""
    return annihilation_report(n, m, k, H, Wop, dt, psi).passed


# --- Reordering identities ---

def _pyramid_lhs(two_m: int, k: Optional[int]) -> Counter:
    low, high = (0, two_m) if k is None else (two_m - k, k)
    return Counter(
        (j, d, s)
        for j in range(low, high + 1)
        for d in range(0, j + 1)
        for s in range(j - d, two_m - d + 1)
    )


def _pyramid_rhs(two_m: int, k: Optional[int]) -> Counter:
    if k is None:
        return Counter(
            (j, d, s)
            for s in range(0, two_m + 1)
            for d in range(0, two_m - s + 1)
            for j in range(d, d + s + 1)
        )
    return Counter(
        (j, d, s)
        for s in range(0, two_m + 1)
        for d in range(max(two_m - k - s, 0), min(two_m - s, k) + 1)
        for j in range(max(two_m - k, d), min(d + s, k) + 1)
    )


def pyramid_reorder_check(two_m: int, k: Optional[int] = None) -> bool:
    """Checks that reordering the triple sum over ``(j, d, s)`` keeps its index set.

    With ``k`` omitted the full pyramid ``0 <= d <= j <= 2m``,
    ``j - d <= s <= 2m - d`` is compared with its ``s``-outermost order;
    with ``k`` given the frustum ``2m - k <= j <= k`` is compared instead.
    """
    if two_m < 0 or two_m % 2:
        raise DomainError(f"two_m must be a non-negative even number, got {two_m}.")
    if two_m > PYRAMID_MAX_TWO_M:
        raise CapacityError(f"Pyramid check limited to two_m <= {PYRAMID_MAX_TWO_M}.")
    if k is not None and not two_m // 2 <= k <= two_m:
        raise DomainError(f"Frustum needs m <= k <= 2m, got two_m={two_m}, k={k}.")
    return _pyramid_lhs(two_m, k) == _pyramid_rhs(two_m, k)


def alternating_sum_check(max_q: int = 20) -> bool:
    """``sum_{j=p}^{q} (-1)^j`` is ``(-1)^p`` (equivalently ``(-1)^q``) for even ``q - p``, else 0."""
    for p in range(max_q + 1):
        for q in range(p, max_q + 1):
            direct = sum((-1) ** j for j in range(p, q + 1))
            even = (q - p) % 2 == 0
            if direct != ((-1) ** p if even else 0) or direct != ((-1) ** q if even else 0):
                return False
    return True


def alternating_collapse_check(two_m: int, seed: int = 0) -> bool:
    """The pyramid sum of ``(-1)^j phi(d, s)`` collapses onto even ``s``.

    ``phi`` is a table of random integers, so the comparison is exact.
    """
    if two_m < 0 or two_m % 2:
        raise DomainError(f"two_m must be a non-negative even number, got {two_m}.")
    rng = np.random.default_rng(seed)
    phi = rng.integers(-1000, 1000, size=(two_m + 1, two_m + 1)).tolist()
    lhs = sum((-1) ** j * phi[d][s] for j, d, s in _pyramid_lhs(two_m, None))
    rhs = sum((-1) ** d * phi[d][2 * r] for r in range(two_m // 2 + 1) for d in range(two_m - 2 * r + 1))
    return lhs == rhs


def _stationary_exact(squares: Sequence[Fraction], max_m: int) -> List[Fraction]:
    h = [Fraction(1)] + [Fraction(0)] * max_m
    for x in squares:
        for j in range(1, max_m + 1):
            h[j] += x * h[j - 1]
    return h


def stationary_recursion_check(w_values: Sequence[float], m: int, dt: float) -> bool:
    """Exact check of ``N_{n+1,2m} = sum_r (-1)^r dt^2r W(n+1)^2r N_{n,2(m-r)}``.

    Field samples and ``dt`` are converted to exact rationals, so the
    comparison carries no tolerance.
    """
    dt_q = Fraction(dt)
    squares = [Fraction(float(w)) ** 2 for w in w_values]

    def orders(n):
        h = _stationary_exact(squares[:n], m)
        return [(-1) ** i * dt_q ** (2 * i) * h[i] for i in range(m + 1)]

    previous = orders(0)
    for n in range(len(squares)):
        current = orders(n + 1)
        x = squares[n]
        for mm in range(m + 1):
            recursed = sum((-1) ** r * dt_q ** (2 * r) * x ** r * previous[mm - r] for r in range(mm + 1))
            if recursed != current[mm]:
                return False
        previous = current
    return True


# --- Suite ---

@dataclass
class _Check:
    check: str
    parameters: str
    passed: bool
    detail: str = ''


def _closed_form_rows(max_k: int) -> List[_Check]:
    grid = make_grid(-8.0, 8.0, 32)
    H = SystemHamiltonian.from_linear_potentials(grid, LinearPotentialPair(m0=0.2, C1=0.3), mass=1.0)
    Wop = CouplingOperator(1.0, LaserPulse.unchirped(0.6, 0.2, t_d=0.3, omega0=2.0))
    r = grid.positions
    packet = np.exp(-r ** 2 / 4.0)
    packet /= np.sqrt(np.sum(np.abs(packet) ** 2) * grid.dr)
    psi = TwoComponentWaveFunction(packet, np.zeros(32, complex), grid)
    dt = 0.1

    rows = []
    for k in range(max_k + 1):
        ps = PerturbativeState.initial(psi, k, dt)
        worst = 0.0
        for n, ps in enumerate(iterate_simple_algorithm(ps, H, Wop, 6), start=1):
            closed = closed_form_wavefunction(n, k, dt, H, Wop, psi)
            worst = max(worst, float(np.max(np.abs(closed.as_array() - ps.reconstruct().as_array()))))
        rows.append(_Check('closed_form_equivalence', f'n<=6, k={k}', worst <= 1e-12, f'max deviation {worst:.2e}'))
    return rows


def run_oracle_suite(max_m: int = 4) -> pd.DataFrame:
    """Runs every identity check up to ``max_m`` and returns a pass/fail table.

    Returns:
        pd.DataFrame: Columns ``check, parameters, passed, detail``.
    """
    if max_m < 1:
        raise DomainError(f"max_m must be at least 1, got {max_m}.")
    logging.info(f"--- Running oracle suite up to m={max_m} ---")
    rows: List[_Check] = []

    for m in range(1, max_m + 1):
        for k in range(m, 2 * m):
            ok = xi_closed(m, k) == xi_direct(m, k)
            rows.append(_Check('xi_identity', f'm={m}, k={k}', ok, str(xi_closed(m, k))))

    for m in range(1, min(max_m, 4) + 1):
        for k in range(m, 2 * m):
            n = 100_000
            ratio = surviving_bracket_count(n, m, k) / n ** (2 * m)
            target = abs(float(xi_closed(m, k)))
            ok = abs(ratio - target) <= 1e-3 * target
            rows.append(_Check('bracket_count_asymptote', f'n={n}, m={m}, k={k}', ok, f'{ratio:.6e} vs {target:.6e}'))

    rows.extend(_closed_form_rows(min(max_m, 4)))

    rng = np.random.default_rng(1)
    w = rng.uniform(-0.5, 0.5, size=12)
    for m in range(1, max_m + 1):
        direct = stationary_closed_form(len(w), m, 0.1, w)
        recurrent = stationary_closed_form(len(w), m, 0.1, w, method='recurrence')
        ok = abs(direct - recurrent) <= 1e-12 * max(1.0, abs(direct))
        rows.append(_Check('stationary_closed_form', f'n={len(w)}, m={m}', ok, f'{direct:.6e}'))
        rows.append(_Check('stationary_recursion', f'n={len(w)}, m={m}', stationary_recursion_check(w, m, 0.1)))

    for n in range(1, 4):
        for m in range(1, min(max_m, 3) + 1):
            for k in range(m, 2 * m):
                report = annihilation_report(n, m, k)
                ok = (report.passed and report.surviving_total == surviving_bracket_count(n, m, k)
                      and report.reconstruction_error <= 1e-12 * max(1.0, abs(report.simulated)))
                rows.append(_Check('annihilation', f'n={n}, m={m}, k={k}', ok,
                                   f'{len(report.survivors)} words, error {report.reconstruction_error:.2e}'))

    for two_m in range(0, min(2 * max_m, PYRAMID_MAX_TWO_M) + 1, 2):
        rows.append(_Check('pyramid_reorder', f'two_m={two_m}', pyramid_reorder_check(two_m)))
        for k in range(two_m // 2, two_m + 1):
            rows.append(_Check('frustum_reorder', f'two_m={two_m}, k={k}', pyramid_reorder_check(two_m, k)))
        rows.append(_Check('alternating_collapse', f'two_m={two_m}', alternating_collapse_check(two_m)))

    rows.append(_Check('alternating_sum', '0<=p<=q<=20', alternating_sum_check(20)))

    table = pd.DataFrame([vars(r) for r in rows])
    failed = int((~table['passed']).sum())
    if failed:
        logging.error(f"Oracle suite: {failed} of {len(table)} checks failed.")
    else:
        logging.info(f"Oracle suite: all {len(table)} checks passed.")
    return table
