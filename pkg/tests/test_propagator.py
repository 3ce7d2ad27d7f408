import numpy as np
import pandas as pd
import pytest

from conftest import smooth_packet
from pytdpt.errors import ConfigurationError, GridMismatchError
from pytdpt.grid import TwoComponentWaveFunction, gaussian_packet, make_grid
from pytdpt.propagator import (
    CouplingOperator, LinearPotentialPair, PerturbativeState, SystemHamiltonian, convergence_split,
    exact_step, iterate_simple_algorithm, perturbative_reference_one_step, propagate_exact, propagate_free,
    simple_algorithm_step, split_operator_step,
)
from pytdpt.pulse import LaserPulse
from pytdpt.workflow import ScenarioConfig
from pytdpt.api import simulate


def _run(ps, H, Wop, n_steps):
    for ps in iterate_simple_algorithm(ps, H, Wop, n_steps):
        pass
    return ps


# --- Field-free propagation ---

def test_split_step_conserves_norm(small_system):
    H, _, psi = small_system
    for _ in range(100):
        psi = split_operator_step(psi, H, 0.05)
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)


def test_negative_step_is_the_adjoint(small_system):
    H, _, psi = small_system
    back = split_operator_step(split_operator_step(psi, H, 0.1), H, -0.1)
    assert np.allclose(back.as_array(), psi.as_array(), atol=1e-13)


def test_free_gaussian_spreads_analytically(free_grid):
    H = SystemHamiltonian.free(free_grid, mass=1.0)
    psi = gaussian_packet(free_grid, 0.0, 1.0)
    for _ in range(100):
        psi = split_operator_step(psi, H, 0.05)
    _, width = psi.position_moments()
    assert width == pytest.approx(np.sqrt(1.0 + (5.0 / 2.0) ** 2), rel=1e-8)


def test_constant_potential_only_adds_a_phase(small_grid):
    psi = smooth_packet(small_grid, width=1.2)
    shifted = split_operator_step(psi, SystemHamiltonian.constant(small_grid, 0.7, 0.7), 0.1)
    free = split_operator_step(psi, SystemHamiltonian.free(small_grid), 0.1)
    assert np.allclose(shifted.as_array(), np.exp(-0.07j) * free.as_array(), atol=1e-14)


def test_mismatched_grid_is_rejected(small_system):
    H, _, _ = small_system
    other = smooth_packet(make_grid(-8.0, 8.0, 64))
    with pytest.raises(GridMismatchError):
        split_operator_step(other, H, 0.1)


def test_propagate_free_matches_single_steps(small_system):
    H, _, psi = small_system
    taus = np.array([0.0, 0.05, 0.1])
    states = np.stack([psi.as_array()] * 3)
    moved = propagate_free(states, H, taus)
    assert np.allclose(moved[0], states[0], atol=1e-15)
    for b in (1, 2):
        assert np.allclose(moved[b], split_operator_step(psi, H, taus[b]).as_array(), atol=1e-14)


# --- Simple algorithm ---

def test_initial_state_validation(small_system):
    _, _, psi = small_system
    with pytest.raises(ConfigurationError):
        PerturbativeState.initial(psi, 33, 0.1)
    with pytest.raises(ConfigurationError):
        PerturbativeState.initial(psi, 2, 0.0)


def test_zero_field_leaves_higher_orders_empty(small_system):
    H, _, psi = small_system
    Wop = CouplingOperator(1.0, LaserPulse.constant(0.0))
    ps = _run(PerturbativeState.initial(psi, 3, 0.1), H, Wop, 20)
    assert not np.any(ps.amplitudes[1:])
    free = psi
    for _ in range(20):
        free = split_operator_step(free, H, 0.1)
    assert np.allclose(ps.order(0).as_array(), free.as_array(), atol=1e-14)
    assert ps.time == pytest.approx(2.0)


def test_even_orders_stay_on_state_one(small_system):
    H, Wop, psi = small_system
    ps = _run(PerturbativeState.initial(psi, 5, 0.1), H, Wop, 12)
    for m in range(6):
        empty_row = 1 if m % 2 == 0 else 0
        assert not np.any(ps.amplitudes[m][empty_row])
        assert np.any(ps.amplitudes[m][1 - empty_row])


def test_one_step_is_a_truncated_power_series(small_system):
    H, Wop, psi = small_system
    dt, k = 0.2, 4
    ps = simple_algorithm_step(PerturbativeState.initial(psi, k, dt), H, Wop)
    base = split_operator_step(psi, H, dt).as_array()
    w = -1j * dt * Wop.amplitude(dt)
    expected = sum(w ** m * (base if m % 2 == 0 else base[::-1]) for m in range(k + 1))
    assert np.allclose(ps.reconstruct().as_array(), expected, atol=1e-14)


def test_order_recursion_links_consecutive_totals(small_system):
    H, Wop, psi = small_system
    dt = 0.1
    before = _run(PerturbativeState.initial(psi, 4, dt), H, Wop, 7)
    after = simple_algorithm_step(before, H, Wop)
    w = -1j * dt * Wop.amplitude(after.time)
    lower = after.amplitudes[:4].sum(axis=0)
    expected = split_operator_step(before.reconstruct(), H, dt).as_array() + w * lower[::-1]
    assert np.allclose(after.reconstruct().as_array(), expected, atol=1e-13)


# --- Exact propagation ---

def test_exact_step_without_field_is_the_split_step(small_system):
    H, _, psi = small_system
    Wop = CouplingOperator(1.0, LaserPulse.constant(0.0))
    assert np.allclose(exact_step(psi, H, Wop, 0.05, 0.1).as_array(),
                       split_operator_step(psi, H, 0.1).as_array(), atol=1e-13)


def test_exact_propagation_is_unitary(small_system):
    H, Wop, psi = small_system
    out = propagate_exact(psi, H, Wop, 0.01, 10_000)
    assert out.norm() == pytest.approx(1.0, abs=1e-10)


def test_rabi_oscillation_of_a_uniform_state():
    grid = make_grid(-8.0, 8.0, 16)
    uniform = np.full(16, 1.0 / np.sqrt(grid.length), complex)
    psi = TwoComponentWaveFunction(uniform, np.zeros(16, complex), grid)
    H = SystemHamiltonian.free(grid)
    Wop = CouplingOperator(1.0, LaserPulse.constant(0.05))
    dt, n = 0.1, 300
    out = propagate_exact(psi, H, Wop, dt, n)
    p1, p0 = out.populations()
    assert p1 == pytest.approx(np.cos(0.05 * n * dt) ** 2, abs=1e-8)
    assert p0 == pytest.approx(np.sin(0.05 * n * dt) ** 2, abs=1e-8)


def test_simple_algorithm_approaches_exact_solution_with_order():
    grid = make_grid(-8.0, 8.0, 32)
    H = SystemHamiltonian.constant(grid, 0.5, 0.0)
    Wop = CouplingOperator(1.0, LaserPulse.constant(0.05))
    psi = smooth_packet(grid, width=1.2)
    dt, n = 0.005, 2000
    exact = propagate_exact(psi, H, Wop, dt, n)

    errors = []
    for k in range(4):
        ps = _run(PerturbativeState.initial(psi, k, dt), H, Wop, n)
        errors.append(np.sqrt((ps.reconstruct() - exact).norm()))
    assert all(later < earlier for earlier, later in zip(errors, errors[1:]))


# --- One-step reference ---

def test_reference_without_coupling_orders_is_the_free_step(small_system):
    H, Wop, psi = small_system
    ref = perturbative_reference_one_step(psi, H, Wop, 0.1, 0, n_sub=64)
    assert np.allclose(ref.as_array(), split_operator_step(psi, H, 0.1).as_array(), atol=1e-14)


def test_reference_rejects_coarse_quadrature(small_system):
    H, Wop, psi = small_system
    with pytest.raises(ConfigurationError):
        perturbative_reference_one_step(psi, H, Wop, 0.1, 2, n_sub=32)


def test_reference_quadrature_converges():
    grid = make_grid(-8.0, 8.0, 64)
    H = SystemHamiltonian.from_linear_potentials(grid, LinearPotentialPair(m0=1e-3, C0=0.0, C1=0.1), mass=2000.0)
    Wop = CouplingOperator(1.0, LaserPulse.unchirped(1.19e-2, 4 * np.log(2) / 413.0 ** 2, omega0=0.45))
    psi = smooth_packet(grid, width=1.0)
    coarse = perturbative_reference_one_step(psi, H, Wop, 0.1, 2, n_sub=256)
    fine = perturbative_reference_one_step(psi, H, Wop, 0.1, 2, n_sub=512)
    assert np.sqrt((coarse - fine).norm()) < 1e-10


def test_one_step_error_is_second_order_in_dt():
    grid = make_grid(-8.0, 8.0, 32)
    H = SystemHamiltonian.constant(grid, 1.0, 0.0)
    Wop = CouplingOperator(1.0, LaserPulse.constant(0.05))
    psi = smooth_packet(grid, width=1.2)

    def one_step_error(dt):
        ps = simple_algorithm_step(PerturbativeState.initial(psi, 2, dt), H, Wop)
        ref = perturbative_reference_one_step(psi, H, Wop, dt, 2, n_sub=256)
        return np.sqrt((ps.reconstruct() - ref).norm())

    assert one_step_error(0.1) / one_step_error(0.05) == pytest.approx(4.0, rel=0.1)


# --- Convergence split ---

def _free_norms(dt, stride, k=2, t_end=400.0, field=0.01):
    config = ScenarioConfig(mass=2000.0, pulse_variant='constant', E0_prime=field, mu=1.0, dt=dt, k=k,
                            t_end=t_end, report_stride=stride)
    frame = simulate(config)
    return pd.Series(frame['total_norm'].to_numpy(), index=frame['t'].to_numpy())


def test_convergence_split_of_a_degenerate_system():
    w, dt = 0.01, 0.2
    report = convergence_split(_free_norms(dt, 1), _free_norms(dt / 2, 2), dt)
    t = report.times

    expected_coarse = -t * dt * w ** 2 + t ** 2 * (t + dt) ** 2 * w ** 4 / 4
    expected_split = w ** 4 * t ** 2 * (t ** 2 - dt ** 2 / 2) / 4
    assert np.allclose(report.deviation_coarse, expected_coarse, rtol=1e-8, atol=1e-13)
    assert np.allclose(report.dt_independent, expected_split, rtol=1e-6, atol=1e-12)

    fraction = report.dt_independent_fraction
    assert fraction[np.argmin(np.abs(t - 4.0))] < 0.1
    assert fraction[-1] > 0.9
    assert list(report.to_dataframe().columns) == [
        't', 'deviation_dt', 'deviation_half_dt', 'dt_independent', 'linear_coefficient']


def test_convergence_split_without_field_is_zero():
    report = convergence_split(_free_norms(0.2, 1, t_end=20.0, field=0.0),
                               _free_norms(0.1, 2, t_end=20.0, field=0.0), 0.2)
    assert np.max(np.abs(report.dt_independent)) < 1e-12
    assert np.max(np.abs(report.linear_coefficient)) < 1e-10


def test_convergence_split_requires_common_times():
    coarse = pd.Series([1.0, 1.0, 1.0], index=[0.0, 0.2, 0.4])
    fine = pd.Series([1.0, 1.0, 1.0], index=[0.0, 0.1, 0.3])
    with pytest.raises(GridMismatchError):
        convergence_split(coarse, fine)
