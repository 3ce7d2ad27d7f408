import numpy as np
import pytest

from pytdpt.errors import ConfigurationError, GridMismatchError, ResolutionError
from pytdpt.grid import (
    TwoComponentWaveFunction, boundary_population, from_momentum_space, gaussian_packet, inner_product,
    make_grid, momentum_norm, to_momentum_space,
)


@pytest.mark.parametrize("r_min, r_max, n_points", [
    (0.0, 0.0, 64),
    (1.0, -1.0, 64),
    (-1.0, 1.0, 100),
    (-1.0, 1.0, 8),
])
def test_make_grid_rejects_bad_parameters(r_min, r_max, n_points):
    with pytest.raises(ConfigurationError):
        make_grid(r_min, r_max, n_points)


def test_grid_excludes_right_edge():
    grid = make_grid(-40.0, 40.0, 256)
    assert grid.dr == pytest.approx(0.3125, abs=0.0)
    assert grid.positions[0] == -40.0
    assert grid.positions[-1] == pytest.approx(40.0 - grid.dr)
    assert grid.momentum_values[0] == 0.0


def test_gaussian_packet_is_normalized_with_requested_moments(free_grid):
    psi = gaussian_packet(free_grid, center=3.0, width=2.0, momentum=0.5)
    mean, std = psi.position_moments()
    assert psi.norm() == pytest.approx(1.0, abs=1e-12)
    assert mean == pytest.approx(3.0, abs=1e-8)
    assert std == pytest.approx(2.0, rel=1e-8)
    assert not np.any(psi.psi0)


def test_gaussian_packet_on_state_zero(free_grid):
    psi = gaussian_packet(free_grid, 0.0, 2.0, which_state=0)
    assert psi.populations() == pytest.approx((0.0, 1.0), abs=1e-12)


def test_narrow_packet_raises_resolution_error():
    grid = make_grid(-40.0, 40.0, 256)
    with pytest.raises(ResolutionError) as excinfo:
        gaussian_packet(grid, 0.0, 1.0)
    # Callers catching bad input generically still see it.
    assert isinstance(excinfo.value, ConfigurationError)
    assert isinstance(excinfo.value, ValueError)


def test_inner_product_rejects_different_grids():
    a = gaussian_packet(make_grid(-40.0, 40.0, 512), 0.0, 2.0)
    b = gaussian_packet(make_grid(-40.0, 40.0, 256), 0.0, 2.0)
    with pytest.raises(GridMismatchError):
        inner_product(a, b)
    with pytest.raises(GridMismatchError):
        a + b


def test_inner_product_is_antilinear_in_first_argument(free_grid):
    a = gaussian_packet(free_grid, -1.0, 2.0, momentum=0.3)
    b = gaussian_packet(free_grid, 1.0, 2.0)
    assert inner_product(2j * a, b) == pytest.approx(-2j * inner_product(a, b), abs=1e-14)
    assert inner_product(a, b) == pytest.approx(np.conj(inner_product(b, a)), abs=1e-14)


def test_wave_function_arithmetic(free_grid):
    psi = gaussian_packet(free_grid, 0.0, 2.0)
    assert (psi + psi).norm() == pytest.approx(4.0, abs=1e-12)
    assert (psi - psi).norm() == 0.0


def test_component_length_must_match_grid(free_grid):
    with pytest.raises(ConfigurationError):
        TwoComponentWaveFunction(np.zeros(10), np.zeros(free_grid.n_points), free_grid)


def test_momentum_space_preserves_norm(free_grid):
    psi = gaussian_packet(free_grid, 1.0, 2.0, momentum=-0.7)
    phi1, phi0 = to_momentum_space(psi)
    assert momentum_norm(phi1, phi0, free_grid) == pytest.approx(psi.norm(), abs=1e-12)
    back = from_momentum_space(phi1, phi0, free_grid)
    assert np.allclose(back.psi1, psi.psi1, atol=1e-14)


def test_boundary_population_detects_packets_near_the_edge(free_grid):
    centred = gaussian_packet(free_grid, 0.0, 2.0)
    assert boundary_population(centred.as_array(), free_grid, 0.1) < 1e-12
    assert boundary_population(centred.as_array(), free_grid, 0.0) < 1e-30

    near_edge = gaussian_packet(free_grid, 36.0, 2.0)
    assert boundary_population(near_edge.as_array(), free_grid, 0.1) > 0.4
    assert boundary_population(np.zeros((2, free_grid.n_points)), free_grid, 0.1) == 0.0
