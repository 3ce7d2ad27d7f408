import numpy as np
import pytest

from pytdpt.grid import TwoComponentWaveFunction, make_grid
from pytdpt.propagator import CouplingOperator, LinearPotentialPair, SystemHamiltonian
from pytdpt.pulse import LaserPulse


def smooth_packet(grid, center=0.0, width=1.0, momentum=0.0):
    """Normalized Gaussian on state |1>, built without the resolution check."""
    r = grid.positions
    packet = np.exp(-(r - center) ** 2 / (4.0 * width ** 2) + 1j * momentum * r)
    packet /= np.sqrt(np.sum(np.abs(packet) ** 2) * grid.dr)
    return TwoComponentWaveFunction(packet, np.zeros(grid.n_points, complex), grid)


@pytest.fixture
def small_grid():
    return make_grid(-8.0, 8.0, 32)


@pytest.fixture
def small_system(small_grid):
    """Linear potentials, a smooth chirped pulse and a packet on a 32-point grid."""
    H = SystemHamiltonian.from_linear_potentials(small_grid, LinearPotentialPair(m0=0.2, C0=0.1, C1=0.4), mass=1.5)
    pulse = LaserPulse.chirped(0.7, 0.3, t_d=0.4, omega0=1.7, b2=0.2)
    Wop = CouplingOperator(0.9, pulse)
    psi = smooth_packet(small_grid, center=0.5, width=1.2, momentum=0.3)
    return H, Wop, psi


@pytest.fixture
def free_grid():
    return make_grid(-40.0, 40.0, 512)
