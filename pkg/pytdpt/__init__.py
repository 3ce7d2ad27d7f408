"""
pytdpt: norm analysis of time-dependent perturbation theory on a grid

This file configures the logging system with optional color support and
defines the public API, so that the main classes and functions can be used
directly from the top-level `pytdpt` import.
"""

import logging

# --- Colored Logging Configuration ---
# Falls back to plain logging when colorlog is not installed.
try:
    import colorlog

    logger = colorlog.getLogger()

    # Interactive consoles may have installed handlers already.
    if logger.hasHandlers():
        logger.handlers.clear()

    handler = colorlog.StreamHandler()
    formatter = colorlog.ColoredFormatter(
        '%(log_color)s%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S',
        log_colors={
            'DEBUG': 'cyan',
            'INFO': 'green',
            'WARNING': 'yellow',
            'ERROR': 'red',
            'CRITICAL': 'bold_red',
        }
    )
    handler.setFormatter(formatter)
    logger.addHandler(handler)
    logger.setLevel(logging.INFO)

except ImportError:
    logging.basicConfig(
        level=logging.INFO,
        format='%(asctime)s - %(levelname)s - %(message)s',
        datefmt='%Y-%m-%d %H:%M:%S'
    )

# --- Public API Definition ---

__version__ = "0.1.0"

from .errors import (
    PytdptError,
    ConfigurationError,
    ResolutionError,
    GridMismatchError,
    DomainError,
    CapacityError,
    NumericalConsistencyError,
    PhysicsGuardError,
)

from .grid import SpatialGrid, TwoComponentWaveFunction, make_grid, gaussian_packet, inner_product
from .pulse import LaserPulse, field_at, envelope_energy, field_energy

from .propagator import (
    SystemHamiltonian,
    LinearPotentialPair,
    CouplingOperator,
    PerturbativeState,
    split_operator_step,
    simple_algorithm_step,
    iterate_simple_algorithm,
    exact_step,
    propagate_exact,
    perturbative_reference_one_step,
    convergence_split,
)

from .norm_analysis import (
    NormOrderClass,
    NormOrderReport,
    classify,
    overlap_matrix,
    norm_orders,
    divergence_onset,
    stationary_vs_hamiltonian_check,
)

from .oracle import (
    combinations_with_repetition,
    closed_form_wavefunction,
    stationary_closed_form,
    xi_direct,
    xi_closed,
    surviving_bracket_count,
    annihilation_check,
    pyramid_reorder_check,
    run_oracle_suite,
)

from .analytics import (
    stationary_prediction,
    stationary_prediction_chirped,
    stationary_asymptote,
    oscillatory_prediction,
    estimate_w_bar,
    build_prediction_set,
)

from .workflow import ScenarioConfig, SimulationWorkflow
from .iterator import ScenarioIterator
from .api import run_scenario, predict_scenario, simulate

from .utils import (
    load_config,
    expand_sweep,
    copy_example_configs,
    export_template_config,
    load_manifest,
    configs_from_manifest,
)

from .constants import FS_TO_AU, MAX_ORDER
