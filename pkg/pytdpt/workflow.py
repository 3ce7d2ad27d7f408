# pytdpt/workflow.py

import logging
import dataclasses
from dataclasses import dataclass, asdict
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from .constants import ERF_FORMS, MAX_ORDER, PULSE_VARIANTS, SCENARIOS
from .errors import ConfigurationError, PhysicsGuardError
from .grid import SpatialGrid, TwoComponentWaveFunction, gaussian_packet, make_grid
from .norm_analysis import check_boundary, divergence_onset, norm_orders, reports_to_dataframe
from .propagator import (
    CouplingOperator, LinearPotentialPair, PerturbativeState, SystemHamiltonian, simple_algorithm_step,
)
from .pulse import LaserPulse


@dataclass(frozen=True)
class ScenarioConfig:
    """One fully specified parameter point; every value in atomic units.

    Attributes:
        scenario (str): 'single', 'dt_k_sweep', 'gradient_sweep' or 'chirp_sweep'.
        r_min, r_max (float): Box ``[r_min, r_max)``.
        n_points (int): Number of grid points (power of two).
        mass (float): Reduced mass of the nuclear motion.
        m0 (float): Potential gradient; ``V1 = -m0 R + C1``, ``V0 = m0 R + C0``.
        C0, C1 (float): Potential offsets.
        packet_center, packet_width, packet_momentum (float): Initial Gaussian
            packet on state |1>; ``packet_width`` is the density's standard deviation.
        mu (float): Transition dipole.
        pulse_variant (str): 'unchirped', 'chirped' or 'constant'.
        E0_prime (float): Peak field of the unchirped pulse (the field for 'constant').
        tau_prime (float): FWHM of the unchirped envelope; ignored for 'constant'.
        t_d (float): Time of the pulse maximum.
        omega0 (float): Carrier frequency.
        b2 (float): Spectral chirp.
        dt (float): Time step.
        k (int): Perturbation order, at most 32.
        t_end (float): Propagation time; used when ``n_steps`` is None.
        n_steps (Optional[int]): Number of steps; overrides ``t_end``.
        report_stride (int): Norm orders are recorded every this many steps.
        erf_form (str): 'consistent' or 'published' error-function rate.
        onset_threshold (float): Excess over the stationary baseline that
            marks the divergence onset.
    """
    scenario: str = 'single'
    r_min: float = -40.0
    r_max: float = 40.0
    n_points: int = 256
    mass: float = 1.0
    m0: float = 0.0
    C0: float = 0.0
    C1: float = 0.0
    packet_center: float = 0.0
    packet_width: float = 2.0
    packet_momentum: float = 0.0
    mu: float = 1.0
    pulse_variant: str = 'unchirped'
    E0_prime: float = 0.0
    tau_prime: float = 413.0
    t_d: float = 0.0
    omega0: float = 0.0
    b2: float = 0.0
    dt: float = 1.0
    k: int = 2
    t_end: float = 100.0
    n_steps: Optional[int] = None
    report_stride: int = 10
    erf_form: str = 'consistent'
    onset_threshold: float = 0.1

    # --- Construction ---

    @classmethod
    def field_names(cls) -> List[str]:
        return [f.name for f in dataclasses.fields(cls)]

    @classmethod
    def from_mapping(cls, mapping: Dict[str, Any]) -> 'ScenarioConfig':
        """Builds a config from a flat mapping, coercing values to the field types.

        Raises:
            ConfigurationError: For unknown keys or values of the wrong type.
        """
        known = {f.name: f for f in dataclasses.fields(cls)}
        unknown = sorted(set(mapping) - set(known))
        if unknown:
            raise ConfigurationError(f"Unknown config key(s): {unknown}. Allowed: {list(known)}.")

        values = {}
        problems = []
        for name, raw in mapping.items():
            if raw is None or (isinstance(raw, float) and np.isnan(raw)):
                if name == 'n_steps':
                    values[name] = None
                continue
            default = known[name].default
            try:
                if name == 'n_steps' or isinstance(default, int) and not isinstance(default, bool):
                    if float(raw) != int(float(raw)):
                        raise ValueError(raw)
                    values[name] = int(float(raw))
                elif isinstance(default, float):
                    values[name] = float(raw)
                else:
                    values[name] = str(raw)
            except (TypeError, ValueError):
                problems.append(f"'{name}' has invalid value {raw!r}")
        if problems:
            raise ConfigurationError("Invalid configuration: " + "; ".join(problems) + ".")
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def replace(self, **changes) -> 'ScenarioConfig':
        return dataclasses.replace(self, **changes)

    # --- Validation ---

    @property
    def resolved_n_steps(self) -> int:
        if self.n_steps is not None:
            return int(self.n_steps)
        return int(round(self.t_end / self.dt)) if self.dt > 0 else 0

    def validate(self) -> List[str]:
        """Collects every problem with this parameter point; empty if valid."""
        problems = []
        if self.scenario not in SCENARIOS:
            problems.append(f"scenario '{self.scenario}' is not one of {SCENARIOS}")
        if self.pulse_variant not in PULSE_VARIANTS:
            problems.append(f"pulse_variant '{self.pulse_variant}' is not one of {PULSE_VARIANTS}")
        if self.erf_form not in ERF_FORMS:
            problems.append(f"erf_form '{self.erf_form}' is not one of {ERF_FORMS}")
        if self.r_max <= self.r_min:
            problems.append(f"r_max ({self.r_max}) must exceed r_min ({self.r_min})")
        if self.n_points < 16 or self.n_points & (self.n_points - 1):
            problems.append(f"n_points ({self.n_points}) must be a power of two, at least 16")
        for name in ('mass', 'packet_width', 'dt', 'report_stride', 'onset_threshold'):
            if getattr(self, name) <= 0:
                problems.append(f"{name} must be positive, got {getattr(self, name)}")
        if self.pulse_variant != 'constant' and self.tau_prime <= 0:
            problems.append(f"tau_prime must be positive, got {self.tau_prime}")
        if self.pulse_variant != 'chirped' and self.b2 != 0:
            problems.append(f"b2={self.b2} requires pulse_variant 'chirped'")
        if not 0 <= self.k <= MAX_ORDER:
            problems.append(f"k must lie in [0, {MAX_ORDER}], got {self.k}")
        if self.n_steps is not None and self.n_steps < 1:
            problems.append(f"n_steps must be at least 1, got {self.n_steps}")
        if self.n_steps is None and self.t_end <= 0:
            problems.append(f"t_end must be positive, got {self.t_end}")
        return problems

    def check(self):
        """Raises ConfigurationError listing every problem found by :meth:`validate`."""
        problems = self.validate()
        if problems:
            raise ConfigurationError("Invalid configuration: " + "; ".join(problems) + ".")

    # --- Builders ---

    def build_grid(self) -> SpatialGrid:
        return make_grid(self.r_min, self.r_max, self.n_points)

    def build_hamiltonian(self, grid: SpatialGrid) -> SystemHamiltonian:
        return SystemHamiltonian.from_linear_potentials(grid, LinearPotentialPair(self.m0, self.C0, self.C1), self.mass)

    def build_pulse(self) -> LaserPulse:
        if self.pulse_variant == 'constant':
            return LaserPulse.constant(self.E0_prime, self.omega0, self.t_d)
        return LaserPulse.from_fwhm(self.E0_prime, self.tau_prime, self.t_d, self.omega0, self.b2, self.pulse_variant)

    def build_coupling(self) -> CouplingOperator:
        return CouplingOperator(self.mu, self.build_pulse())

    def build_initial_state(self, grid: SpatialGrid) -> TwoComponentWaveFunction:
        return gaussian_packet(grid, self.packet_center, self.packet_width, self.packet_momentum, which_state=1)


@dataclass
class SimulationResult:
    """Norm-order time series and summary of one parameter point."""
    config: ScenarioConfig
    frame: pd.DataFrame
    summary: Dict[str, Any]


class SimulationWorkflow:
    """Runs the simple algorithm for a single parameter point.

    The workflow is a small state machine:

    **Step 1: Configure and Preview**
        ``configure_and_preview()`` validates the config, builds grid,
        Hamiltonian, pulse and initial packet, and prints a summary.

    **Step 2: Execute**
        ``execute()`` propagates every perturbative order, records the norm
        orders every ``report_stride`` steps and returns a
        :class:`SimulationResult`.

    Attributes:
        config (Optional[ScenarioConfig]): The parameter point.
        is_config_valid (bool): True once the configuration passed validation.
    """

    def __init__(self, config: Optional[ScenarioConfig] = None):
        self.config = config
        self.is_config_valid = False
        self.grid: Optional[SpatialGrid] = None
        self.hamiltonian: Optional[SystemHamiltonian] = None
        self.coupling: Optional[CouplingOperator] = None
        self.initial_state: Optional[TwoComponentWaveFunction] = None

    def configure_and_preview(self, config: Optional[ScenarioConfig] = None, *, show_preview: bool = True, **overrides):
        """Validates the parameter point and builds the physical objects.

        Args:
            config (ScenarioConfig, optional): Replaces the stored config.
            show_preview (bool, optional): Print the configuration summary.
            **overrides: Field values applied on top of the config.

        Raises:
            ConfigurationError: If the configuration has any invalid value.
        """
        logging.info("--- Step 1: Configuring and previewing the simulation ---")
        config = config or self.config or ScenarioConfig()
        if overrides:
            config = ScenarioConfig.from_mapping({**config.to_dict(), **overrides})
        self.config = config
        self.is_config_valid = False

        config.check()
        self.grid = config.build_grid()
        self.hamiltonian = config.build_hamiltonian(self.grid)
        self.coupling = config.build_coupling()
        self.initial_state = config.build_initial_state(self.grid)
        self.is_config_valid = True

        pulse = self.coupling.pulse
        t_final = config.resolved_n_steps * config.dt
        if np.isfinite(pulse.tau_prime) and t_final < pulse.t_d + 2.0 * pulse.tau_prime:
            logging.warning(f"Propagation ends at t={t_final:.6g} before the pulse has passed "
                            f"(t_d + 2 tau' = {pulse.t_d + 2.0 * pulse.tau_prime:.6g}).")

        if show_preview:
            print("\n" + "=" * 60 + "\n          SIMULATION CONFIGURATION & PREVIEW\n" + "=" * 60)
            print(f"  - Scenario: {config.scenario}")
            print(f"  - Grid: [{config.r_min}, {config.r_max}) with {config.n_points} points (dr={self.grid.dr:.4g})")
            print(f"  - Potentials: m0={config.m0}, C0={config.C0}, C1={config.C1}, mass={config.mass}")
            print(f"  - Packet: centre {config.packet_center}, width {config.packet_width}, "
                  f"momentum {config.packet_momentum}")
            print(f"  - Pulse: {pulse.variant}, E0'={pulse.E0_prime}, tau'={pulse.tau_prime:.6g}, "
                  f"t_d={pulse.t_d}, omega0={pulse.omega0}, b2={pulse.b2}")
            print(f"  - Propagation: dt={config.dt}, k={config.k}, {config.resolved_n_steps} steps, "
                  f"report every {config.report_stride}")
            print("=" * 60 + "\nConfiguration set. Call execute() to start the propagation.")

    def execute(self) -> SimulationResult:
        """Propagates all orders and collects the norm-order reports.

        Raises:
            RuntimeError: If the workflow was not configured.
            PhysicsGuardError: If an order reaches an edge cell of the box.
        """
        if not self.is_config_valid:
            raise RuntimeError("Configuration is not valid. Call configure_and_preview() first.")
        logging.info("--- Step 2: Propagating the perturbative orders ---")
        config = self.config
        n_steps = config.resolved_n_steps

        # Start with every order above zero empty and record the initial norm.
        ps = PerturbativeState.initial(self.initial_state, config.k, config.dt)
        reports = [norm_orders(ps)]
        warned = False
        # Main loop: advance all orders, and at every report step check the box edges before recording.
        for n in range(1, n_steps + 1):
            ps = simple_algorithm_step(ps, self.hamiltonian, self.coupling)
            if n % config.report_stride == 0 or n == n_steps:
                try:
                    near = check_boundary(ps)
                except PhysicsGuardError:
                    logging.error(f"Boundary guard tripped at step {n} of {n_steps}.")
                    raise
                if near and not warned:
                    logging.warning(f"Wave packet approaches the box edges at t={ps.time:.6g}.")
                    warned = True
                reports.append(norm_orders(ps))

        # Collect the reports into one table and summarize the norm history.
        frame = reports_to_dataframe(reports)
        summary = {
            'final_norm': float(frame['total_norm'].iloc[-1]),
            'min_norm': float(frame['total_norm'].min()),
            'max_norm': float(frame['total_norm'].max()),
            'divergence_onset': divergence_onset(frame, config.onset_threshold),
            'n_steps': n_steps,
        }
        logging.info(f"Propagation finished: final norm {summary['final_norm']:.12g}, "
                     f"onset {summary['divergence_onset']:.6g}.")
        return SimulationResult(config, frame, summary)
