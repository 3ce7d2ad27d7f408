# pytdpt/pulse.py
"""Laser fields E(t): unchirped and linearly chirped Gaussian pulses.

A chirped pulse is parametrized by the field strength ``E0_prime`` and the
inverse-time-squared width ``beta_prime`` of the transform-limited pulse,
together with the spectral chirp ``b2``. Stretching keeps the pulse energy:

    E0_mod = (1 + 4 beta'^2 b2^2)^(-1/4) |E0'|
    beta   = 1 / (1/beta' + 4 beta' b2^2)
    a2     = b2 / (1/(4 beta'^2) + b2^2)

and the field reads

    E(t) = E0_mod exp(-beta (t - t_d)^2) cos[omega0 (t - t_d) + a2/2 (t - t_d)^2].

The constant phase of the complex chirped amplitude is not carried; the
field takes the sign of ``E0'`` for every variant.
"""

import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

import numpy as np
from scipy import integrate

from .constants import PULSE_VARIANTS
from .errors import ConfigurationError, DomainError

ArrayLike = Union[float, np.ndarray]

# Quadrature resolution used when no time step is supplied.
_NODES_PER_WIDTH = 40
_NODES_PER_PERIOD = 32
_MIN_NODES = 2001


@dataclass(frozen=True)
class LaserPulse:
    """Parameters of a Gaussian (or continuous-wave) laser pulse.

    Attributes:
        variant (str): One of 'unchirped', 'chirped' or 'constant'.
        E0_prime (float): Peak field strength of the unchirped pulse (a.u.).
        beta_prime (float): Gaussian width parameter of the unchirped pulse
            (a.u.); 0 for the constant variant.
        t_d (float): Time of the pulse maximum (a.u.).
        omega0 (float): Carrier angular frequency (a.u.).
        b2 (float): Spectral chirp (a.u.); 0 unless the variant is 'chirped'.

    The derived quantities ``E0_mod``, ``beta``, ``a2`` and ``tau_prime``
    are filled in on construction.
    """
    variant: str
    E0_prime: float
    beta_prime: float
    t_d: float = 0.0
    omega0: float = 0.0
    b2: float = 0.0
    E0_mod: float = field(init=False)
    beta: float = field(init=False)
    a2: float = field(init=False)
    tau_prime: float = field(init=False)

    def __post_init__(self):
        if self.variant not in PULSE_VARIANTS:
            raise ConfigurationError(f"Unknown pulse variant '{self.variant}'. Allowed: {PULSE_VARIANTS}.")
        if self.beta_prime < 0:
            raise ConfigurationError(f"beta_prime must not be negative, got {self.beta_prime}.")
        if self.variant != 'chirped' and self.b2 != 0.0:
            raise ConfigurationError(f"A non-zero chirp b2={self.b2} requires the 'chirped' variant.")

        if self.variant == 'constant':
            if self.beta_prime != 0.0:
                raise ConfigurationError("The 'constant' variant has no envelope; beta_prime must be 0.")
            derived = (abs(self.E0_prime), 0.0, 0.0, np.inf)
        else:
            if self.beta_prime == 0.0:
                raise ConfigurationError(f"The '{self.variant}' variant needs beta_prime > 0.")
            bp, b2 = self.beta_prime, self.b2
            e0_mod = (1.0 + 4.0 * bp ** 2 * b2 ** 2) ** -0.25 * abs(self.E0_prime)
            beta = 1.0 / (1.0 / bp + 4.0 * bp * b2 ** 2)
            a2 = b2 / (1.0 / (4.0 * bp ** 2) + b2 ** 2)
            tau_prime = np.sqrt(4.0 * np.log(2.0) / bp)
            derived = (e0_mod, beta, a2, tau_prime)

        for name, value in zip(('E0_mod', 'beta', 'a2', 'tau_prime'), derived):
            object.__setattr__(self, name, float(value))

    # --- Constructors ---

    @classmethod
    def unchirped(cls, E0_prime: float, beta_prime: float, t_d: float = 0.0, omega0: float = 0.0) -> 'LaserPulse':
        return cls('unchirped', E0_prime, beta_prime, t_d, omega0)

    @classmethod
    def chirped(cls, E0_prime: float, beta_prime: float, t_d: float = 0.0, omega0: float = 0.0,
                b2: float = 0.0) -> 'LaserPulse':
        return cls('chirped', E0_prime, beta_prime, t_d, omega0, b2)

    @classmethod
    def constant(cls, E0: float, omega0: float = 0.0, t_d: float = 0.0) -> 'LaserPulse':
        """Continuous-wave field E0 cos[omega0 (t - t_d)]."""
        return cls('constant', E0, 0.0, t_d, omega0)

    @classmethod
    def from_fwhm(cls, E0_prime: float, tau_prime: float, t_d: float = 0.0, omega0: float = 0.0,
                  b2: float = 0.0, variant: Optional[str] = None) -> 'LaserPulse':
        """Builds a pulse from the FWHM ``tau_prime`` of the unchirped envelope."""
        if tau_prime <= 0:
            raise ConfigurationError(f"tau_prime must be positive, got {tau_prime}.")
        if variant is None:
            variant = 'chirped' if b2 != 0.0 else 'unchirped'
        return cls(variant, E0_prime, 4.0 * np.log(2.0) / tau_prime ** 2, t_d, omega0, b2)

    # --- Derived helpers ---

    @property
    def amplitude(self) -> float:
        """Signed peak amplitude used in the field formula.

        ``E0_mod`` is a modulus; every variant takes the sign of ``E0_prime``,
        so a chirped pulse with ``b2 = 0`` is the unchirped pulse.
        """
        if self.variant == 'chirped':
            return float(np.copysign(self.E0_mod, self.E0_prime))
        return self.E0_prime

    @property
    def envelope_width(self) -> float:
        """Standard deviation of the squared envelope A(t)^2 (inf for CW)."""
        if self.beta == 0.0:
            return np.inf
        return 1.0 / (2.0 * np.sqrt(self.beta))


def phase_and_envelope(pulse: LaserPulse, t: ArrayLike) -> Tuple[ArrayLike, ArrayLike]:
    """Splits the field into a non-negative envelope A(t) and a phase Phi(t).

    ``A(t) * cos(Phi(t))`` reproduces :func:`field_at`. A negative amplitude
    is absorbed into the phase as a shift by pi.
    """
    tau = np.asarray(t, dtype=float) - pulse.t_d
    amp = pulse.amplitude
    envelope = abs(amp) * np.exp(-pulse.beta * tau ** 2)
    phase = pulse.omega0 * tau + 0.5 * pulse.a2 * tau ** 2
    if amp < 0:
        phase = phase + np.pi
    if np.ndim(t) == 0:
        return float(envelope), float(phase)
    return envelope, phase


def field_at(pulse: LaserPulse, t: ArrayLike) -> ArrayLike:
    """Evaluates the electric field E(t); vectorized over ``t``."""
    tau = np.asarray(t, dtype=float) - pulse.t_d
    value = pulse.amplitude * np.exp(-pulse.beta * tau ** 2) * np.cos(
        pulse.omega0 * tau + 0.5 * pulse.a2 * tau ** 2)
    if np.ndim(t) == 0:
        return float(value)
    return value


def _quadrature_nodes(pulse: LaserPulse, t: float, dt: Optional[float], resolve_carrier: bool) -> np.ndarray:
    if dt is not None:
        if dt <= 0:
            raise ConfigurationError(f"Quadrature step must be positive, got {dt}.")
        n_intervals = max(int(np.ceil(t / dt - 1e-9)), 1)
        return np.linspace(0.0, t, n_intervals + 1)

    step = t / (_MIN_NODES - 1)
    width = pulse.envelope_width
    if np.isfinite(width):
        step = min(step, width / _NODES_PER_WIDTH)
    if resolve_carrier:
        # Highest instantaneous frequency within six widths of the peak.
        span = 6.0 * width if np.isfinite(width) else abs(t - pulse.t_d) + t
        omega_max = abs(pulse.omega0) + abs(pulse.a2) * span
        if omega_max > 0:
            step = min(step, 2.0 * np.pi / omega_max / _NODES_PER_PERIOD)
    n_intervals = max(int(np.ceil(t / step)), _MIN_NODES - 1)
    return np.linspace(0.0, t, n_intervals + 1)


def envelope_energy(pulse: LaserPulse, t: float, dt: Optional[float] = None) -> float:
    """Integrates the squared envelope, ``int_0^t A(t')^2 dt'``.

    Uses the composite trapezoid rule. When ``dt`` is given the nodes are
    the simulation time grid ``0, dt, 2 dt, ...`` (the last interval is
    shortened to end at ``t``); otherwise a grid fine enough to resolve the
    envelope is chosen.
    """
    if t < 0:
        raise DomainError(f"envelope_energy is defined for t >= 0, got {t}.")
    if t == 0:
        return 0.0
    nodes = _quadrature_nodes(pulse, t, dt, resolve_carrier=False)
    envelope, _ = phase_and_envelope(pulse, nodes)
    return float(integrate.trapezoid(envelope ** 2, nodes))


def field_energy(pulse: LaserPulse, t: float, dt: Optional[float] = None) -> float:
    """Integrates the squared field, ``int_0^t E(t')^2 dt'``, carrier included."""
    if t < 0:
        raise DomainError(f"field_energy is defined for t >= 0, got {t}.")
    if t == 0:
        return 0.0
    nodes = _quadrature_nodes(pulse, t, dt, resolve_carrier=True)
    return float(integrate.trapezoid(field_at(pulse, nodes) ** 2, nodes))


def envelope_energy_series(pulse: LaserPulse, times: np.ndarray) -> np.ndarray:
    """Cumulative squared-envelope integral from ``times[0]`` on a given grid."""
    times = np.asarray(times, dtype=float)
    envelope, _ = phase_and_envelope(pulse, times)
    return integrate.cumulative_trapezoid(envelope ** 2, times, initial=0.0)


def field_energy_series(pulse: LaserPulse, times: np.ndarray) -> np.ndarray:
    """Cumulative squared-field integral from ``times[0]`` on a given grid."""
    times = np.asarray(times, dtype=float)
    if len(times) > 1 and pulse.omega0 > 0 and np.max(np.diff(times)) * pulse.omega0 > np.pi / 2:
        logging.warning("Time grid does not resolve the carrier; the field-energy series is aliased.")
    return integrate.cumulative_trapezoid(field_at(pulse, times) ** 2, times, initial=0.0)
