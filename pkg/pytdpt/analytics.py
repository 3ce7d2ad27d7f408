# pytdpt/analytics.py
"""Analytic estimates of the norm deviation of the simple algorithm.

Stationary orders follow from the field alone: to leading order the
deviation is ``-dt * int W(t)^2 dt``, which for a slowly varying envelope
becomes ``-(mu^2 dt / 2) int A(t)^2 dt``. For Gaussian pulses the integral
is an error function. Oscillatory orders are estimated with an effective
constant coupling ``w_bar``; these estimates are order-of-magnitude only.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from scipy import integrate, optimize, special

from .constants import ERF_FORMS
from .errors import ConfigurationError, DomainError
from .oracle import xi_closed
from .pulse import (
    LaserPulse, _quadrature_nodes, envelope_energy, field_at, field_energy, phase_and_envelope,
)

ArrayLike = Union[float, np.ndarray]
LN2 = np.log(2.0)


def _energy_curve(pulse: LaserPulse, t: ArrayLike, carrier: bool) -> ArrayLike:
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise DomainError("Predictions are defined for t >= 0.")
    if t_arr.ndim == 0:
        return field_energy(pulse, float(t_arr)) if carrier else envelope_energy(pulse, float(t_arr))
    t_max = float(t_arr.max()) if t_arr.size else 0.0
    if t_max == 0.0:
        return np.zeros_like(t_arr)
    nodes = _quadrature_nodes(pulse, t_max, None, resolve_carrier=carrier)
    if carrier:
        integrand = field_at(pulse, nodes) ** 2
    else:
        integrand = phase_and_envelope(pulse, nodes)[0] ** 2
    curve = integrate.cumulative_trapezoid(integrand, nodes, initial=0.0)
    return np.interp(t_arr, nodes, curve)


def stationary_prediction(pulse: LaserPulse, mu: float, dt: float, t: ArrayLike, averaged: bool = True) -> ArrayLike:
    """Leading stationary norm deviation at time ``t``.

    Args:
        pulse (LaserPulse): The laser field.
        mu (float): Transition dipole (a.u.).
        dt (float): Time step (a.u.).
        t (float or np.ndarray): Time(s), ``t >= 0``.
        averaged (bool, optional): If True (default) the carrier is averaged
            out, ``-(mu^2 dt / 2) int_0^t A^2``; otherwise the full
            ``-mu^2 dt int_0^t E^2`` is used.
    """
    if averaged:
        return -0.5 * mu ** 2 * dt * _energy_curve(pulse, t, carrier=False)
    return -(mu ** 2) * dt * _energy_curve(pulse, t, carrier=True)


def _erf_rate(tau_prime: float, b2: float, form: str) -> float:
    if form == 'consistent':
        return np.sqrt(8.0 * LN2 * tau_prime ** 2 / (tau_prime ** 4 + (8.0 * LN2 * b2) ** 2))
    if form == 'published':
        return np.sqrt(32.0 * LN2 * tau_prime ** 2 / (tau_prime ** 4 + (16.0 * LN2 * b2) ** 2))
    raise ConfigurationError(f"Unknown erf form '{form}'. Allowed: {ERF_FORMS}.")


def stationary_prediction_chirped(mu: float, dt: float, E0_prime: float, tau_prime: float, b2: float,
                                  t_d: float, t: ArrayLike, form: str = 'consistent') -> ArrayLike:
    """Error-function form of the stationary deviation for a chirped Gaussian pulse.

    ``-mu^2 dt E0'^2 tau' sqrt(pi / (128 ln2)) [1 + erf(a (t - t_d))]``.

    The default ``form='consistent'`` takes the rate ``a`` from the width of
    the squared chirped envelope, ``a^2 = 8 ln2 tau'^2 / (tau'^4 + (8 ln2 b2)^2)``,
    which reproduces the integral of :func:`stationary_prediction`.
    ``form='published'`` uses ``a^2 = 32 ln2 tau'^2 / (tau'^4 + (16 ln2 b2)^2)``.
    """
    if tau_prime <= 0:
        raise DomainError(f"tau_prime must be positive, got {tau_prime}.")
    rate = _erf_rate(tau_prime, b2, form)
    prefactor = -(mu ** 2) * dt * E0_prime ** 2 * tau_prime * np.sqrt(np.pi / (128.0 * LN2))
    value = prefactor * (1.0 + special.erf(rate * (np.asarray(t, dtype=float) - t_d)))
    if np.ndim(t) == 0:
        return float(value)
    return value


def stationary_asymptote(mu: float, dt: float, E0_prime: float, tau_prime: float) -> float:
    """Long-time limit of the stationary deviation; independent of the chirp."""
    if tau_prime <= 0:
        raise DomainError(f"tau_prime must be positive, got {tau_prime}.")
    return float(-(mu ** 2) * dt * E0_prime ** 2 * tau_prime * np.sqrt(np.pi / (32.0 * LN2)))


def oscillatory_prediction(t: ArrayLike, m: int, k: int, w_bar: float) -> ArrayLike:
    """Signed estimate ``xi(m, k) (t w_bar)^2m`` of the oscillatory order ``N_2m``.

    Raises:
        DomainError: Outside the window ``k < 2m <= 2k``.
    """
    xi = float(xi_closed(m, k))
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return xi * (t * w_bar) ** (2 * m)


def stationary_order_estimate(t: ArrayLike, m: int, dt: float, w_bar: float) -> ArrayLike:
    """Leading estimate ``(-1)^m t^m / m! dt^m w_bar^2m`` of the stationary order ``N_2m``."""
    if m < 1:
        raise DomainError(f"m must be positive, got {m}.")
    t = np.asarray(t, dtype=float) if np.ndim(t) else float(t)
    return (-1) ** m * t ** m / math.factorial(m) * dt ** m * w_bar ** (2 * m)


def fwhm_window(pulse: LaserPulse) -> Tuple[float, float]:
    """Interval around ``t_d`` where the field envelope exceeds half its peak."""
    if pulse.beta == 0.0:
        raise ConfigurationError("A continuous-wave field has no FWHM window; pass an explicit window.")
    half = np.sqrt(LN2 / pulse.beta)
    return pulse.t_d - half, pulse.t_d + half


def estimate_w_bar(pulse: LaserPulse, mu: float, window: Optional[Tuple[float, float]] = None) -> float:
    """Root mean square of ``mu E(t)`` over ``window`` (the FWHM window by default)."""
    if window is None:
        window = fwhm_window(pulse)
    start, stop = map(float, window)
    if stop <= start:
        raise ConfigurationError(f"Empty averaging window ({start}, {stop}).")
    omega_max = abs(pulse.omega0) + abs(pulse.a2) * max(abs(start - pulse.t_d), abs(stop - pulse.t_d))
    periods = omega_max * (stop - start) / (2.0 * np.pi)
    nodes = np.linspace(start, stop, max(4001, int(64 * periods) + 1))
    mean_square = integrate.trapezoid(field_at(pulse, nodes) ** 2, nodes) / (stop - start)
    w_bar = abs(mu) * np.sqrt(mean_square)
    if w_bar == 0.0:
        logging.warning("Field vanishes over the averaging window; w_bar is 0.")
    return float(w_bar)


def predicted_divergence_onset(k: int, w_bar: float, threshold: float = 0.1, t_max: float = 1e6,
                               n_samples: int = 4000) -> float:
    """First time where the summed oscillatory estimates exceed ``threshold``.

    The estimate uses ``w_bar`` as a constant coupling from ``t = 0``; it
    returns ``inf`` if the threshold is not reached before ``t_max``.
    """
    if k < 1 or w_bar == 0.0:
        return np.inf
    orders = [m for m in range(1, k + 1) if k < 2 * m]

    def excess(t):
        return sum(oscillatory_prediction(t, m, k, w_bar) for m in orders) - threshold

    times = np.linspace(0.0, t_max, n_samples + 1)
    values = excess(times)
    hits = np.flatnonzero(values > 0)
    if len(hits) == 0:
        return np.inf
    i = hits[0]
    if i == 0:
        return 0.0
    return float(optimize.brentq(excess, times[i - 1], times[i]))


@dataclass
class OscillatoryTerm:
    m: int
    sign: int
    magnitude: Callable[[ArrayLike], ArrayLike]

    def value(self, t: ArrayLike) -> ArrayLike:
        return self.sign * self.magnitude(t)


@dataclass
class PredictionSet:
    """Analytic predictions for one parameter point.

    Attributes:
        k (int): Perturbation order.
        dt (float): Time step (a.u.).
        stationary_leading (Callable): Leading stationary deviation as a function of t.
        stationary_asymptote (float): Its long-time limit (NaN for a continuous wave).
        oscillatory_terms (List[OscillatoryTerm]): One term per oscillatory order.
        w_bar (float): Effective coupling used by the oscillatory terms.
    """
    k: int
    dt: float
    stationary_leading: Callable[[ArrayLike], ArrayLike]
    stationary_asymptote: float
    oscillatory_terms: List[OscillatoryTerm] = field(default_factory=list)
    w_bar: float = 0.0

    def oscillatory_sum(self, t: ArrayLike) -> ArrayLike:
        return sum((term.value(t) for term in self.oscillatory_terms), 0.0 * np.asarray(t, dtype=float))


def build_prediction_set(pulse: LaserPulse, mu: float, dt: float, k: int, w_bar: Optional[float] = None,
                         erf_form: str = 'consistent', window: Optional[Tuple[float, float]] = None) -> PredictionSet:
    """Collects the stationary and oscillatory predictions for a pulse.

    Gaussian pulses use the error-function form for the stationary part; a
    continuous wave uses the carrier-resolved integral.
    """
    if w_bar is None:
        w_bar = estimate_w_bar(pulse, mu, window)

    if pulse.variant == 'constant':
        def leading(t):
            return stationary_prediction(pulse, mu, dt, t, averaged=False)
        asymptote = np.nan
    else:
        def leading(t):
            return stationary_prediction_chirped(mu, dt, pulse.E0_prime, pulse.tau_prime, pulse.b2,
                                                 pulse.t_d, t, form=erf_form)
        asymptote = stationary_asymptote(mu, dt, pulse.E0_prime, pulse.tau_prime)

    terms = []
    for m in range(1, k + 1):
        if k < 2 * m:
            xi = float(xi_closed(m, k))
            terms.append(OscillatoryTerm(m, (-1) ** (k - m),
                                         lambda t, xi=abs(xi), m=m: xi * (np.asarray(t, dtype=float) * w_bar) ** (2 * m)))
    return PredictionSet(k, dt, leading, asymptote, terms, w_bar)


def prediction_table(predictions: PredictionSet, times: np.ndarray) -> pd.DataFrame:
    """Evaluates a prediction set on a time grid.

    Columns are ``t``, ``stationary_leading``, ``stationary_asymptote``, one
    ``oscillatory_estimate_N_2m`` per oscillatory order, ``oscillatory_sum``
    and ``w_bar``.
    """
    times = np.asarray(times, dtype=float)
    table = pd.DataFrame({'t': times})
    table['stationary_leading'] = predictions.stationary_leading(times)
    table['stationary_asymptote'] = predictions.stationary_asymptote
    for term in predictions.oscillatory_terms:
        table[f'oscillatory_estimate_N_{2 * term.m}'] = term.value(times)
    table['oscillatory_sum'] = predictions.oscillatory_sum(times)
    table['w_bar'] = predictions.w_bar
    return table
