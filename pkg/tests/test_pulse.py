import numpy as np
import pytest

from pytdpt.errors import ConfigurationError, DomainError
from pytdpt.pulse import (
    LaserPulse, envelope_energy, envelope_energy_series, field_at, field_energy, field_energy_series,
    phase_and_envelope,
)

TAU = 413.0


def test_chirp_free_pulse_keeps_its_parameters():
    pulse = LaserPulse.chirped(1.19e-2, 4 * np.log(2) / TAU ** 2, t_d=4000.0, omega0=0.47)
    assert pulse.E0_mod == pytest.approx(1.19e-2, rel=1e-15)
    assert pulse.beta == pytest.approx(pulse.beta_prime, rel=1e-15)
    assert pulse.a2 == 0.0
    assert pulse.tau_prime == pytest.approx(TAU, rel=1e-12)


@pytest.mark.parametrize("b2", [1e3, 5e4, -2e4])
def test_chirp_stretches_at_constant_energy(b2):
    ref = LaserPulse.from_fwhm(1.19e-2, TAU)
    chirped = LaserPulse.from_fwhm(1.19e-2, TAU, b2=b2)
    assert chirped.variant == 'chirped'
    assert chirped.E0_mod < ref.E0_mod
    assert chirped.beta < ref.beta
    # Integral of the squared envelope is E0^2 sqrt(pi / (2 beta)).
    assert chirped.E0_mod ** 2 / np.sqrt(chirped.beta) == pytest.approx(ref.E0_mod ** 2 / np.sqrt(ref.beta), rel=1e-12)
    assert np.sign(chirped.a2) == np.sign(b2)


def test_chirp_free_pulse_with_negative_strength_is_the_unchirped_pulse():
    beta_prime = 4 * np.log(2) / TAU ** 2
    chirped = LaserPulse.chirped(-1.19e-2, beta_prime, t_d=1000.0, omega0=0.47, b2=0.0)
    plain = LaserPulse.unchirped(-1.19e-2, beta_prime, t_d=1000.0, omega0=0.47)
    assert chirped.E0_mod == pytest.approx(1.19e-2, rel=1e-15)
    assert chirped.amplitude == plain.amplitude == -1.19e-2
    t = np.linspace(0.0, 2000.0, 401)
    assert np.allclose(field_at(chirped, t), field_at(plain, t), rtol=0.0, atol=1e-15)
    A_c, phi_c = phase_and_envelope(chirped, t)
    A_p, phi_p = phase_and_envelope(plain, t)
    assert np.allclose(A_c, A_p, atol=1e-15) and np.allclose(phi_c, phi_p, atol=1e-12)


def test_negative_strength_flips_the_chirped_field():
    positive = LaserPulse.from_fwhm(1.19e-2, TAU, t_d=1000.0, omega0=0.47, b2=5e4)
    negative = LaserPulse.from_fwhm(-1.19e-2, TAU, t_d=1000.0, omega0=0.47, b2=5e4)
    t = np.linspace(0.0, 2000.0, 401)
    assert np.allclose(field_at(negative, t), -field_at(positive, t), rtol=0.0, atol=1e-15)


def test_field_peaks_at_t_d_and_keeps_sign():
    pulse = LaserPulse.from_fwhm(-0.02, 100.0, t_d=500.0, omega0=0.3)
    assert field_at(pulse, 500.0) == pytest.approx(-0.02, rel=1e-15)
    # FWHM of the envelope.
    half = abs(field_at(LaserPulse.from_fwhm(0.02, 100.0, t_d=500.0), 550.0))
    assert half == pytest.approx(0.01, rel=1e-12)


def test_field_is_vectorized():
    pulse = LaserPulse.from_fwhm(0.02, 100.0, t_d=50.0, omega0=0.3)
    times = np.linspace(0.0, 100.0, 11)
    values = field_at(pulse, times)
    assert values.shape == (11,)
    assert values[5] == pytest.approx(field_at(pulse, 50.0))


def test_phase_and_envelope_reproduce_the_field():
    pulse = LaserPulse.from_fwhm(-0.015, 80.0, t_d=200.0, omega0=0.5, b2=300.0)
    times = np.linspace(0.0, 400.0, 97)
    envelope, phase = phase_and_envelope(pulse, times)
    assert np.all(envelope >= 0)
    assert np.allclose(envelope * np.cos(phase), field_at(pulse, times), atol=1e-16)


def test_constant_variant_rules():
    cw = LaserPulse.constant(0.005)
    assert cw.tau_prime == np.inf
    assert field_at(cw, 1234.5) == 0.005
    with pytest.raises(ConfigurationError):
        LaserPulse('constant', 0.005, 1e-4)
    with pytest.raises(ConfigurationError):
        LaserPulse('unchirped', 0.005, 1e-4, b2=10.0)
    with pytest.raises(ConfigurationError):
        LaserPulse('unchirped', 0.005, 0.0)
    with pytest.raises(ConfigurationError):
        LaserPulse('gaussian', 0.005, 1e-4)


def test_envelope_energy_of_a_complete_pulse():
    pulse = LaserPulse.from_fwhm(1.19e-2, TAU, t_d=10 * TAU, omega0=0.47)
    expected = pulse.E0_mod ** 2 * np.sqrt(np.pi / (2 * pulse.beta))
    assert envelope_energy(pulse, 20 * TAU) == pytest.approx(expected, rel=1e-6)
    series = envelope_energy_series(pulse, np.linspace(0.0, 20 * TAU, 20001))
    assert series[0] == 0.0
    assert series[-1] == pytest.approx(expected, rel=1e-6)


def test_field_energy_of_a_static_field_is_exact():
    cw = LaserPulse.constant(0.005)
    assert field_energy(cw, 2000.0) == pytest.approx(0.005 ** 2 * 2000.0, rel=1e-12)
    assert field_energy(cw, 2000.0, dt=3.0) == pytest.approx(0.005 ** 2 * 2000.0, rel=1e-12)


def test_carrier_averages_to_one_half():
    pulse = LaserPulse.from_fwhm(0.01, 200.0, t_d=1000.0, omega0=1.0)
    assert field_energy(pulse, 2000.0) == pytest.approx(0.5 * envelope_energy(pulse, 2000.0), rel=1e-6)


def test_energies_reject_negative_time():
    pulse = LaserPulse.from_fwhm(0.01, 200.0)
    assert envelope_energy(pulse, 0.0) == 0.0
    with pytest.raises(DomainError):
        envelope_energy(pulse, -1.0)
    with pytest.raises(DomainError):
        field_energy(pulse, -1.0)


def test_field_energy_series(caplog):
    cw = LaserPulse.constant(0.005)
    series = field_energy_series(cw, np.linspace(0.0, 100.0, 11))
    assert series[-1] == pytest.approx(field_energy(cw, 100.0), rel=1e-12)
    with caplog.at_level('WARNING'):
        field_energy_series(LaserPulse.constant(0.005, omega0=1.0), np.linspace(0.0, 100.0, 11))
    assert 'aliased' in caplog.text
