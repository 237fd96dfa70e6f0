"""Microwave pi-pulse design, Rabi dynamics, and the step-II scattering
integral."""
import math

import numpy as np
import pytest

from mottreg.errors import PhysicsDomainError
from mottreg.pulse import (GaussianPulse, design_pi_pulse, pi_pulse_amplitude,
                           rabi_evolve, step2_scattering_probability)
from mottreg.units import RB87, UnitSystem


def test_pi_pulse_amplitude_reference_value():
    omega0 = 13.0
    amp = pi_pulse_amplitude(omega0, 5.0 / omega0)
    assert amp == pytest.approx(23.0, rel=5e-3)
    # within 1% of the infinite-cutoff Gaussian integral
    assert amp == pytest.approx(math.sqrt(math.pi) * omega0, rel=1e-2)


def test_pi_pulse_amplitude_infinite_cutoff_limit():
    # oracle: closed-form Gaussian integral; erf(12) = 1 to machine precision
    omega0 = 13.0
    amp = pi_pulse_amplitude(omega0, 12.0 / omega0)
    assert amp == pytest.approx(math.sqrt(math.pi) * omega0, rel=1e-12)


def test_pi_pulse_amplitude_scaling():
    omega0 = 13.0
    base = pi_pulse_amplitude(omega0, 5.0 / omega0)
    scaled = pi_pulse_amplitude(2 * omega0, 2.5 / omega0)
    assert scaled == pytest.approx(2 * base, rel=1e-12)


def test_pulse_cutoff_validation():
    with pytest.raises(PhysicsDomainError):
        GaussianPulse(peak_rabi=23.0, envelope_width=13.0, cutoff=0.1)
    with pytest.raises(PhysicsDomainError):
        pi_pulse_amplitude(13.0, 0.1)


def test_resonant_pulse_inverts():
    outcome = rabi_evolve(design_pi_pulse(52.0, detuning=0.0))
    assert outcome.p_flip >= 1.0 - 1e-6
    assert outcome.p_flip + outcome.p_stay == pytest.approx(1.0, abs=1e-10)


def test_detuned_flip_error_near_reference_value():
    outcome = rabi_evolve(design_pi_pulse(52.0, detuning=52.0))
    assert 0.5 * 5.9e-6 <= outcome.p_flip <= 2.0 * 5.9e-6


def test_far_detuned_flip_error_negligible():
    pulse = design_pi_pulse(52.0, detuning=13_000.0)
    outcome = rabi_evolve(pulse, rel_tol=1e-8, abs_tol=1e-10)
    assert outcome.p_flip < 1e-10


def test_norm_conservation_along_trajectory():
    rel_tol = 1e-11
    outcome = rabi_evolve(design_pi_pulse(52.0, detuning=52.0), rel_tol=rel_tol)
    states = outcome.trajectory.states
    norms = np.abs(states[:, 0]) ** 2 + np.abs(states[:, 1]) ** 2
    assert np.max(np.abs(norms - 1.0)) < 10 * rel_tol * outcome.trajectory.n_steps


def test_flip_probability_even_in_detuning():
    plus = rabi_evolve(design_pi_pulse(52.0, detuning=52.0)).p_flip
    minus = rabi_evolve(design_pi_pulse(52.0, detuning=-52.0)).p_flip
    assert plus == pytest.approx(minus, rel=1e-9)


def test_flip_probability_monotone_beyond_twice_width():
    # grid between 2 omega_0 and the operating point 4 omega_0
    flips = [rabi_evolve(design_pi_pulse(52.0, detuning=d)).p_flip
             for d in (26.0, 32.0, 39.0, 45.0, 52.0)]
    assert all(a > b for a, b in zip(flips, flips[1:]))


def test_step2_scattering_zero_intensity():
    assert step2_scattering_probability(lambda t: 0.0, RB87, 787.6e-9, 1e-4) == 0.0
    assert step2_scattering_probability(lambda t: 1e6, RB87, 787.6e-9, 0.0) == 0.0


def test_step2_scattering_linear_in_duration():
    p1 = step2_scattering_probability(lambda t: 2.8e6, RB87, 787.6e-9, 50e-6)
    p2 = step2_scattering_probability(lambda t: 2.8e6, RB87, 787.6e-9, 100e-6)
    assert p2 == pytest.approx(2 * p1, rel=1e-9)


def test_step2_scattering_over_operating_timeline():
    # ramp up + pulse hold + ramp down at the delta = 52 E_R intensity
    from mottreg.superlattice import SuperlatticeConfig, lpol_ramp_time, \
        solve_intensity_for_delta

    base = SuperlatticeConfig()
    intensity = solve_intensity_for_delta(base, RB87, 52.0)
    cfg = SuperlatticeConfig(lpol_intensity=intensity)
    ramp = lpol_ramp_time(cfg, RB87, 1e-4)
    units = UnitSystem.for_lattice(RB87, 850e-9)
    hold = units.time_from_natural(10.0 / 13.0)
    duration = 2 * ramp.duration + hold

    def schedule(t):
        if t <= ramp.duration:
            return intensity * ramp.intensity_fraction(t)
        if t <= ramp.duration + hold:
            return intensity
        return intensity * ramp.intensity_fraction(duration - t)

    p = step2_scattering_probability(schedule, RB87, 787.6e-9, duration)
    assert 0.5e-4 <= p <= 2e-4


def test_pulse_duration_matches_si_conversion():
    # 2 t_f at omega_0 = 13 E_R/hbar converts to the quoted 38.6 us window
    units = UnitSystem.for_lattice(RB87, 850e-9)
    t_f = 5.0 / 13.0
    assert units.time_from_natural(2 * t_f) * 1e6 == pytest.approx(38.6, rel=5e-3)
