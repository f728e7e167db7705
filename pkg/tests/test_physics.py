import math

import numpy as np
import pytest
from scipy import integrate

from optomech.errors import ConfigError, GridError, UnitMismatchError
from optomech.physics import (
    MeasurementConfig,
    OptomechSystem,
    added_noise,
    displacement_psd,
    displacement_spectrum,
    displacement_to_phase,
    force_sensitivity,
    frequency_grid,
    group_delay,
    lorentzian,
    n_backaction,
    n_thermal,
    optimum_power,
    p_sql,
    peak_height,
    phase_to_displacement,
    photon_flux,
    s_zp,
    transduction,
    x_zp,
)
from optomech.physics.constants import PHYSICAL_CONSTANTS
from optomech.spectrum import SpectrumUnit

from .conftest import REFERENCE_EFFICIENCY, REFERENCE_TEMPERATURE, TOP_POWER


def test_p_sql_matches_reference_device(reference_system):
    assert p_sql(reference_system) == pytest.approx(91.4e-15, rel=0.05)


def test_zero_point_motion_and_occupancy(reference_system):
    assert x_zp(reference_system) == pytest.approx(3.3e-15, rel=0.02)
    assert n_thermal(reference_system, REFERENCE_TEMPERATURE) == pytest.approx(90, abs=2)


def test_zero_point_spectral_density(reference_system):
    assert s_zp(reference_system) == pytest.approx(2.75e-31, rel=0.05)


def test_optimum_power_balances_added_noise(reference_system):
    p_opt = optimum_power(reference_system, REFERENCE_EFFICIENCY)
    assert p_opt == pytest.approx(600e-15, rel=0.10)
    s_imp, s_ba = added_noise(reference_system, p_opt, REFERENCE_EFFICIENCY)
    assert s_imp / s_zp(reference_system) == pytest.approx(3.6, rel=0.10)
    assert s_ba / s_zp(reference_system) == pytest.approx(3.6, rel=0.10)
    assert s_imp == pytest.approx(s_ba, rel=1e-12)


def test_top_power_imprecision_and_backaction(reference_system):
    s_imp, _ = added_noise(reference_system, TOP_POWER, REFERENCE_EFFICIENCY)
    assert s_imp == pytest.approx(8.8e-35, rel=0.10)
    assert n_backaction(reference_system, TOP_POWER) == pytest.approx(2.2e4, rel=0.10)


def test_force_sensitivity_at_optimum_power(reference_system):
    config = MeasurementConfig(
        power=optimum_power(reference_system, REFERENCE_EFFICIENCY),
        efficiency=REFERENCE_EFFICIENCY,
        temperature=REFERENCE_TEMPERATURE,
    )
    assert force_sensitivity(reference_system, config) == pytest.approx(5.5e-18, rel=0.10)


def test_force_sensitivity_without_drive_is_unbounded(reference_system):
    assert force_sensitivity(reference_system, MeasurementConfig(power=0.0)) == math.inf


def test_photon_flux_at_top_power(reference_system):
    assert photon_flux(reference_system, TOP_POWER) == pytest.approx(1.75e15, rel=0.02)


def _random_system(rng) -> OptomechSystem:
    return OptomechSystem(
        cavity_freq=rng.uniform(1e9, 1e10),
        cavity_linewidth=rng.uniform(1e5, 1e7),
        mech_freq=rng.uniform(1e5, 1e7),
        mech_linewidth=rng.uniform(1.0, 100.0),
        coupling=rng.uniform(10.0, 1000.0),
        mass=10 ** rng.uniform(-16, -12),
    )


def test_added_noise_respects_the_quantum_limit(rng):
    for _ in range(1000):
        system = _random_system(rng)
        sql = p_sql(system)
        power = sql * 10 ** rng.uniform(-3, 3)
        zp = s_zp(system)

        s_imp, s_ba = added_noise(system, power)
        assert s_imp + s_ba >= zp * (1 - 1e-12)

        mirrored_imp, mirrored_ba = added_noise(system, sql**2 / power)
        assert mirrored_imp + mirrored_ba == pytest.approx(s_imp + s_ba, rel=1e-10)

        eta = rng.uniform(0.01, 1.0)
        lossy_imp, lossy_ba = added_noise(system, power, eta)
        assert lossy_imp * lossy_ba == pytest.approx((zp / 2) ** 2 / eta, rel=1e-12)

        at_sql = sum(added_noise(system, sql))
        assert at_sql == pytest.approx(zp, rel=1e-10)


def test_optimum_power_minimises_the_added_noise(reference_system):
    p_opt = optimum_power(reference_system, REFERENCE_EFFICIENCY)
    powers = np.geomspace(p_opt / 10, p_opt * 10, 20001)
    added = [sum(added_noise(reference_system, p, REFERENCE_EFFICIENCY)) for p in powers]
    best = powers[int(np.argmin(added))]
    assert best == pytest.approx(p_opt, rel=1e-3)


def test_added_noise_needs_a_drive(reference_system):
    with pytest.raises(ConfigError):
        added_noise(reference_system, 0.0)
    with pytest.raises(ConfigError):
        added_noise(reference_system, 1e-12, efficiency=1.5)


def test_thermal_occupancy_limits(reference_system):
    assert n_thermal(reference_system, 1e-6) < 1e-150
    # exp(hbar Omega / k T) overflows to inf
    assert n_thermal(reference_system, 1e-9) == 0.0
    hot = n_thermal(reference_system, 300.0)
    classical = 300.0 * 1.380649e-23 / (1.054571817e-34 * reference_system.omega_m)
    assert hot == pytest.approx(classical, rel=1e-3)
    with pytest.raises(ConfigError):
        n_thermal(reference_system, 0.0)


def test_thermal_occupancy_high_temperature_limit(reference_system):
    temperatures = np.array([0.01, 0.1, 1.0, 300.0])
    quantum = PHYSICAL_CONSTANTS.hbar * reference_system.omega_m
    ratios = quantum / (PHYSICAL_CONSTANTS.k_b * temperatures)
    assert np.all(ratios < 0.05)
    occupancies = np.array([n_thermal(reference_system, t) for t in temperatures])
    assert np.all(np.diff(occupancies) > 0)
    assert np.all(np.abs(occupancies - (1 / ratios - 0.5)) < 0.01)


def test_system_validation(reference_system):
    with pytest.raises(ConfigError):
        OptomechSystem(6.7e9, 1e7, 9.357e6, -1.0, 230.0, 85e-15)
    with pytest.raises(ConfigError):
        OptomechSystem(6.7e9, 1e7, 10.0, 20.0, 230.0, 85e-15)
    uncoupled = reference_system.with_coupling(None)
    with pytest.raises(ConfigError):
        uncoupled.g0
    assert x_zp(uncoupled) == x_zp(reference_system)


def test_lorentzian_shape():
    assert lorentzian(5.0, 5.0, 2.0) == 1.0
    assert lorentzian([4.0, 6.0], 5.0, 2.0) == pytest.approx([0.5, 0.5])


def test_displacement_psd_at_resonance(reference_system):
    config = MeasurementConfig(power=1e-12, efficiency=REFERENCE_EFFICIENCY)
    s_imp, _ = added_noise(reference_system, 1e-12, REFERENCE_EFFICIENCY)
    on_resonance = displacement_psd(reference_system, config, reference_system.mech_freq)
    assert on_resonance == pytest.approx(s_imp + peak_height(reference_system, config), rel=1e-14)


def test_peak_area_matches_its_height_and_width(reference_system):
    half_span = 200 * reference_system.mech_linewidth
    config = MeasurementConfig(
        power=1e-12,
        efficiency=REFERENCE_EFFICIENCY,
        freq_start=reference_system.mech_freq - half_span,
        freq_stop=reference_system.mech_freq + half_span,
        n_bins=40001,
    )
    spec = displacement_spectrum(reference_system, config)
    s_imp, _ = added_noise(reference_system, 1e-12, REFERENCE_EFFICIENCY)
    area = integrate.trapezoid(spec.values - s_imp, spec.freqs)
    height = peak_height(reference_system, config)
    expected = 0.5 * math.pi * reference_system.mech_linewidth * height
    assert area == pytest.approx(expected, rel=0.005)


def test_injected_linewidth_keeps_the_peak_height(reference_system):
    config = MeasurementConfig(power=1e-12, injected_linewidth=2 * reference_system.mech_linewidth)
    base = MeasurementConfig(power=1e-12)
    f = reference_system.mech_freq + reference_system.mech_linewidth
    assert displacement_psd(reference_system, config, reference_system.mech_freq) == pytest.approx(
        displacement_psd(reference_system, base, reference_system.mech_freq)
    )
    assert displacement_psd(reference_system, config, f) > displacement_psd(
        reference_system, base, f
    )


def test_linear_grid_defaults_to_fifty_linewidths(reference_system):
    freqs = frequency_grid(reference_system, MeasurementConfig(n_bins=101))
    assert len(freqs) == 101
    half_span = 50 * reference_system.mech_linewidth
    assert freqs[0] == pytest.approx(reference_system.mech_freq - half_span)
    assert freqs[-1] == pytest.approx(reference_system.mech_freq + half_span)


def test_log_grid_is_centered_and_increasing(reference_system, log_grid_config):
    freqs = frequency_grid(reference_system, log_grid_config)
    assert len(freqs) == 2001
    assert np.all(np.diff(freqs) > 0)
    assert freqs[1000] == reference_system.mech_freq
    assert freqs[0] == pytest.approx(8.857e6)
    assert freqs[-1] == pytest.approx(9.857e6)


def test_short_log_grid_reaches_its_edges(reference_system):
    config = MeasurementConfig(freq_start=9.3e6, freq_stop=9.4e6, n_bins=5, spacing="log")
    freqs = frequency_grid(reference_system, config)
    assert freqs[2] == reference_system.mech_freq
    assert freqs[0] == pytest.approx(9.3e6)
    assert freqs[-1] == pytest.approx(9.4e6)


@pytest.mark.parametrize(
    "kwargs",
    [
        {"n_bins": 1},
        {"freq_start": 9.36e6, "freq_stop": 9.37e6},
        {"freq_start": -1.0, "freq_stop": 9.4e6},
        {"n_bins": 2, "spacing": "log"},
        {"n_bins": 3, "spacing": "log"},
        {"n_bins": 4, "spacing": "log"},
    ],
)
def test_unusable_grids_are_rejected(reference_system, kwargs):
    with pytest.raises(GridError):
        frequency_grid(reference_system, MeasurementConfig(**kwargs))


def test_displacement_spectrum_is_noise_free(reference_system):
    spec = displacement_spectrum(reference_system, MeasurementConfig(power=1e-12, n_avg=20))
    assert spec.unit == SpectrumUnit.DISPLACEMENT
    assert spec.n_avg == 20
    assert spec.is_noise_free


def test_phase_conversion_is_inverse(reference_system):
    spec = displacement_spectrum(reference_system, MeasurementConfig(power=1e-12, n_bins=64))
    phase = displacement_to_phase(reference_system, spec)
    assert phase.unit == SpectrumUnit.PHASE
    back = phase_to_displacement(reference_system, phase)
    np.testing.assert_allclose(back.values, spec.values, rtol=1e-14)
    expected = 2.0 * transduction(reference_system)
    assert phase_to_displacement(reference_system, 2.0) == pytest.approx(expected)
    with pytest.raises(UnitMismatchError):
        phase_to_displacement(reference_system, spec)


def test_group_delay_peaks_at_cavity_resonance(reference_system):
    assert group_delay(reference_system, reference_system.cavity_freq) == pytest.approx(
        4.0 / reference_system.kappa
    )
    half = reference_system.cavity_freq + reference_system.cavity_linewidth / 2
    assert group_delay(reference_system, half) == pytest.approx(2.0 / reference_system.kappa)


def test_measurement_config_validation():
    with pytest.raises(ConfigError):
        MeasurementConfig(power=-1.0)
    with pytest.raises(ConfigError):
        MeasurementConfig(efficiency=0.0)
    with pytest.raises(ConfigError):
        MeasurementConfig(n_avg=0)
    with pytest.raises(ConfigError):
        MeasurementConfig(spacing="cubic")
