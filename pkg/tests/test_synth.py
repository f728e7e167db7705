import numpy as np
import pytest

from optomech.errors import GridError
from optomech.physics import MeasurementConfig, displacement_spectrum, group_delay, transduction
from optomech.spectrum import SpectrumUnit
from optomech.synth import (
    SynthRequest,
    apply_periodogram_noise,
    bin_generator,
    gamma_factors,
    model_spectrum,
    relative_bin_sd,
    synthesize,
    synthesize_group_delay,
)


def test_bin_draws_do_not_depend_on_grid_size():
    short = gamma_factors(11, 16, 500)
    long = gamma_factors(11, 256, 500)
    np.testing.assert_array_equal(short, long[:16])


def test_bin_generators_are_keyed_by_seed_and_index():
    a = bin_generator(5, 0).standard_normal()
    assert a == bin_generator(5, 0).standard_normal()
    assert a != bin_generator(5, 1).standard_normal()
    assert a != bin_generator(6, 0).standard_normal()


def test_gamma_factor_moments():
    n_avg = 10
    factors = gamma_factors(3, 4096, n_avg)
    assert factors.mean() == pytest.approx(1.0, abs=0.02)
    assert factors.var() == pytest.approx(relative_bin_sd(n_avg) ** 2, rel=0.12)


@pytest.mark.parametrize("n_avg", [1, 10, 100])
def test_bin_statistics_across_seeds(reference_system, weak_config, n_avg):
    config = MeasurementConfig(**{**weak_config.to_dict(), "n_avg": n_avg})
    model = model_spectrum(SynthRequest(reference_system, config, seed=0)).values
    k = 300
    n_seeds = 100_000
    draws = [bin_generator(seed, k).standard_gamma(n_avg) for seed in range(n_seeds)]
    ratios = np.array(draws) / n_avg
    for seed in range(3):
        spec = synthesize(SynthRequest(reference_system, config, seed=seed))
        assert spec.values[k] == pytest.approx(model[k] * ratios[seed], rel=1e-12)
    samples = model[k] * ratios
    standard_error = model[k] * relative_bin_sd(n_avg) / np.sqrt(n_seeds)
    assert abs(samples.mean() - model[k]) < 3 * standard_error
    assert ratios.var(ddof=1) == pytest.approx(1 / n_avg, rel=0.05)


def test_relative_bin_sd():
    assert relative_bin_sd(100) == pytest.approx(0.1)
    with pytest.raises(ValueError):
        relative_bin_sd(0)


def test_synthesize_is_deterministic(reference_system, weak_config):
    request = SynthRequest(reference_system, weak_config, seed=42)
    first = synthesize(request)
    second = synthesize(request)
    np.testing.assert_array_equal(first.values, second.values)
    assert first.seed == 42
    other = synthesize(SynthRequest(reference_system, weak_config, seed=43))
    assert not np.array_equal(first.values, other.values)


def test_noise_scales_with_the_model(reference_system, weak_config):
    model = displacement_spectrum(reference_system, weak_config)
    noisy = apply_periodogram_noise(model, 9)
    scaled = apply_periodogram_noise(model.scaled(4.0), 9)
    np.testing.assert_array_equal(scaled.values, 4.0 * noisy.values)


def test_averaging_concentrates_around_the_model(reference_system, weak_config):
    config = MeasurementConfig(**{**weak_config.to_dict(), "n_avg": 10**6})
    request = SynthRequest(reference_system, config, seed=1)
    ratio = synthesize(request).values / model_spectrum(request).values
    assert np.abs(ratio - 1).max() < 6 * relative_bin_sd(10**6)


def test_series_seeds_are_xor_of_index(reference_system, weak_config):
    request = SynthRequest.create(reference_system, weak_config, seed=0b1010, index=3)
    assert request.seed == 0b1001


def test_phase_unit_synthesis(reference_system, weak_config):
    request = SynthRequest(reference_system, weak_config, seed=4, unit=SpectrumUnit.PHASE)
    spec = synthesize(request)
    assert spec.unit == SpectrumUnit.PHASE
    displacement = synthesize(SynthRequest(reference_system, weak_config, seed=4))
    expected = displacement.values / transduction(reference_system)
    np.testing.assert_allclose(spec.values, expected, rtol=1e-12)


def test_narrow_grids_are_rejected(reference_system):
    f_m, gamma = reference_system.mech_freq, reference_system.mech_linewidth
    config = MeasurementConfig(power=1e-12, freq_start=f_m - 5 * gamma, freq_stop=f_m + 5 * gamma)
    with pytest.raises(GridError):
        SynthRequest(reference_system, config, seed=0)


def test_group_delay_noise(reference_system):
    freqs = np.linspace(6.7e9, 6.714e9, 512)
    clean = synthesize_group_delay(reference_system, freqs, 0.0, seed=1)
    np.testing.assert_array_equal(clean, group_delay(reference_system, freqs))
    noisy = synthesize_group_delay(reference_system, freqs, 0.01, seed=1)
    sd = np.std((noisy - clean) * reference_system.kappa / 4.0)
    assert sd == pytest.approx(0.01, rel=0.15)
