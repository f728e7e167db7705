import numpy as np
import pytest

from optomech.physics import MeasurementConfig, OptomechSystem

REFERENCE_EFFICIENCY = 0.02
REFERENCE_TEMPERATURE = 0.04
TOP_POWER = 7.8e-9


@pytest.fixture
def reference_system() -> OptomechSystem:
    return OptomechSystem.reference_device()


@pytest.fixture
def weak_config() -> MeasurementConfig:
    """10 fW drive on a coarse linear grid: thermal motion dominates the peak."""
    return MeasurementConfig(
        power=1e-14, efficiency=REFERENCE_EFFICIENCY, temperature=REFERENCE_TEMPERATURE, n_bins=1024
    )


@pytest.fixture
def log_grid_config() -> MeasurementConfig:
    """Log-spaced grid reaching +-500 kHz, wide enough to resolve the floor at 7.8 nW."""
    return MeasurementConfig(
        efficiency=REFERENCE_EFFICIENCY,
        temperature=REFERENCE_TEMPERATURE,
        freq_start=8.857e6,
        freq_stop=9.857e6,
        n_bins=2001,
        spacing="log",
    )


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240917)
