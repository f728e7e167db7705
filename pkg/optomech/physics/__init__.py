from .constants import PHYSICAL_CONSTANTS, PhysicalConstants
from .noise import (
    NoiseBudget,
    added_noise,
    force_susceptibility,
    n_backaction,
    n_thermal,
    optimum_power,
    p_sql,
    photon_flux,
    s_zp,
    x_zp,
)
from .spectra import (
    displacement_psd,
    displacement_spectrum,
    displacement_to_phase,
    force_sensitivity,
    group_delay,
    lorentzian,
    peak_height,
    phase_to_displacement,
    transduction,
)
from .system import MeasurementConfig, OptomechSystem, frequency_grid, mechanical_linewidth
