# Copyright 2024 The optomech Authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Noise-free spectral models and unit conversions.

The measured displacement spectrum around the mechanical resonance is modelled as

    S_x(f) = S_imp + S_zp (2 (n_th + n_ba) + 1) / (1 + 4 (f - f_m)^2 / gamma^2),

a flat imprecision floor plus the symmetrised oscillator Lorentzian of FWHM gamma (Hz).
Driven exactly on resonance, the phase spectrum is the displacement spectrum divided by
the transduction x_zp^2 (kappa^2 + 4 Omega_m^2) / (64 g0^2).
"""

import dataclasses
from typing import Union

import numpy as np

from ..errors import ConfigError, GridError
from ..spectrum import Spectrum, SpectrumUnit
from .noise import added_noise, force_susceptibility, n_backaction, n_thermal, s_zp, x_zp
from .system import MeasurementConfig, OptomechSystem, frequency_grid, mechanical_linewidth

ArrayLike = Union[float, np.ndarray]


def lorentzian(freqs: ArrayLike, center: float, linewidth: float) -> np.ndarray:
    """Unit-height Lorentzian of full width ``linewidth`` at half maximum."""
    detuning = (np.asarray(freqs, dtype=float) - center) / linewidth
    return 1.0 / (1.0 + 4.0 * detuning**2)


def peak_height(sys: OptomechSystem, config: MeasurementConfig) -> float:
    """Height of the motional Lorentzian, s_zp (2 (n_th + n_ba) + 1)."""
    n_total = n_thermal(sys, config.temperature) + n_backaction(sys, config.power)
    return s_zp(sys) * (2.0 * n_total + 1.0)


def displacement_psd(sys: OptomechSystem, config: MeasurementConfig, freqs: ArrayLike):
    """Model displacement PSD (m^2/Hz) evaluated at arbitrary frequencies."""
    if not config.power > 0:
        raise ConfigError("the displacement spectrum needs a positive drive power")
    s_imp, _ = added_noise(sys, config.power, config.efficiency)
    lineshape = lorentzian(freqs, sys.mech_freq, mechanical_linewidth(sys, config))
    return s_imp + peak_height(sys, config) * lineshape


def displacement_spectrum(sys: OptomechSystem, config: MeasurementConfig) -> Spectrum:
    """Noise-free displacement spectrum on the configured frequency grid."""
    freqs = frequency_grid(sys, config)
    if not (freqs[0] <= sys.mech_freq <= freqs[-1]):
        raise GridError("frequency grid does not contain the mechanical resonance")
    values = displacement_psd(sys, config, freqs)
    return Spectrum(freqs, values, SpectrumUnit.DISPLACEMENT, n_avg=config.n_avg)


def transduction(sys: OptomechSystem) -> float:
    """Displacement PSD per unit phase PSD (m^2/rad^2) for an on-resonance drive."""
    return x_zp(sys) ** 2 * (sys.kappa**2 + 4.0 * sys.omega_m**2) / (64.0 * sys.g0**2)


def phase_to_displacement(sys: OptomechSystem, s_phi):
    """Convert rad^2/Hz to m^2/Hz. Accepts a scalar, an array or a phase :class:`Spectrum`."""
    if isinstance(s_phi, Spectrum):
        s_phi.require_unit(SpectrumUnit.PHASE)
        return dataclasses.replace(
            s_phi, values=s_phi.values * transduction(sys), unit=SpectrumUnit.DISPLACEMENT
        )
    return np.asarray(s_phi, dtype=float) * transduction(sys)


def displacement_to_phase(sys: OptomechSystem, s_x):
    """Inverse of :func:`phase_to_displacement`."""
    if isinstance(s_x, Spectrum):
        s_x.require_unit(SpectrumUnit.DISPLACEMENT)
        return dataclasses.replace(
            s_x, values=s_x.values / transduction(sys), unit=SpectrumUnit.PHASE
        )
    return np.asarray(s_x, dtype=float) / transduction(sys)


def force_sensitivity(sys: OptomechSystem, config: MeasurementConfig) -> float:
    """Force noise (N/sqrt(Hz)) at resonance: total displacement noise over |chi(Omega_m)|.

    The total includes the zero-point term; with the drive off the imprecision, and with it the
    force noise, is unbounded.
    """
    if config.power == 0:
        return float("inf")
    total = float(displacement_psd(sys, config, sys.mech_freq))
    return float(np.sqrt(total)) / force_susceptibility(sys)


def group_delay(sys: OptomechSystem, probe_freq: ArrayLike) -> np.ndarray:
    """Reflection group delay (s) of the overcoupled single-port cavity.

    Peaks at 4/kappa on resonance with a FWHM of kappa/2pi in probe frequency.
    """
    return (4.0 / sys.kappa) * lorentzian(probe_freq, sys.cavity_freq, sys.cavity_linewidth)
