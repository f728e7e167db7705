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

"""Closed-form noise physics of a continuous linear position measurement.

Every function takes ordinary frequencies through :class:`OptomechSystem` and converts to
angular rates internally. Displacement spectral densities are single-sided and symmetrised,
in m^2/Hz.

The added noise of an on-resonance phase measurement is

    S_imp + S_ba = (S_zp / 2) (P_SQL / P + P / P_SQL),

with S_zp = 2 hbar / (m Omega_m Gamma_m) and
P_SQL = hbar omega_c Gamma_m (kappa^2 + 4 Omega_m^2) / (64 g0^2).
A homodyne efficiency eta < 1 divides only the imprecision term; backaction acts on the
oscillator before any detection loss.

Writing the backaction term as 2 n_ba S_zp (the same form as the thermal term 2 n_th S_zp)
gives the backaction occupancy n_ba = P / (4 P_SQL).
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import ConfigError
from .constants import PHYSICAL_CONSTANTS
from .system import OptomechSystem

HBAR = PHYSICAL_CONSTANTS.hbar
K_B = PHYSICAL_CONSTANTS.k_b


@dataclass(frozen=True)
class NoiseBudget:
    """Displacement noise at the mechanical resonance for one drive power.

    ``s_imp`` is ``inf`` when the drive is off (no measurement, unbounded imprecision).
    """

    s_zp: float
    s_th: float
    s_ba: float
    s_imp: float
    s_total: float
    n_th: float
    n_ba: float

    @property
    def actual_motion(self) -> float:
        """Height of the motional Lorentzian, s_zp (2 (n_th + n_ba) + 1)."""
        return self.s_zp + self.s_th + self.s_ba

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def _check_efficiency(efficiency: float):
    if not (0.0 < efficiency <= 1.0):
        raise ConfigError(f"efficiency must lie in (0, 1], got {efficiency!r}")


def x_zp(sys: OptomechSystem) -> float:
    """Zero-point amplitude sqrt(hbar / (2 m Omega_m)) in m."""
    return math.sqrt(HBAR / (2.0 * sys.mass * sys.omega_m))


def n_thermal(sys: OptomechSystem, temperature: float) -> float:
    """Bose-Einstein occupancy of the mechanical mode at ``temperature`` (K)."""
    if not temperature > 0:
        raise ConfigError(f"temperature must be positive, got {temperature!r}")
    ratio = HBAR * sys.omega_m / (K_B * temperature)
    with np.errstate(over="ignore"):
        return float(1.0 / np.expm1(ratio))


def p_sql(sys: OptomechSystem) -> float:
    """Drive power (W) at which imprecision and backaction balance for an ideal cavity."""
    return (
        HBAR
        * sys.omega_c
        * sys.gamma_m
        * (sys.kappa**2 + 4.0 * sys.omega_m**2)
        / (64.0 * sys.g0**2)
    )


def s_zp(sys: OptomechSystem) -> float:
    """Zero-point displacement spectral density at resonance, 2 hbar / (m Omega_m Gamma_m)."""
    return 2.0 * HBAR / (sys.mass * sys.omega_m * sys.gamma_m)


def added_noise(sys: OptomechSystem, power: float, efficiency: float = 1.0) -> Tuple[float, float]:
    """Imprecision and backaction displacement noise (m^2/Hz) at resonance.

    Returns ``(s_imp, s_ba)``. ``efficiency=1`` reproduces the ideal trade-off exactly.
    """
    if not power > 0:
        raise ConfigError(f"added noise needs a positive drive power, got {power!r}")
    _check_efficiency(efficiency)
    half = 0.5 * s_zp(sys)
    ratio = p_sql(sys) / power
    s_imp = half * ratio / efficiency
    s_ba = half * (power / p_sql(sys))
    return s_imp, s_ba


def optimum_power(sys: OptomechSystem, efficiency: float = 1.0) -> float:
    """Power minimising the total added noise: P_SQL / sqrt(eta)."""
    _check_efficiency(efficiency)
    return p_sql(sys) / math.sqrt(efficiency)


def n_backaction(sys: OptomechSystem, power: float) -> float:
    """Phonon occupancy added by radiation-pressure shot noise, P / (4 P_SQL)."""
    if not power >= 0:
        raise ConfigError(f"power must be >= 0 W, got {power!r}")
    return power / (4.0 * p_sql(sys))


def photon_flux(sys: OptomechSystem, power: float) -> float:
    """Drive photons per second, P / (hbar omega_c)."""
    if not power >= 0:
        raise ConfigError(f"power must be >= 0 W, got {power!r}")
    return power / (HBAR * sys.omega_c)


def force_susceptibility(sys: OptomechSystem) -> float:
    """|chi(Omega_m)| = 1 / (m Omega_m Gamma_m) in m/N."""
    return 1.0 / (sys.mass * sys.omega_m * sys.gamma_m)
