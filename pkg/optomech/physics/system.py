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

"""Device and measurement parameters.

All public fields are ordinary frequencies in Hz (the way device parameters are quoted,
e.g. ``mech_freq`` is Omega_m / 2 pi). The ``omega_*``/``kappa``/``gamma_m``/``g0`` properties
return the angular rates used inside the formulas.
"""

import dataclasses
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError, GridError
from .constants import PHYSICAL_CONSTANTS, TWO_PI

GRID_SPACINGS = ("linear", "log")

# default grid half-width in mechanical linewidths
DEFAULT_HALF_SPAN = 50.0
DEFAULT_N_BINS = 4096
DEFAULT_N_AVG = 500


def _require_positive(name: str, value: float):
    if value is None or not math.isfinite(value) or value <= 0:
        raise ConfigError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class OptomechSystem:
    """The six device parameters that fix all of the physics."""

    cavity_freq: float
    cavity_linewidth: float
    mech_freq: float
    mech_linewidth: float
    coupling: Optional[float]
    mass: float

    def __post_init__(self):
        for name in ("cavity_freq", "cavity_linewidth", "mech_freq", "mech_linewidth", "mass"):
            _require_positive(name, getattr(self, name))
        if self.coupling is not None:
            _require_positive("coupling", self.coupling)
        if self.mech_linewidth >= self.mech_freq:
            raise ConfigError(
                f"mech_linewidth ({self.mech_linewidth} Hz) must be smaller than "
                f"mech_freq ({self.mech_freq} Hz)"
            )
        x_zp = math.sqrt(PHYSICAL_CONSTANTS.hbar / (2.0 * self.mass * self.omega_m))
        if not math.isfinite(x_zp) or x_zp <= 0:
            raise ConfigError(f"zero-point motion is not finite for mass={self.mass} kg")

    @classmethod
    def reference_device(cls) -> "OptomechSystem":
        """Aluminium membrane circuit: 6.707 GHz cavity, 9.357 MHz drum, 85 pg."""
        return cls(
            cavity_freq=6.707e9,
            cavity_linewidth=10.56e6,
            mech_freq=9.357e6,
            mech_linewidth=24.4,
            coupling=230.0,
            mass=85e-15,
        )

    def with_coupling(self, coupling: Optional[float]) -> "OptomechSystem":
        return dataclasses.replace(self, coupling=coupling)

    @property
    def omega_c(self) -> float:
        return TWO_PI * self.cavity_freq

    @property
    def kappa(self) -> float:
        return TWO_PI * self.cavity_linewidth

    @property
    def omega_m(self) -> float:
        return TWO_PI * self.mech_freq

    @property
    def gamma_m(self) -> float:
        return TWO_PI * self.mech_linewidth

    @property
    def g0(self) -> float:
        if self.coupling is None:
            raise ConfigError("coupling rate g0 is not set for this system")
        return TWO_PI * self.coupling

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


@dataclass(frozen=True)
class MeasurementConfig:
    """Drive power, detection efficiency, bath temperature and spectrum grid.

    ``freq_start``/``freq_stop`` left as ``None`` resolve to +-50 mechanical linewidths around
    the mechanical resonance in :func:`frequency_grid`.
    """

    power: float = 0.0
    efficiency: float = 1.0
    temperature: float = 0.04
    n_avg: int = DEFAULT_N_AVG
    freq_start: Optional[float] = None
    freq_stop: Optional[float] = None
    n_bins: int = DEFAULT_N_BINS
    spacing: str = "linear"
    injected_linewidth: Optional[float] = None

    def __post_init__(self):
        if not math.isfinite(self.power) or self.power < 0:
            raise ConfigError(f"power must be >= 0 W, got {self.power!r}")
        if not (0.0 < self.efficiency <= 1.0):
            raise ConfigError(f"efficiency must lie in (0, 1], got {self.efficiency!r}")
        _require_positive("temperature", self.temperature)
        if isinstance(self.n_avg, bool) or int(self.n_avg) != self.n_avg or self.n_avg < 1:
            raise ConfigError(f"n_avg must be a positive integer, got {self.n_avg!r}")
        if isinstance(self.n_bins, bool) or int(self.n_bins) != self.n_bins:
            raise ConfigError(f"n_bins must be an integer, got {self.n_bins!r}")
        if self.spacing not in GRID_SPACINGS:
            raise ConfigError(f"spacing must be one of {GRID_SPACINGS}, got {self.spacing!r}")
        if self.injected_linewidth is not None:
            _require_positive("injected_linewidth", self.injected_linewidth)

    def with_power(self, power: float) -> "MeasurementConfig":
        return dataclasses.replace(self, power=power)

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def mechanical_linewidth(sys: OptomechSystem, config: MeasurementConfig) -> float:
    """Linewidth of the modelled peak: the injected one if set, else Gamma_m / 2 pi."""
    if config.injected_linewidth is not None:
        return config.injected_linewidth
    return sys.mech_linewidth


def grid_bounds(sys: OptomechSystem, config: MeasurementConfig):
    start = config.freq_start
    stop = config.freq_stop
    if start is None:
        start = sys.mech_freq - DEFAULT_HALF_SPAN * sys.mech_linewidth
    if stop is None:
        stop = sys.mech_freq + DEFAULT_HALF_SPAN * sys.mech_linewidth
    return start, stop


def frequency_grid(sys: OptomechSystem, config: MeasurementConfig) -> np.ndarray:
    """Ordered frequency bins (Hz) of the measured spectrum.

    ``linear`` spacing covers [freq_start, freq_stop] uniformly. ``log`` spacing places one bin
    at the mechanical frequency and geometrically spaced bins on each side, from Gamma_m/20
    out to the grid edge, which keeps the peak resolved while reaching far into the floor.
    """
    start, stop = grid_bounds(sys, config)
    if not (start < sys.mech_freq < stop):
        raise GridError(
            f"grid [{start}, {stop}] Hz does not contain the mechanical frequency "
            f"{sys.mech_freq} Hz"
        )
    if start < 0:
        raise GridError(f"grid start must be non-negative, got {start} Hz")

    if config.spacing == "linear":
        if config.n_bins < 2:
            raise GridError(f"a linear grid needs at least 2 bins, got {config.n_bins}")
        return np.linspace(start, stop, int(config.n_bins))

    # two bins per side so that both edges are reached
    if config.n_bins < 5:
        raise GridError(f"a log grid needs at least 5 bins, got {config.n_bins}")
    d_min = 0.05 * sys.mech_linewidth
    lower_span = sys.mech_freq - start
    upper_span = stop - sys.mech_freq
    if lower_span <= d_min or upper_span <= d_min:
        raise GridError("log grid edges must lie further than Gamma_m/20 from the resonance")
    n_lower = (int(config.n_bins) - 1) // 2
    n_upper = int(config.n_bins) - 1 - n_lower
    lower = sys.mech_freq - np.geomspace(d_min, lower_span, n_lower)[::-1]
    upper = sys.mech_freq + np.geomspace(d_min, upper_span, n_upper)
    return np.concatenate([lower, [sys.mech_freq], upper])
