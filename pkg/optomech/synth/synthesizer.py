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

import dataclasses
import logging
import math
from dataclasses import dataclass

import numpy as np

from ..errors import GridError
from ..physics import (
    MeasurementConfig,
    OptomechSystem,
    displacement_spectrum,
    displacement_to_phase,
    group_delay,
)
from ..physics.system import grid_bounds
from ..spectrum import Spectrum, SpectrumUnit, check_seed
from .rng import gamma_factors, normal_factors

logger = logging.getLogger(__name__)

# grids narrower than this (in linewidths on each side) cannot support a fit
MIN_HALF_SPAN = 10.0


@dataclass(frozen=True)
class SynthRequest:
    system: OptomechSystem
    config: MeasurementConfig
    seed: int
    unit: SpectrumUnit = SpectrumUnit.DISPLACEMENT

    def __post_init__(self):
        object.__setattr__(self, "seed", check_seed(self.seed))
        object.__setattr__(self, "unit", SpectrumUnit(self.unit))
        start, stop = grid_bounds(self.system, self.config)
        half_span = MIN_HALF_SPAN * self.system.mech_linewidth
        if start > self.system.mech_freq - half_span or stop < self.system.mech_freq + half_span:
            raise GridError(
                f"grid [{start}, {stop}] Hz must cover the mechanical frequency "
                f"+-{MIN_HALF_SPAN:g} linewidths"
            )

    @classmethod
    def create(
        cls,
        system: OptomechSystem,
        config: MeasurementConfig,
        seed: int,
        index: int = 0,
        unit: SpectrumUnit = SpectrumUnit.DISPLACEMENT,
    ) -> "SynthRequest":
        """Request for the ``index``-th spectrum of a series: its seed is ``seed XOR index``."""
        return cls(system, config, check_seed(seed) ^ int(index), unit)


def relative_bin_sd(n_avg: int) -> float:
    """Relative standard deviation of an ``n_avg``-times averaged periodogram bin."""
    if n_avg < 1:
        raise ValueError(f"n_avg must be >= 1, got {n_avg}")
    return 1.0 / math.sqrt(n_avg)


def apply_periodogram_noise(model: Spectrum, seed: int) -> Spectrum:
    """Draw each bin from Gamma(shape=n_avg, mean=model value), independently per bin."""
    factors = gamma_factors(seed, len(model), model.n_avg)
    return dataclasses.replace(model, values=model.values * factors, seed=check_seed(seed))


def model_spectrum(req: SynthRequest) -> Spectrum:
    """Noise-free spectrum of the request in its unit."""
    model = displacement_spectrum(req.system, req.config)
    if req.unit == SpectrumUnit.PHASE:
        model = displacement_to_phase(req.system, model)
    return model


def synthesize(req: SynthRequest) -> Spectrum:
    """Seeded measured spectrum: the model spectrum with averaged-periodogram noise."""
    if req.config.n_avg < 1:
        raise ValueError("n_avg must be >= 1")
    model = model_spectrum(req)
    logger.debug(
        "synthesizing %d bins at P=%.3g W (n_avg=%d, seed=%d)",
        len(model),
        req.config.power,
        req.config.n_avg,
        req.seed,
    )
    return apply_periodogram_noise(model, req.seed)


def synthesize_group_delay(
    sys: OptomechSystem, freqs: np.ndarray, relative_noise: float, seed: int
) -> np.ndarray:
    """Cavity group delay trace (s) with Gaussian noise of ``relative_noise`` x peak delay."""
    freqs = np.asarray(freqs, dtype=float)
    delay = group_delay(sys, freqs)
    if relative_noise == 0:
        return delay
    sigma = relative_noise * 4.0 / sys.kappa
    return delay + sigma * normal_factors(seed, len(freqs))
