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

"""Noise thermometry: g0 from the area of a weak-drive thermal phase spectrum.

The floor-subtracted area of the displacement peak is the thermal variance
x_zp^2 (2 n_th + 1). The phase spectrum carries the same peak divided by the transduction
x_zp^2 (kappa^2 + 4 Omega_m^2) / (64 g0^2), so its area fixes g0.
"""

import logging
import math
from dataclasses import dataclass

from ..errors import CalibrationError
from ..physics import OptomechSystem, n_thermal, x_zp
from ..physics.constants import TWO_PI
from ..spectrum import Spectrum, SpectrumUnit
from .lorentzian import LorentzianFit, fit_lorentzian

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class CalibrationResult:
    g0: float
    g0_uncertainty: float
    implied_transduction: float

    def calibrated(self, sys: OptomechSystem) -> OptomechSystem:
        """``sys`` with its coupling rate set to the calibrated g0."""
        return sys.with_coupling(self.g0)

    def to_dict(self) -> dict:
        return {
            "g0": float(self.g0),
            "g0_uncertainty": float(self.g0_uncertainty),
            "implied_transduction": float(self.implied_transduction),
        }


def _relative_area_sd(fit: LorentzianFit) -> float:
    cov = fit.covariance
    var = (
        cov[1, 1] / fit.height**2
        + cov[3, 3] / fit.linewidth**2
        + 2.0 * cov[1, 3] / (fit.height * fit.linewidth)
    )
    return math.sqrt(max(var, 0.0))


def calibrate_g0(
    spec: Spectrum, sys_partial: OptomechSystem, temperature: float
) -> CalibrationResult:
    """Calibrate g0 (Hz) from a phase spectrum dominated by thermal motion.

    ``sys_partial`` supplies every device parameter except the coupling, which is ignored if set.
    """
    spec.require_unit(SpectrumUnit.PHASE)
    fit = fit_lorentzian(spec)
    if not fit.converged:
        raise CalibrationError("Lorentzian fit of the phase spectrum did not converge")

    n_th = n_thermal(sys_partial, temperature)
    area = fit.area
    bracket = sys_partial.kappa**2 + 4.0 * sys_partial.omega_m**2
    g0_squared = bracket * area / (64.0 * (2.0 * n_th + 1.0))
    if not g0_squared > 0:
        raise CalibrationError(
            f"implied g0^2 = {g0_squared:g} is not positive; inputs are inconsistent"
        )

    g0 = math.sqrt(g0_squared) / TWO_PI
    g0_uncertainty = 0.5 * g0 * _relative_area_sd(fit)
    implied_transduction = x_zp(sys_partial) ** 2 * (2.0 * n_th + 1.0) / area
    logger.info("calibrated g0/2pi = %.4g +- %.2g Hz (n_th=%.2f)", g0, g0_uncertainty, n_th)
    return CalibrationResult(g0, g0_uncertainty, implied_transduction)
