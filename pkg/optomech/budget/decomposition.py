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

import math

from ..physics import (
    MeasurementConfig,
    NoiseBudget,
    OptomechSystem,
    added_noise,
    n_backaction,
    n_thermal,
    p_sql,
    s_zp,
)


def noise_budget(sys: OptomechSystem, config: MeasurementConfig) -> NoiseBudget:
    """Model noise contributions at resonance for ``config.power``.

    With the drive off ``s_imp`` (and so ``s_total``) is ``inf``.
    """
    zp = s_zp(sys)
    n_th = n_thermal(sys, config.temperature)
    n_ba = n_backaction(sys, config.power)
    if config.power > 0:
        s_imp, s_ba = added_noise(sys, config.power, config.efficiency)
    else:
        s_imp, s_ba = math.inf, 0.0
    s_th = 2.0 * n_th * zp
    return NoiseBudget(
        s_zp=zp,
        s_th=s_th,
        s_ba=s_ba,
        s_imp=s_imp,
        s_total=s_imp + s_th + s_ba + zp,
        n_th=n_th,
        n_ba=n_ba,
    )


def crossover_power(sys: OptomechSystem, config: MeasurementConfig) -> float:
    """Power (W) where backaction equals thermal motion, 4 n_th P_SQL."""
    return 4.0 * n_thermal(sys, config.temperature) * p_sql(sys)


def db_ratio(a: float, b: float) -> float:
    if not (a > 0 and b > 0):
        raise ValueError(f"dB ratio needs positive operands, got {a!r} and {b!r}")
    return 10.0 * math.log10(a / b)


def backaction_dominated_span(sys: OptomechSystem, config: MeasurementConfig) -> float:
    """Full width (Hz) of the band in which the backaction peak exceeds the imprecision floor."""
    budget = noise_budget(sys, config)
    ratio = budget.s_ba / budget.s_imp
    if ratio <= 1.0:
        return 0.0
    return sys.mech_linewidth * math.sqrt(ratio - 1.0)


def thermal_fraction(budget: NoiseBudget) -> float:
    """Share of the thermal bath in the total motion at resonance."""
    return budget.s_th / budget.actual_motion


def sql_imprecision_ratio(sys: OptomechSystem, config: MeasurementConfig) -> float:
    """How far the imprecision lies below its value at the SQL, (s_zp / 2) / s_imp."""
    budget = noise_budget(sys, config)
    return 0.5 * budget.s_zp / budget.s_imp
