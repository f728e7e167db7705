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

"""Power sweeps: synthesize or ingest one spectrum per power, fit it and split the noise.

The fitted floor is the apparent motion (imprecision) and the fitted Lorentzian height is the
actual motion (thermal, backaction and zero-point). Points whose fit fails or whose linewidth
leaves the guard band stay in the result with their flags set.
"""

import io
import logging
import os
from dataclasses import dataclass
from typing import List, Sequence, Union

import pandas as pd
from tqdm import tqdm

from ..errors import ConfigError
from ..fitting import LorentzianFit, fit_lorentzian, linewidth_guard
from ..physics import MeasurementConfig, NoiseBudget, OptomechSystem, optimum_power, p_sql
from ..spectrum import Spectrum, check_seed
from ..synth import SynthRequest, synthesize
from .decomposition import crossover_power, db_ratio, noise_budget

logger = logging.getLogger(__name__)

SWEEP_COLUMNS = (
    "power_w",
    "s_imp_model",
    "s_ba_model",
    "s_th_model",
    "s_zp",
    "floor_fit",
    "height_fit",
    "linewidth_fit",
    "guard_ok",
    "converged",
)


@dataclass(frozen=True)
class SweepPoint:
    power: float
    budget: NoiseBudget
    fit: LorentzianFit
    apparent_motion: float
    actual_motion: float
    guard_ok: bool

    @property
    def flagged(self) -> bool:
        return not (self.fit.converged and self.guard_ok)

    def to_dict(self) -> dict:
        return {
            "power": float(self.power),
            "budget": self.budget.to_dict(),
            "fit": self.fit.to_dict(),
            "apparent_motion": float(self.apparent_motion),
            "actual_motion": float(self.actual_motion),
            "guard_ok": bool(self.guard_ok),
        }


@dataclass(frozen=True)
class SweepResult:
    points: List[SweepPoint]
    system: OptomechSystem
    config: MeasurementConfig

    @property
    def flagged(self) -> List[int]:
        return [i for i, point in enumerate(self.points) if point.flagged]

    @property
    def all_ok(self) -> bool:
        return not self.flagged

    def to_frame(self) -> pd.DataFrame:
        rows = [
            (
                p.power,
                p.budget.s_imp,
                p.budget.s_ba,
                p.budget.s_th,
                p.budget.s_zp,
                p.fit.floor,
                p.fit.height,
                p.fit.linewidth,
                bool(p.guard_ok),
                bool(p.fit.converged),
            )
            for p in self.points
        ]
        return pd.DataFrame(rows, columns=list(SWEEP_COLUMNS))

    def to_csv(self, path: Union[str, os.PathLike]):
        buffer = io.StringIO()
        self.to_frame().to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(buffer.getvalue())

    def summary(self) -> dict:
        """Headline numbers of the sweep, evaluated at its highest power."""
        top = max(self.points, key=lambda p: p.power)
        fitted_backaction = top.actual_motion - top.budget.s_th - top.budget.s_zp
        fitted_ba_th_db = None
        if fitted_backaction > 0:
            fitted_ba_th_db = db_ratio(fitted_backaction, top.budget.s_th)
        fitted_imp_zp_db = None
        if top.apparent_motion > 0:
            fitted_imp_zp_db = db_ratio(top.apparent_motion, top.budget.s_zp)
        return {
            "n_points": len(self.points),
            "p_sql": p_sql(self.system),
            "optimum_power": optimum_power(self.system, self.config.efficiency),
            "crossover_power": crossover_power(self.system, self.config),
            "top_power": top.power,
            "backaction_thermal_db_model": db_ratio(top.budget.s_ba, top.budget.s_th),
            "backaction_thermal_db_fit": fitted_ba_th_db,
            "imprecision_zero_point_db_model": db_ratio(top.budget.s_imp, top.budget.s_zp),
            "imprecision_zero_point_db_fit": fitted_imp_zp_db,
            "flagged": self.flagged,
            "all_ok": self.all_ok,
        }

    def to_dict(self) -> dict:
        return {
            "system": self.system.to_dict(),
            "config": self.config.to_dict(),
            "points": [p.to_dict() for p in self.points],
        }


def point_seed(seed: int, index: int) -> int:
    """Seed of the ``index``-th spectrum of a series, ``seed XOR index``."""
    return check_seed(seed) ^ int(index)


def sweep_point(
    sys: OptomechSystem, config: MeasurementConfig, spec: Spectrum, weighting: str = "log"
) -> SweepPoint:
    """Fit ``spec`` measured at ``config.power`` and decompose it against the model budget."""
    fit = fit_lorentzian(spec, weighting=weighting)
    guard_ok = fit.converged and linewidth_guard(fit, sys)
    return SweepPoint(
        power=config.power,
        budget=noise_budget(sys, config),
        fit=fit,
        apparent_motion=max(fit.floor, 0.0),
        actual_motion=max(fit.height, 0.0),
        guard_ok=guard_ok,
    )


def _check_powers(powers: Sequence[float]) -> List[float]:
    powers = [float(p) for p in powers]
    if not powers:
        raise ConfigError("a sweep needs at least one power")
    for power in powers:
        if not power > 0:
            raise ConfigError(f"sweep powers must be positive, got {power!r}")
    return powers


def run_sweep(
    sys: OptomechSystem,
    base_config: MeasurementConfig,
    powers: Sequence[float],
    seed: int,
    weighting: str = "log",
    progress: bool = False,
) -> SweepResult:
    """Synthesize, fit and decompose one spectrum per power, in input order.

    Spectrum ``i`` uses seed ``seed XOR i``, the same as ``optomech simulate``.
    """
    powers = _check_powers(powers)
    check_seed(seed)
    points = []
    for index, power in enumerate(tqdm(powers, desc="sweep", disable=not progress)):
        config = base_config.with_power(power)
        spec = synthesize(SynthRequest.create(sys, config, seed, index=index))
        point = sweep_point(sys, config, spec, weighting)
        if point.flagged:
            logger.warning(
                "point %d (P=%.3g W) flagged: converged=%s guard_ok=%s",
                index,
                power,
                point.fit.converged,
                point.guard_ok,
            )
        points.append(point)
    return SweepResult(points, sys, base_config.with_power(0.0))


def analyze_spectra(
    sys: OptomechSystem,
    base_config: MeasurementConfig,
    powers: Sequence[float],
    spectra: Sequence[Spectrum],
    weighting: str = "log",
    progress: bool = False,
) -> SweepResult:
    """Sweep over already measured (or previously exported) spectra."""
    powers = _check_powers(powers)
    if len(spectra) != len(powers):
        raise ConfigError(f"got {len(spectra)} spectra for {len(powers)} powers")
    points = [
        sweep_point(sys, base_config.with_power(power), spec, weighting)
        for power, spec in tqdm(
            list(zip(powers, spectra)), desc="sweep", disable=not progress
        )
    ]
    return SweepResult(points, sys, base_config.with_power(0.0))
