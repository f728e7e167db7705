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

"""Command line front end: ``optomech budget|simulate|fit|calibrate|sweep``.

Reports are printed to stdout as JSON and also written to the output directory. Exit codes:
0 on success, 1 for usage, configuration, file format and I/O errors, 2 when the analysis ran
but failed a quality requirement (unconverged fit, refused calibration, flagged sweep point).
"""

import json
import logging
import math
import os
import sys
from typing import Any, List, Optional

import fire
import numpy as np

from .budget import (
    backaction_dominated_span,
    crossover_power,
    noise_budget,
    run_sweep,
    sql_imprecision_ratio,
    thermal_fraction,
)
from .budget.decomposition import db_ratio
from .config import RunConfig, load_config
from .errors import AnalysisError
from .fitting import calibrate_g0, fit_lorentzian
from .physics import (
    force_sensitivity,
    n_thermal,
    optimum_power,
    p_sql,
    photon_flux,
    s_zp,
    x_zp,
)
from .spectrum import Spectrum, SpectrumUnit
from .synth import SynthRequest, model_spectrum, synthesize

logger = logging.getLogger(__name__)

LOG_LEVEL_ENV = "OPTOMECH_LOG_LEVEL"


def _jsonable(value: Any) -> Any:
    """Plain JSON types, with non-finite floats as null."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value) if math.isfinite(value) else None
    if isinstance(value, SpectrumUnit):
        return value.value
    return value


def _db_or_none(a: float, b: float) -> Optional[float]:
    if a > 0 and b > 0 and math.isfinite(a) and math.isfinite(b):
        return db_ratio(a, b)
    return None


class OptomechCLI:
    """Noise budgets, synthetic spectra, fits and calibrations of an optomechanical measurement."""

    def __init__(self):
        self._exit_code = 0

    def _load(self, config, seed=None, out=None, power=None) -> RunConfig:
        return load_config(config).with_overrides(seed=seed, out_dir=out, power=power)

    def _emit(self, run: RunConfig, name: str, report: dict):
        text = json.dumps(_jsonable(report), indent=2)
        os.makedirs(run.out_dir, exist_ok=True)
        path = os.path.join(run.out_dir, name)
        with open(path, "w", encoding="utf-8") as f:
            f.write(text + "\n")
        logger.info("wrote %s", path)
        print(text)

    def budget(self, config: str = None, power=None, seed: int = None, out: str = None):
        """Scalar noise budget of the device at each configured power."""
        run = self._load(config, seed=seed, out=out, power=power)
        sys_, base = run.system, run.measurement
        budgets = []
        for p in run.powers:
            cfg = base.with_power(p)
            nb = noise_budget(sys_, cfg)
            budgets.append(
                {
                    "power": p,
                    **nb.to_dict(),
                    "backaction_thermal_db": _db_or_none(nb.s_ba, nb.s_th),
                    "imprecision_zero_point_db": _db_or_none(nb.s_imp, nb.s_zp),
                    "sql_imprecision_ratio": sql_imprecision_ratio(sys_, cfg),
                    "thermal_fraction": thermal_fraction(nb),
                    "backaction_dominated_span": backaction_dominated_span(sys_, cfg),
                    "force_sensitivity": force_sensitivity(sys_, cfg),
                    "photon_flux": photon_flux(sys_, p),
                }
            )
        report = {
            "system": sys_.to_dict(),
            "efficiency": base.efficiency,
            "temperature": base.temperature,
            "x_zp": x_zp(sys_),
            "s_zp": s_zp(sys_),
            "p_sql": p_sql(sys_),
            "n_th": n_thermal(sys_, base.temperature),
            "optimum_power": optimum_power(sys_, base.efficiency),
            "crossover_power": crossover_power(sys_, base),
            "budgets": budgets,
        }
        self._emit(run, "budget.json", report)

    def simulate(
        self,
        config: str = None,
        power=None,
        seed: int = None,
        out: str = None,
        noise_free: bool = None,
        unit: str = None,
    ):
        """Write one spectrum CSV per power, ``spectrum_<index>.csv``, and print a manifest."""
        run = self._load(config, seed=seed, out=out, power=power)
        noise_free = run.noise_free if noise_free is None else bool(noise_free)
        unit = run.unit if unit is None else SpectrumUnit(unit)
        os.makedirs(run.out_dir, exist_ok=True)
        files = []
        for index, p in enumerate(run.powers):
            req = SynthRequest.create(run.system, run.measurement_at(p), run.seed, index, unit)
            spec = model_spectrum(req) if noise_free else synthesize(req)
            path = os.path.join(run.out_dir, f"spectrum_{index:03d}.csv")
            spec.to_csv(path)
            files.append({"index": index, "power": p, "seed": spec.seed, "path": path})
        report = {
            "command": "simulate",
            "unit": unit,
            "noise_free": noise_free,
            "n_avg": run.measurement.n_avg,
            "files": files,
        }
        self._emit(run, "manifest.json", report)

    def fit(self, spectrum: str, config: str = None, out: str = None, weighting: str = None):
        """Fit the Lorentzian plus floor of a spectrum CSV; exit 2 if the fit does not converge."""
        run = self._load(config, out=out)
        weighting = weighting or run.weighting or "linear"
        result = fit_lorentzian(Spectrum.from_csv(spectrum), weighting=weighting)
        self._emit(run, "fit.json", result.to_dict())
        if not result.converged:
            logger.error("fit of %s did not converge", spectrum)
            self._exit_code = 2

    def calibrate(self, spectrum: str, config: str = None, out: str = None):
        """Calibrate g0 from a weak-drive phase spectrum by noise thermometry."""
        run = self._load(config, out=out)
        result = calibrate_g0(Spectrum.from_csv(spectrum), run.system, run.measurement.temperature)
        self._emit(run, "calibration.json", result.to_dict())

    def sweep(
        self,
        config: str = None,
        power=None,
        seed: int = None,
        out: str = None,
        weighting: str = None,
        progress: bool = True,
    ):
        """Power sweep to ``sweep.csv`` and ``sweep_summary.json``; exit 2 if a point is flagged."""
        run = self._load(config, seed=seed, out=out, power=power)
        result = run_sweep(
            run.system,
            run.measurement,
            run.powers,
            run.seed,
            weighting=weighting or run.weighting or "log",
            progress=progress,
        )
        os.makedirs(run.out_dir, exist_ok=True)
        result.to_csv(os.path.join(run.out_dir, "sweep.csv"))
        self._emit(run, "sweep_summary.json", result.summary())
        if not result.all_ok:
            logger.error("flagged sweep points: %s", result.flagged)
            self._exit_code = 2


def _setup_logging():
    level = os.environ.get(LOG_LEVEL_ENV, "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        level = "WARNING"
    logging.basicConfig(
        level=level,
        stream=sys.stderr,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def main(argv: Optional[List[str]] = None) -> int:
    _setup_logging()
    cli = OptomechCLI()
    try:
        fire.Fire(cli, command=argv, name="optomech")
    except fire.core.FireExit as e:
        return 0 if e.code in (0, None) else 1
    except AnalysisError as e:
        logger.error("%s", e)
        return 2
    except (ValueError, OSError) as e:
        logger.error("%s", e)
        return 1
    return cli._exit_code
