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

__version__ = "0.0.1"

from .budget import SweepPoint, SweepResult, noise_budget, run_sweep
from .config import RunConfig, load_config
from .errors import (
    AnalysisError,
    CalibrationError,
    ConfigError,
    FitError,
    GridError,
    OptomechError,
    SpectrumFormatError,
    UnitMismatchError,
)
from .fitting import CalibrationResult, LorentzianFit, calibrate_g0, fit_lorentzian
from .physics import MeasurementConfig, NoiseBudget, OptomechSystem
from .spectrum import Spectrum, SpectrumUnit
from .synth import SynthRequest, synthesize
