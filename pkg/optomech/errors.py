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

"""Exceptions raised by optomech.

Input problems subclass ``ValueError`` and map to exit code 1 on the command line.
``AnalysisError`` and its subclasses signal a quality failure of the analysis itself
(an unconverged fit, a refused calibration) and map to exit code 2.
"""


class OptomechError(Exception):
    """Base class of every error raised on purpose by this package."""


class ConfigError(OptomechError, ValueError):
    """Invalid run configuration or device/measurement parameters."""

    def __init__(self, message: str, source: str = None, line: int = None):
        self.source = source
        self.line = line
        if source is not None and line is not None:
            message = f"{source}:{line}: {message}"
        elif source is not None:
            message = f"{source}: {message}"
        super().__init__(message)


class GridError(OptomechError, ValueError):
    """Frequency grid unusable for the requested operation."""


class SpectrumFormatError(OptomechError, ValueError):
    """Malformed spectrum file."""


class UnitMismatchError(OptomechError, ValueError):
    """Spectrum carries the wrong unit tag for the requested operation."""


class AnalysisError(OptomechError):
    """The analysis ran but its result fails a quality requirement."""


class FitError(AnalysisError):
    pass


class CalibrationError(AnalysisError):
    pass
