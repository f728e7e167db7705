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

from dataclasses import dataclass

import numpy as np
import scipy.constants


@dataclass(frozen=True)
class PhysicalConstants:
    """CODATA values used by every formula in the package."""

    hbar: float = scipy.constants.hbar  # J s
    k_b: float = scipy.constants.k  # J/K


PHYSICAL_CONSTANTS = PhysicalConstants()

TWO_PI = 2.0 * np.pi
