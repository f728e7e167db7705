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

"""Random streams keyed by (seed, bin index).

Each bin owns a Philox counter-based generator derived from ``SeedSequence(seed,
spawn_key=(index,))``, so a bin's draw does not depend on how many other bins exist or on
the order in which bins are generated.
"""

import numpy as np

from ..spectrum import check_seed


def bin_generator(seed: int, index: int) -> np.random.Generator:
    sequence = np.random.SeedSequence(entropy=check_seed(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(sequence))


def gamma_factors(seed: int, n_bins: int, n_avg: int) -> np.ndarray:
    """Unit-mean Gamma(shape=n_avg) factors, one per bin.

    The mean of ``n_avg`` exponentially distributed periodogram bins has exactly this law.
    """
    if n_avg < 1:
        raise ValueError(f"n_avg must be >= 1, got {n_avg}")
    draws = np.empty(n_bins)
    for k in range(n_bins):
        draws[k] = bin_generator(seed, k).standard_gamma(n_avg)
    return draws / n_avg


def normal_factors(seed: int, n_bins: int) -> np.ndarray:
    draws = np.empty(n_bins)
    for k in range(n_bins):
        draws[k] = bin_generator(seed, k).standard_normal()
    return draws
