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

"""Frequency-indexed single-sided power spectral densities and their CSV form.

Canonical file layout::

    # unit=displacement
    # n_avg=500
    # seed=1
    freq_hz,psd
    9355780,3.1e-29
    ...

``seed`` is omitted for noise-free (model) spectra. The per-row form with ``unit``,
``n_avg`` and ``seed`` columns (``freq_hz,psd,unit,n_avg,seed``) is also read.
"""

import dataclasses
import enum
import io
import logging
import math
import os
from dataclasses import dataclass
from typing import Dict, Optional, Union

import numpy as np
import pandas as pd

from .errors import SpectrumFormatError, UnitMismatchError

logger = logging.getLogger(__name__)

PathLike = Union[str, os.PathLike]

SEED_MAX = 2**64 - 1


class SpectrumUnit(str, enum.Enum):
    DISPLACEMENT = "displacement"  # m^2/Hz
    PHASE = "phase"  # rad^2/Hz


def check_seed(seed) -> int:
    if isinstance(seed, bool) or int(seed) != seed or not (0 <= int(seed) <= SEED_MAX):
        raise ValueError(f"seed must be an integer in [0, 2**64), got {seed!r}")
    return int(seed)


@dataclass(frozen=True)
class Spectrum:
    freqs: np.ndarray
    values: np.ndarray
    unit: SpectrumUnit
    n_avg: int
    seed: Optional[int] = None

    def __post_init__(self):
        freqs = np.array(self.freqs, dtype=float)
        values = np.array(self.values, dtype=float)
        if freqs.ndim != 1 or freqs.shape != values.shape:
            raise ValueError(
                f"freqs and values must be 1-d arrays of equal length, "
                f"got {freqs.shape} and {values.shape}"
            )
        if freqs.size and not np.all(np.isfinite(freqs)):
            raise ValueError("frequencies must be finite")
        if np.any(np.diff(freqs) <= 0):
            raise ValueError("frequencies must be strictly increasing")
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise ValueError("spectral density values must be finite and non-negative")
        if isinstance(self.n_avg, bool) or int(self.n_avg) != self.n_avg or self.n_avg < 1:
            raise ValueError(f"n_avg must be a positive integer, got {self.n_avg!r}")
        freqs.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "freqs", freqs)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "unit", SpectrumUnit(self.unit))
        object.__setattr__(self, "n_avg", int(self.n_avg))
        if self.seed is not None:
            object.__setattr__(self, "seed", check_seed(self.seed))

    def __len__(self) -> int:
        return len(self.freqs)

    @property
    def is_noise_free(self) -> bool:
        return self.seed is None

    def require_unit(self, unit: SpectrumUnit):
        if self.unit != SpectrumUnit(unit):
            raise UnitMismatchError(
                f"expected a {SpectrumUnit(unit).value} spectrum, got {self.unit.value}"
            )

    def scaled(self, factor: float) -> "Spectrum":
        return dataclasses.replace(self, values=self.values * factor)

    def shifted(self, delta: float) -> "Spectrum":
        return dataclasses.replace(self, freqs=self.freqs + delta)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"freq_hz": self.freqs, "psd": self.values})

    def header(self) -> Dict[str, str]:
        header = {"unit": self.unit.value, "n_avg": str(self.n_avg)}
        if self.seed is not None:
            header["seed"] = str(self.seed)
        return header

    def to_csv(self, path: PathLike):
        """Write the canonical comment-header CSV form."""
        buffer = io.StringIO()
        for key, value in self.header().items():
            buffer.write(f"# {key}={value}\n")
        self.to_frame().to_csv(buffer, index=False, float_format="%.17g", lineterminator="\n")
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(buffer.getvalue())
        logger.debug("wrote %d-bin %s spectrum to %s", len(self), self.unit.value, path)

    @classmethod
    def from_csv(cls, path: PathLike) -> "Spectrum":
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
        return cls.from_text(text, source=str(path))

    @classmethod
    def from_text(cls, text: str, source: str = "<spectrum>") -> "Spectrum":
        header = {}
        body_lines = []
        n_comment = 0
        for line in text.splitlines():
            stripped = line.strip()
            if stripped.startswith("#"):
                n_comment += 1
                key, sep, value = stripped.lstrip("#").partition("=")
                if sep:
                    header[key.strip()] = value.strip()
                continue
            if stripped:
                body_lines.append(line)
        if not body_lines:
            raise SpectrumFormatError(f"{source}: empty spectrum file")

        try:
            df = pd.read_csv(io.StringIO("\n".join(body_lines)), dtype=str)
        except pd.errors.EmptyDataError:
            raise SpectrumFormatError(f"{source}: empty spectrum file")
        except pd.errors.ParserError as e:
            raise SpectrumFormatError(f"{source}: {e}")

        missing = [c for c in ("freq_hz", "psd") if c not in df.columns]
        if missing:
            raise SpectrumFormatError(f"{source}: missing column(s) {missing}")
        unknown = [c for c in df.columns if c not in ("freq_hz", "psd", "unit", "n_avg", "seed")]
        if unknown:
            raise SpectrumFormatError(f"{source}: unknown column(s) {unknown}")
        if len(df) == 0:
            raise SpectrumFormatError(f"{source}: spectrum has no rows")

        # file line of data row 1: comment lines and the column header precede it
        first_line = n_comment + 2
        columns = {}
        for name in ("freq_hz", "psd"):
            parsed = np.empty(len(df))
            for row, cell in enumerate(df[name]):
                try:
                    parsed[row] = float(cell)
                except (TypeError, ValueError):
                    raise SpectrumFormatError(
                        f"{source}: row {row + 1} (line {first_line + row}): "
                        f"cannot parse {name}={cell!r}"
                    )
                if math.isnan(parsed[row]):
                    raise SpectrumFormatError(
                        f"{source}: row {row + 1} (line {first_line + row}): missing {name}"
                    )
            columns[name] = parsed

        for name in ("unit", "n_avg", "seed"):
            if name in df.columns:
                distinct = df[name].dropna().unique()
                if len(distinct) > 1:
                    raise SpectrumFormatError(f"{source}: column {name} is not constant")
                if len(distinct) == 1:
                    header.setdefault(name, str(distinct[0]))

        try:
            unit = SpectrumUnit(header.get("unit", ""))
        except ValueError:
            raise SpectrumFormatError(
                f"{source}: unit must be one of {[u.value for u in SpectrumUnit]}, "
                f"got {header.get('unit')!r}"
            )
        try:
            n_avg = int(header.get("n_avg", "1"))
            seed = header.get("seed")
            seed = None if seed in (None, "", "none", "None") else int(seed)
            return cls(columns["freq_hz"], columns["psd"], unit, n_avg, seed)
        except ValueError as e:
            raise SpectrumFormatError(f"{source}: {e}")
