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

"""Run configuration files.

A project file is YAML (JSON is accepted as well)::

    system_config_path: ./configs/systems/reference_device.yaml   # or an inline `system:` block
    measurement:
      powers: {start: 10fW, stop: 7.8nW, num: 13}             # or a list, or `power: 7.8nW`
      efficiency: 0.02
      temperature_K: 40mK
      n_avg: 500
      grid: {freq_start: 9.3545MHz, freq_stop: 9.3595MHz, n_bins: 2001, spacing: log}
    seed: 1
    out_dir: ./output/reference
    options: {weighting: log, unit: displacement, noise_free: false}

JSON project files load unchanged. Parsing is YAML, so what JSON forbids (`yes`/`no` booleans,
trailing commas in flow mappings) is accepted too.

Quantities are SI numbers or strings with an SI prefix and the unit of the field ("7.8nW",
"40mK", "85pg", "9.357MHz"). Unknown or duplicate keys and bad values raise
:class:`~optomech.errors.ConfigError` pointing at the offending line.
"""

import dataclasses
import logging
import os
import re
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import yaml

from .errors import ConfigError
from .fitting import WEIGHTINGS
from .physics import MeasurementConfig, OptomechSystem
from .spectrum import SpectrumUnit, check_seed

logger = logging.getLogger(__name__)

REFERENCE_POWERS = (1e-14, 1e-13, 1e-12, 1e-11, 1e-10, 1e-9, 7.8e-9)
DEFAULT_EFFICIENCY = 0.02
DEFAULT_OUT_DIR = "./output"

SI_PREFIXES = {
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}

_NUMBER = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*(\S*)\s*$")

SYSTEM_FIELDS = {
    "cavity_freq": "Hz",
    "cavity_linewidth": "Hz",
    "mech_freq": "Hz",
    "mech_linewidth": "Hz",
    "coupling": "Hz",
    "mass": "kg",
}
MEASUREMENT_KEYS = (
    "power",
    "powers",
    "efficiency",
    "temperature_K",
    "n_avg",
    "grid",
    "injected_linewidth",
)
GRID_KEYS = ("freq_start", "freq_stop", "n_bins", "spacing")
OPTION_KEYS = ("weighting", "unit", "noise_free")
TOP_LEVEL_KEYS = ("system", "system_config_path", "measurement", "seed", "out_dir", "options")


def parse_quantity(value: Any, unit: str, source: str = None, line: int = None) -> float:
    """SI value of a number or a prefixed string such as ``"7.8nW"``.

    Masses use gram prefixes (``"85pg"``) and are returned in kg.
    """
    if isinstance(value, bool):
        raise ConfigError(f"expected a quantity in {unit}, got {value!r}", source, line)
    if isinstance(value, (int, float)):
        return float(value)
    if not isinstance(value, str):
        raise ConfigError(f"expected a quantity in {unit}, got {value!r}", source, line)
    match = _NUMBER.match(value)
    if match is None:
        raise ConfigError(f"cannot parse quantity {value!r}", source, line)
    number, suffix = float(match.group(1)), match.group(2)
    if not suffix:
        return number
    if not unit:
        raise ConfigError(f"expected a plain number, got {value!r}", source, line)
    symbol, base = ("g", 1e-3) if unit == "kg" else (unit, 1.0)
    if not suffix.endswith(symbol) or suffix[: -len(symbol)] not in SI_PREFIXES:
        raise ConfigError(f"{value!r} is not a quantity in {unit}", source, line)
    return number * SI_PREFIXES[suffix[: -len(symbol)]] * base


def _integer(value: Any, name: str, source: str, line: int) -> int:
    try:
        number = parse_quantity(value, "", source, line) if isinstance(value, str) else value
        if isinstance(number, bool) or int(number) != number:
            raise ValueError
    except (TypeError, ValueError, OverflowError):
        raise ConfigError(f"{name} must be an integer, got {value!r}", source, line)
    return int(number)


class _Block:
    """A YAML mapping node with per-key source lines."""

    _constructor = yaml.constructor.SafeConstructor()

    def __init__(self, node: yaml.Node, source: str, name: str):
        self.source = source
        self.name = name
        self.line = node.start_mark.line + 1
        if not isinstance(node, yaml.MappingNode):
            raise ConfigError(f"{name} must be a mapping", source, self.line)
        self.nodes: Dict[str, yaml.Node] = {}
        self.lines: Dict[str, int] = {}
        for key_node, value_node in node.value:
            key = self._constructor.construct_object(key_node, deep=True)
            line = key_node.start_mark.line + 1
            if not isinstance(key, str):
                raise ConfigError(f"{name}: keys must be strings, got {key!r}", source, line)
            if key in self.nodes:
                raise ConfigError(f"{name}: duplicate key {key!r}", source, line)
            self.nodes[key] = value_node
            self.lines[key] = line

    def check_keys(self, allowed):
        for key, line in self.lines.items():
            if key not in allowed:
                raise ConfigError(
                    f"{self.name}: unknown key {key!r} (expected one of {', '.join(allowed)})",
                    self.source,
                    line,
                )

    def __contains__(self, key: str) -> bool:
        return key in self.nodes

    def value(self, key: str) -> Any:
        return self._constructor.construct_object(self.nodes[key], deep=True)

    def block(self, key: str) -> "_Block":
        return _Block(self.nodes[key], self.source, f"{self.name}.{key}")

    def quantity(self, key: str, unit: str, optional: bool = False) -> Optional[float]:
        value = self.value(key)
        if value is None:
            if optional:
                return None
            raise self.error(key, "a value is required")
        return parse_quantity(value, unit, self.source, self.lines[key])

    def error(self, key: str, message: str) -> ConfigError:
        return ConfigError(f"{self.name}.{key}: {message}", self.source, self.lines.get(key))


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs: the device, the measurement, the seed and the outputs."""

    system: OptomechSystem = dataclasses.field(default_factory=OptomechSystem.reference_device)
    measurement: MeasurementConfig = dataclasses.field(
        default_factory=lambda: MeasurementConfig(efficiency=DEFAULT_EFFICIENCY)
    )
    powers: Tuple[float, ...] = REFERENCE_POWERS
    seed: int = 0
    out_dir: str = DEFAULT_OUT_DIR
    weighting: Optional[str] = None
    unit: SpectrumUnit = SpectrumUnit.DISPLACEMENT
    noise_free: bool = False
    source: Optional[str] = None

    def measurement_at(self, power: float) -> MeasurementConfig:
        return self.measurement.with_power(power)

    def with_overrides(
        self, seed: Optional[int] = None, out_dir: Optional[str] = None, power=None
    ) -> "RunConfig":
        """Command-line overrides; ``power`` replaces the whole power list."""
        changes = {}
        if seed is not None:
            changes["seed"] = check_seed(seed)
        if out_dir is not None:
            changes["out_dir"] = str(out_dir)
        if power is not None:
            value = parse_quantity(power, "W", "--power")
            if not value > 0:
                raise ConfigError(f"power must be positive, got {power!r}", "--power")
            changes["powers"] = (value,)
        return dataclasses.replace(self, **changes)


def _resolve_path(path: str, base_dir: Optional[str]) -> str:
    if os.path.exists(path) or base_dir is None:
        return path
    candidate = os.path.join(base_dir, path)
    return candidate if os.path.exists(candidate) else path


def _compose(text: str, source: str) -> Optional[yaml.Node]:
    try:
        return yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as e:
        line = e.problem_mark.line + 1 if e.problem_mark is not None else None
        raise ConfigError(f"invalid YAML: {e.problem or e}", source, line)
    except yaml.YAMLError as e:
        raise ConfigError(f"invalid YAML: {e}", source)


def _parse_system(block: _Block) -> OptomechSystem:
    block.check_keys(tuple(SYSTEM_FIELDS))
    fields = OptomechSystem.reference_device().to_dict()
    for key, unit in SYSTEM_FIELDS.items():
        if key in block:
            fields[key] = block.quantity(key, unit, optional=key == "coupling")
    try:
        return OptomechSystem(**fields)
    except ConfigError as e:
        raise ConfigError(str(e), block.source, block.line)


def _load_system_file(path: str, base_dir: Optional[str]) -> OptomechSystem:
    path = _resolve_path(path, base_dir)
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read system config: {e}", path)
    node = _compose(text, path)
    if node is None:
        raise ConfigError("empty system config", path)
    return _parse_system(_Block(node, path, "system"))


def _parse_powers(block: _Block) -> Tuple[float, ...]:
    if "power" in block and "powers" in block:
        raise block.error("powers", "give either power or powers, not both")
    if "power" in block:
        return (block.quantity("power", "W"),)
    if "powers" not in block:
        return REFERENCE_POWERS
    node = block.nodes["powers"]
    line = block.lines["powers"]
    if isinstance(node, yaml.MappingNode):
        spec = block.block("powers")
        spec.check_keys(("start", "stop", "num"))
        for key in ("start", "stop", "num"):
            if key not in spec:
                raise ConfigError(f"measurement.powers: missing {key!r}", block.source, line)
        start = spec.quantity("start", "W")
        stop = spec.quantity("stop", "W")
        num = _integer(spec.value("num"), "measurement.powers.num", block.source, spec.lines["num"])
        if not (start > 0 and stop > 0 and num >= 1):
            raise ConfigError(
                "measurement.powers needs start, stop > 0 and num >= 1", block.source, line
            )
        return tuple(float(p) for p in np.geomspace(start, stop, num))
    values = block.value("powers")
    if not isinstance(values, list) or not values:
        raise block.error("powers", "expected a non-empty list or a {start, stop, num} mapping")
    powers = tuple(parse_quantity(v, "W", block.source, line) for v in values)
    if any(not p > 0 for p in powers):
        raise block.error("powers", f"powers must be positive, got {list(powers)}")
    return powers


def _parse_measurement(block: _Block) -> Tuple[MeasurementConfig, Tuple[float, ...]]:
    block.check_keys(MEASUREMENT_KEYS)
    kwargs = {"efficiency": DEFAULT_EFFICIENCY}
    if "efficiency" in block:
        kwargs["efficiency"] = block.quantity("efficiency", "")
    if "temperature_K" in block:
        kwargs["temperature"] = block.quantity("temperature_K", "K")
    if "n_avg" in block:
        kwargs["n_avg"] = _integer(
            block.value("n_avg"), "measurement.n_avg", block.source, block.lines["n_avg"]
        )
    if "injected_linewidth" in block:
        kwargs["injected_linewidth"] = block.quantity("injected_linewidth", "Hz", optional=True)
    if "grid" in block:
        grid = block.block("grid")
        grid.check_keys(GRID_KEYS)
        for key in ("freq_start", "freq_stop"):
            if key in grid:
                kwargs[key] = grid.quantity(key, "Hz", optional=True)
        if "n_bins" in grid:
            kwargs["n_bins"] = _integer(
                grid.value("n_bins"), "measurement.grid.n_bins", grid.source, grid.lines["n_bins"]
            )
        if "spacing" in grid:
            kwargs["spacing"] = grid.value("spacing")
    powers = _parse_powers(block)
    try:
        return MeasurementConfig(**kwargs), powers
    except ConfigError as e:
        raise ConfigError(str(e), block.source, block.line)


def _parse_options(block: _Block) -> Dict[str, Any]:
    block.check_keys(OPTION_KEYS)
    options = {}
    if "weighting" in block:
        weighting = block.value("weighting")
        if weighting not in WEIGHTINGS:
            raise block.error("weighting", f"expected one of {WEIGHTINGS}, got {weighting!r}")
        options["weighting"] = weighting
    if "unit" in block:
        unit = block.value("unit")
        try:
            options["unit"] = SpectrumUnit(unit)
        except ValueError:
            raise block.error("unit", f"expected displacement or phase, got {unit!r}")
    if "noise_free" in block:
        noise_free = block.value("noise_free")
        if not isinstance(noise_free, bool):
            raise block.error("noise_free", f"expected true or false, got {noise_free!r}")
        options["noise_free"] = noise_free
    return options


def parse_config(text: str, source: str = "<config>", base_dir: Optional[str] = None) -> RunConfig:
    """Parse the text of a project file; ``base_dir`` resolves ``system_config_path``."""
    node = _compose(text, source)
    if node is None:
        raise ConfigError("empty config", source)
    root = _Block(node, source, "config")
    root.check_keys(TOP_LEVEL_KEYS)
    changes: Dict[str, Any] = {"source": source}

    if "system" in root and "system_config_path" in root:
        raise root.error("system_config_path", "give either system or system_config_path")
    if "system" in root:
        changes["system"] = _parse_system(root.block("system"))
    elif "system_config_path" in root:
        path = root.value("system_config_path")
        if not isinstance(path, str):
            raise root.error("system_config_path", f"expected a path, got {path!r}")
        changes["system"] = _load_system_file(path, base_dir)

    if "measurement" in root:
        changes["measurement"], changes["powers"] = _parse_measurement(root.block("measurement"))
    if "seed" in root:
        try:
            changes["seed"] = check_seed(root.value("seed"))
        except (TypeError, ValueError) as e:
            raise root.error("seed", str(e))
    if "out_dir" in root:
        out_dir = root.value("out_dir")
        if not isinstance(out_dir, str):
            raise root.error("out_dir", f"expected a path, got {out_dir!r}")
        changes["out_dir"] = out_dir
    if "options" in root:
        changes.update(_parse_options(root.block("options")))
    return dataclasses.replace(RunConfig(), **changes)


def load_config(path: Optional[str] = None) -> RunConfig:
    """Load a project file; ``None`` gives the reference device at its reference operating point."""
    if path is None:
        return RunConfig()
    try:
        with open(path, "r", encoding="utf-8") as f:
            text = f.read()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e}", str(path))
    config = parse_config(text, source=str(path), base_dir=os.path.dirname(os.path.abspath(path)))
    logger.debug("loaded %s: %d power(s), seed=%d", path, len(config.powers), config.seed)
    return config
