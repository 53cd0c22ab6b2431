"""Run configuration: an INI document where every physical value carries a unit.

    [frame]
    t_in = 300 ns

Bare numbers for physical quantities are rejected, as are unknown sections
and keys.  Missing sections fall back to the bundled defaults with a warning.
"""

from __future__ import annotations

import configparser
import logging
import math
import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .analysis import NeuronSetup, TrialConfig
from .devices import SubthresholdParams, VariationModel
from .energy import EnergyParams
from .errors import ConfigError, TactError
from .neuron import NeuronConfig
from .signal import TimingFrame

log = logging.getLogger(__name__)

_PREFIX = {"a": 1e-18, "f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "μ": 1e-6,
           "m": 1e-3, "": 1.0, "k": 1e3, "M": 1e6, "G": 1e9}
_BASE = {"time": "s", "capacitance": "F", "voltage": "V", "current": "A",
         "power": "W", "energy": "J", "frequency": "Hz"}
_QUANTITY = re.compile(r"^\s*([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*([a-zA-Zµμ]+)\s*$")

# section -> key -> kind; kind is a dimension name or one of int/float/bool/str
SCHEMA = {
    "frame": {"t_in": "time", "t_out": "time", "tick": "time?"},
    "neuron": {"c_d": "capacitance", "c_n": "capacitance", "v_theta": "voltage",
               "v_dd": "voltage", "settle_v": "voltage?"},
    "device": {"i0": "current", "v_w": "voltage", "slope_norm": "voltage", "ideal_off": "bool"},
    "variation": {"sigma_vth": "voltage", "jitter_sigma": "time", "seed": "int"},
    "energy": {"c_gate": "capacitance", "p_cmp": "power",
               "e_switch_mac": "energy?", "e_switch_vpc": "energy?"},
    "array": {"n_inputs": "int", "n_neurons": "int", "weights": "str",
              "input_level": "float", "freq": "frequency"},
    "experiment": {"n_inputs": "int", "n_trials": "int", "averaging_runs": "int", "seed": "int",
                   "sweep_points": "int", "sweep_index": "int"},
}
WEIGHT_PATTERNS = ("plus", "minus", "alternating", "random")


def parse_quantity(text: str, dimension: str) -> float:
    """``'300 ns'`` -> ``3e-7``; the unit must match ``dimension``."""
    m = _QUANTITY.match(text)
    if not m:
        raise ConfigError(f"expected '<number> <unit>' for a {dimension}, got {text!r}")
    number, unit = m.groups()
    base = _BASE[dimension]
    if not unit.endswith(base) or unit[: -len(base)] not in _PREFIX:
        raise ConfigError(f"unit {unit!r} is not a {dimension} unit (expected e.g. n{base})")
    value = float(number) * _PREFIX[unit[: -len(base)]]
    if not math.isfinite(value):
        raise ConfigError(f"non-finite quantity {text!r}")
    return value


def _parse_value(section: str, key: str, kind: str, raw: str):
    optional = kind.endswith("?")
    kind = kind.rstrip("?")
    raw = raw.strip()
    if optional and raw.lower() in ("", "none", "off"):
        return None
    try:
        if kind == "int":
            return int(raw)
        if kind == "float":
            return float(raw)
        if kind == "bool":
            if raw.lower() in ("true", "yes", "on", "1"):
                return True
            if raw.lower() in ("false", "no", "off", "0"):
                return False
            raise ValueError(raw)
        if kind == "str":
            return raw
    except ValueError:
        raise ConfigError(f"[{section}] {key}: cannot parse {raw!r} as {kind}") from None
    try:
        return parse_quantity(raw, kind)
    except ConfigError as exc:
        raise ConfigError(f"[{section}] {key}: {exc}") from None


@dataclass(frozen=True)
class ArrayConfig:
    n_inputs: int
    n_neurons: int
    weights: str
    input_level: float
    freq: float

    def __post_init__(self):
        if self.n_inputs < 1 or self.n_neurons < 1:
            raise ConfigError("array dimensions must be >= 1")
        if self.weights not in WEIGHT_PATTERNS:
            raise ConfigError(f"weights must be one of {WEIGHT_PATTERNS}, got {self.weights!r}")
        if not 0 <= self.input_level <= 1:
            raise ConfigError(f"input_level must lie in [0, 1], got {self.input_level!r}")
        if not self.freq > 0:
            raise ConfigError(f"freq must be > 0, got {self.freq!r}")


@dataclass(frozen=True)
class ExperimentConfig:
    n_inputs: int
    n_trials: int
    averaging_runs: int
    seed: int
    sweep_points: int
    sweep_index: int


@dataclass(frozen=True)
class RunConfig:
    frame: TimingFrame
    neuron: NeuronConfig
    device: SubthresholdParams
    variation: VariationModel
    energy: EnergyParams
    array: ArrayConfig
    experiment: ExperimentConfig

    def setup(self) -> NeuronSetup:
        return NeuronSetup(self.neuron, self.device)

    def trial_config(self) -> TrialConfig:
        e = self.experiment
        return TrialConfig(e.n_trials, e.n_inputs, self.variation, e.averaging_runs, e.seed)

    def weight_matrix(self, n_neurons: int | None = None, n_inputs: int | None = None) -> np.ndarray:
        rows = n_neurons or self.array.n_neurons
        cols = n_inputs or self.array.n_inputs
        pattern = self.array.weights
        if pattern == "plus":
            return np.ones((rows, cols), dtype=np.int8)
        if pattern == "minus":
            return -np.ones((rows, cols), dtype=np.int8)
        if pattern == "alternating":
            return np.where(np.arange(cols) % 2 == 0, 1, -1)[None, :].repeat(rows, 0).astype(np.int8)
        rng = np.random.default_rng(self.experiment.seed)
        return (rng.integers(0, 2, size=(rows, cols)) * 2 - 1).astype(np.int8)

    def with_seed(self, seed: int) -> RunConfig:
        from dataclasses import replace
        return replace(self, experiment=replace(self.experiment, seed=seed))


def default_config_text() -> str:
    return resources.files("tactpwm").joinpath("data/default.cfg").read_text()


def bundled_config_path(name: str) -> Path:
    return Path(str(resources.files("tactpwm").joinpath(f"data/{name}")))


def _read_ini(text: str, source: str) -> configparser.ConfigParser:
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    parser.optionxform = str
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return parser


def load_config(path=None, text: str | None = None) -> RunConfig:
    """Load a config file (or ``text``) layered over the bundled defaults."""
    defaults = _read_ini(default_config_text(), "default.cfg")
    if text is None and path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from None
    source = str(path) if path is not None else "<config>"
    user = _read_ini(text, source) if text is not None else None

    values: dict[str, dict] = {}
    for section, keys in SCHEMA.items():
        values[section] = {k: _parse_value(section, k, kind, defaults[section][k])
                           for k, kind in keys.items() if k in defaults[section]}
    if user is not None:
        for section in user.sections():
            if section not in SCHEMA:
                raise ConfigError(f"{source}: unknown section [{section}]")
            for key, raw in user[section].items():
                if key not in SCHEMA[section]:
                    raise ConfigError(f"{source}: unknown key {key!r} in [{section}]")
                values[section][key] = _parse_value(section, key, SCHEMA[section][key], raw)
        for section in SCHEMA:
            if not user.has_section(section):
                log.warning("%s: no [%s] section; using defaults", source, section)
    try:
        return _build(values)
    except TactError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def _build(v: dict) -> RunConfig:
    f, n, d, var, en = v["frame"], v["neuron"], v["device"], v["variation"], v["energy"]
    frame = TimingFrame(f["t_in"], f["t_out"], f.get("tick"))
    neuron = NeuronConfig(n["c_d"], n["c_n"], n["v_theta"], n["v_dd"], frame, n.get("settle_v"))
    device = SubthresholdParams(d["i0"], n["v_dd"], d["v_w"], d["slope_norm"], d["ideal_off"])
    variation = VariationModel(var["sigma_vth"], var["jitter_sigma"], var["seed"])
    e_gate = en["c_gate"] * n["v_dd"] ** 2
    energy = EnergyParams(
        e_switch_mac=en["e_switch_mac"] if en.get("e_switch_mac") is not None else e_gate,
        e_switch_vpc=en["e_switch_vpc"] if en.get("e_switch_vpc") is not None else e_gate,
        p_cmp=en["p_cmp"],
    )
    exp = ExperimentConfig(**v["experiment"])
    if exp.n_trials < 1 or exp.averaging_runs < 1 or exp.n_inputs < 1 or exp.sweep_points < 2:
        raise ConfigError("experiment counts must be >= 1 (sweep_points >= 2)")
    return RunConfig(frame, neuron, device, variation, energy, ArrayConfig(**v["array"]), exp)
