"""Run configuration: TOML parsing, strict validation, model construction.

Configs are TOML files with four sections (noise, oscillator, numerics,
output).  Parsing is strict: any key not in the schema is rejected with the
offending dotted path named, and every numeric value has a documented range.
Float parsing is TOML's, i.e. plain decimal strings, locale independent;
`beta = inf` is accepted for effectively empty (zero temperature) baths.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError
from .noise import NoiseComponent, NoiseModel
from .oscillator import OscillatorModel
from .presets import preset_config

_COMPONENT_KEYS = {
    "classical_1f": {"kind", "gamma"},
    "superohmic": {"kind", "gamma", "s", "beta"},
    "flat": {"kind", "gamma", "beta"},
    "tabulated": {"kind", "table"},
}

_SCHEMA = {
    "noise": {"omega_min", "omega_max", "components"},
    "oscillator": {"omega", "chi", "nonlinearity", "n_max"},
    "numerics": {"tail_tol", "quad_tol", "memory_step", "memory_horizon",
                 "n_max_cap"},
    "output": {"dir", "plot"},
}

_NUMERICS_DEFAULTS = {
    "tail_tol": 1e-12,
    "quad_tol": 1e-10,
    "memory_step": 0.01,
    "memory_horizon": 50.0,
    "n_max_cap": 512,
}


def _require(cond, msg):
    if not cond:
        raise ConfigError(msg)


def _check_keys(mapping, allowed, path):
    for key in mapping:
        if key not in allowed:
            label = f"{path}.{key}" if path else key
            raise ConfigError(f"unknown configuration key '{label}'")


def _deep_merge(base, extra):
    out = dict(base)
    for key, val in extra.items():
        if isinstance(val, dict) and isinstance(out.get(key), dict):
            out[key] = _deep_merge(out[key], val)
        else:
            out[key] = val
    return out


@dataclass(frozen=True)
class RunConfig:
    """Resolved configuration plus the constructed physics objects."""

    raw: dict
    noise: NoiseModel
    oscillator: OscillatorModel
    numerics: dict
    out_dir: Path
    plot: bool
    base_dir: Path = field(default_factory=Path)

    @property
    def config_hash(self):
        return hashlib.sha256(
            json.dumps(self.raw, sort_keys=True).encode()).hexdigest()[:16]


def load_toml(path):
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid TOML: {exc}")


def _build_component(entry, idx, base_dir):
    _require(isinstance(entry, dict), f"noise.components[{idx}] must be a table")
    kind = entry.get("kind")
    _require(kind in _COMPONENT_KEYS,
             f"noise.components[{idx}].kind must be one of "
             f"{sorted(_COMPONENT_KEYS)}, got {kind!r}")
    _check_keys(entry, _COMPONENT_KEYS[kind], f"noise.components[{idx}]")
    try:
        if kind == "classical_1f":
            return NoiseComponent.classical_1f(float(entry["gamma"]))
        if kind == "superohmic":
            return NoiseComponent.superohmic(float(entry["gamma"]),
                                             float(entry["s"]),
                                             float(entry["beta"]))
        if kind == "flat":
            return NoiseComponent.flat(float(entry["gamma"]),
                                       float(entry["beta"]))
        table_path = base_dir / str(entry["table"])
        _require(table_path.exists(),
                 f"noise.components[{idx}].table file not found: {table_path}")
        data = np.loadtxt(table_path, comments="#", ndmin=2)
        _require(data.shape[1] == 3,
                 f"tabulated noise file {table_path} must have 3 columns "
                 f"(omega, w_s, w_a)")
        return NoiseComponent.tabulated(data[:, 0], data[:, 1], data[:, 2])
    except KeyError as exc:
        raise ConfigError(f"noise.components[{idx}] is missing key {exc}")
    except ValueError as exc:
        raise ConfigError(f"noise.components[{idx}]: {exc}")


def _build_noise(section, base_dir):
    _check_keys(section, _SCHEMA["noise"], "noise")
    _require("components" in section, "noise.components is required")
    comps = [_build_component(c, i, base_dir)
             for i, c in enumerate(section["components"])]
    try:
        return NoiseModel(components=tuple(comps),
                          omega_min=float(section.get("omega_min", 0.01)),
                          omega_max=float(section.get("omega_max", 50.0)))
    except ValueError as exc:
        raise ConfigError(f"noise: {exc}")


def _build_oscillator(section, base_dir):
    _check_keys(section, _SCHEMA["oscillator"], "oscillator")
    _require("omega" in section, "oscillator.omega is required")
    nonlin = section.get("nonlinearity", "kerr")
    if isinstance(nonlin, str) and nonlin != "kerr":
        table_path = base_dir / nonlin
        _require(table_path.exists(),
                 f"oscillator.nonlinearity table file not found: {table_path}")
        data = np.loadtxt(table_path, comments="#", ndmin=2)
        _require(data.shape[1] == 2,
                 f"nonlinearity file {table_path} must have 2 columns (n, U)")
        _require(np.array_equal(data[:, 0], np.arange(len(data))),
                 f"nonlinearity file {table_path} must list n = 0, 1, 2, ... "
                 f"in order")
        nonlin = data[:, 1]
    n_max = section.get("n_max")
    try:
        return OscillatorModel(omega=float(section["omega"]),
                               chi=float(section.get("chi", 0.0)),
                               nonlinearity=nonlin,
                               n_max=None if n_max is None else int(n_max))
    except ValueError as exc:
        raise ConfigError(f"oscillator: {exc}")


def _build_numerics(section):
    _check_keys(section, _SCHEMA["numerics"], "numerics")
    out = dict(_NUMERICS_DEFAULTS)
    out.update(section)
    _require(0 < out["tail_tol"] < 1, "numerics.tail_tol must be in (0, 1)")
    _require(0 < out["quad_tol"] <= 1e-2, "numerics.quad_tol must be in (0, 1e-2]")
    _require(out["memory_step"] > 0, "numerics.memory_step must be > 0")
    _require(out["memory_horizon"] > out["memory_step"],
             "numerics.memory_horizon must exceed memory_step")
    _require(1 <= int(out["n_max_cap"]) <= 100000,
             "numerics.n_max_cap must be in [1, 100000]")
    out["n_max_cap"] = int(out["n_max_cap"])
    return out


def resolve_config(config_path=None, preset=None, out_dir=None, plot=None):
    """Merge defaults, an optional preset, and an optional TOML file.

    The file overrides the preset key by key; component lists replace
    wholesale.  Returns a RunConfig with constructed model objects.
    """
    raw = {"noise": {"components": []}, "oscillator": {}, "numerics": {},
           "output": {}}
    if preset is not None:
        try:
            raw = _deep_merge(raw, preset_config(preset))
        except KeyError as exc:
            raise ConfigError(str(exc.args[0]))
    base_dir = Path(".")
    if config_path is not None:
        data = load_toml(config_path)
        _check_keys(data, set(_SCHEMA), "")
        for section in data:
            _check_keys(data[section],
                        _SCHEMA[section],
                        section)
        raw = _deep_merge(raw, data)
        base_dir = Path(config_path).parent
    noise = _build_noise(raw["noise"], base_dir)
    oscillator = _build_oscillator(raw["oscillator"], base_dir)
    numerics = _build_numerics(raw.get("numerics", {}))
    resolved_out = Path(out_dir if out_dir is not None
                        else raw.get("output", {}).get("dir", "out"))
    resolved_plot = plot if plot is not None else bool(
        raw.get("output", {}).get("plot", False))
    canonical = {
        "noise": raw["noise"],
        "oscillator": {k: (v if not isinstance(v, np.ndarray) else v.tolist())
                       for k, v in raw["oscillator"].items()},
        "numerics": numerics,
    }
    return RunConfig(raw=canonical, noise=noise, oscillator=oscillator,
                     numerics=numerics, out_dir=resolved_out,
                     plot=resolved_plot, base_dir=base_dir)
