"""Scenario resolution: built-in defaults, config files, CLI overrides.

A scenario is the full, reproducible input of one CLI run. Config files come
in three interchangeable forms: INI-style key/value text, the `# key = value`
metadata block of a CSV output, or the `scenario` object of a JSON report.
Precedence is defaults < config file < explicit CLI flags.
"""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass

from .errors import ArmdynError
from .model import ArmParams, Torques
from .stability import default_tol_zero

COMMANDS = ("fixed-points", "classify", "simulate", "portrait",
            "manifold-check", "normal-form", "sweep")

_GLOBAL_KEYS = ("m", "L", "g", "beta1", "beta2", "tol_zero", "format")

_COMMAND_KEYS: dict[str, tuple[str, ...]] = {
    "fixed-points": (),
    "classify": ("at", "state"),
    "simulate": ("state", "T", "step", "method", "tolerance"),
    "portrait": ("plane", "n_orbits", "T", "step", "at", "amplitude"),
    "manifold-check": ("manifold", "amplitude", "T", "step", "tol"),
    "normal-form": ("at",),
    "sweep": ("beta1_lo", "beta1_hi", "beta2_lo", "beta2_hi", "n1", "n2"),
}

# coercion tags; state4 is four comma-separated floats
_KEY_TYPES: dict[str, str] = {
    "m": "float", "L": "float", "g": "float", "beta1": "float", "beta2": "float",
    "tol_zero": "float", "format": "str", "at": "str", "state": "state4",
    "T": "float", "step": "float", "method": "str", "tolerance": "float",
    "plane": "str", "n_orbits": "int", "amplitude": "float",
    "manifold": "str", "tol": "float",
    "beta1_lo": "float", "beta1_hi": "float", "beta2_lo": "float",
    "beta2_hi": "float", "n1": "int", "n2": "int",
}

_INI_SECTIONS = {"arm": ("m", "L", "g"), "torques": ("beta1", "beta2")}

FORMATS = ("csv", "json")
BRANCH_LABELS = ("P1", "P2", "P3", "P4")
PLANES = ("manifold-M1", "manifold-M2", "normal-xpx", "normal-ypy")
MANIFOLD_NAMES = ("M1", "M2")
METHOD_NAMES = ("midpoint", "adaptive")


class ConfigError(ArmdynError):
    """Invalid scenario input; `key` names the offending entry when known."""

    def __init__(self, message: str, key: str | None = None):
        super().__init__(message)
        self.key = key


@dataclass(frozen=True)
class Scenario:
    """Resolved input of one CLI run; `options` holds command-specific keys."""

    command: str
    params: ArmParams
    torques: Torques
    tol_zero: float
    format: str
    options: dict

    def echo(self) -> dict:
        """Insertion-ordered scenario dump embedded in every output file."""
        doc: dict = {"command": self.command, "m": self.params.m,
                     "L": self.params.L, "g": self.params.g,
                     "beta1": self.torques.beta1, "beta2": self.torques.beta2,
                     "tol_zero": self.tol_zero, "format": self.format}
        for key in _COMMAND_KEYS[self.command]:
            value = self.options.get(key)
            if value is not None:
                doc[key] = value
        return doc


def _coerce(key: str, value) -> object:
    kind = _KEY_TYPES[key]
    try:
        if kind == "float":
            return float(value)
        if kind == "int":
            if isinstance(value, float) and value != int(value):
                raise ValueError(value)
            return int(value)
        if kind == "state4":
            if isinstance(value, str):
                parts = [p for p in value.split(",")]
            else:
                parts = list(value)
            if len(parts) != 4:
                raise ValueError(value)
            return tuple(float(p) for p in parts)
        return str(value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid value for key '{key}': {value!r}", key=key) from exc


def _meta_block_values(text: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for line in text.splitlines():
        if not line.startswith("#"):
            if values:
                break
            continue
        body = line[1:].strip()
        if " = " in body:
            key, _, raw = body.partition(" = ")
            values[key.strip()] = raw.strip()
    return values


def _ini_values(text: str, path: str) -> dict[str, str]:
    cp = configparser.ConfigParser()
    cp.optionxform = str  # keep the capital L distinct from l
    try:
        cp.read_string(text, source=path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse config file {path}: {exc}") from exc
    values: dict[str, str] = {}
    for section in cp.sections():
        if section not in _INI_SECTIONS and section != "run":
            raise ConfigError(f"unknown config section '{section}' in {path}",
                              key=section)
        for key, raw in cp.items(section):
            if section in _INI_SECTIONS and key not in _INI_SECTIONS[section]:
                raise ConfigError(f"unknown config key '{key}' in section "
                                  f"[{section}]", key=key)
            values[key] = raw
    return values


def load_config_values(path: str) -> dict[str, object]:
    """Read scenario keys from an INI file, a CSV echo block, or a JSON report."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        doc = json.loads(text)
        raw = doc.get("scenario", doc)
        if not isinstance(raw, dict):
            raise ConfigError(f"JSON config {path} has no scenario object")
        return dict(raw)
    if stripped.startswith("#"):
        return dict(_meta_block_values(text))
    return dict(_ini_values(text, path))


def _validated(command: str, key: str, value):
    if key == "format" and value not in FORMATS:
        raise ConfigError(f"invalid value for key 'format': {value!r} "
                          f"(choose from {FORMATS})", key=key)
    if key == "at" and value not in BRANCH_LABELS:
        raise ConfigError(f"invalid value for key 'at': {value!r} "
                          f"(choose from {BRANCH_LABELS})", key=key)
    if key == "plane" and value not in PLANES:
        raise ConfigError(f"invalid value for key 'plane': {value!r} "
                          f"(choose from {PLANES})", key=key)
    if key == "manifold" and value not in MANIFOLD_NAMES:
        raise ConfigError(f"invalid value for key 'manifold': {value!r} "
                          f"(choose from {MANIFOLD_NAMES})", key=key)
    if key == "method" and value not in METHOD_NAMES:
        raise ConfigError(f"invalid value for key 'method': {value!r} "
                          f"(choose from {METHOD_NAMES})", key=key)
    if key in ("n_orbits", "n1", "n2") and value < 2:
        raise ConfigError(f"key '{key}' must be at least 2, got {value}", key=key)
    if key in ("T", "step", "tol", "tolerance", "tol_zero") and value <= 0.0:
        raise ConfigError(f"key '{key}' must be positive, got {value}", key=key)
    return value


def _command_defaults(command: str, params: ArmParams) -> dict[str, object]:
    mgl = params.mgl
    if command == "classify":
        return {"at": "P1", "state": None}
    if command == "simulate":
        return {"state": (0.01, 0.0, 0.01, 0.0), "T": 10.0, "step": 1e-3,
                "method": "midpoint", "tolerance": None}
    if command == "portrait":
        return {"plane": "manifold-M1", "n_orbits": 9, "T": 20.0, "step": 1e-2,
                "at": "P2", "amplitude": 0.05}
    if command == "manifold-check":
        return {"manifold": "M1", "amplitude": 0.3, "T": 10.0, "step": 1e-3,
                "tol": 1e-6}
    if command == "normal-form":
        return {"at": "P2"}
    if command == "sweep":
        return {"beta1_lo": -3.0 * mgl, "beta1_hi": 3.0 * mgl,
                "beta2_lo": -1.5 * mgl, "beta2_hi": 1.5 * mgl,
                "n1": 101, "n2": 101}
    return {}


def resolve_scenario(command: str, cli_values: dict,
                     config_path: str | None) -> Scenario:
    """Merge defaults, config file, and explicit CLI values into a Scenario.

    `cli_values` holds only flags the user actually passed (None means unset).
    Raises ConfigError on unknown keys, bad values, or a config written for a
    different command.
    """
    allowed = set(_GLOBAL_KEYS) | set(_COMMAND_KEYS[command])
    file_values: dict[str, object] = {}
    if config_path is not None:
        for key, raw in load_config_values(config_path).items():
            if key == "command":
                if str(raw) != command:
                    raise ConfigError(f"config file is for command '{raw}', "
                                      f"not '{command}'", key=key)
                continue
            if key not in allowed:
                raise ConfigError(f"unknown config key '{key}' for command "
                                  f"'{command}'", key=key)
            file_values[key] = _coerce(key, raw)

    merged: dict[str, object] = {"m": 1.0, "L": 1.0, "g": 9.81,
                                 "beta1": 0.0, "beta2": 0.0,
                                 "tol_zero": None, "format": "csv"}
    merged.update(file_values)
    for key, value in cli_values.items():
        if value is None:
            continue
        if key not in allowed:
            raise ConfigError(f"unknown config key '{key}' for command "
                              f"'{command}'", key=key)
        merged[key] = _coerce(key, value)

    try:
        params = ArmParams(m=float(merged["m"]), L=float(merged["L"]),
                           g=float(merged["g"]))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    torques = Torques(beta1=float(merged["beta1"]), beta2=float(merged["beta2"]))
    tol_zero = merged["tol_zero"]
    if tol_zero is None:
        tol_zero = default_tol_zero(params)
    fmt = _validated(command, "format", merged["format"])
    _validated(command, "tol_zero", float(tol_zero))

    options = _command_defaults(command, params)
    for key in _COMMAND_KEYS[command]:
        if key in merged:
            options[key] = merged[key]
    for key, value in options.items():
        if value is not None:
            _validated(command, key, value)
    return Scenario(command=command, params=params, torques=torques,
                    tol_zero=float(tol_zero), format=str(fmt), options=options)
