"""Run configuration: loading, validation and unit normalization.

A config is a YAML or JSON mapping::

    mode: sweep                 # point | profile | sweep
    units: normalized           # normalized | si
    omega_m_si: 6.283185307e7   # optional; enables effective temperatures
    params: {G1: 1.0}           # SystemParams fields, defaults fill the rest
    setup: {...}                # optional PhysicalSetup fields (units: si only)
    profile: {omega_min: -3, omega_max: 3, n_samples: 6001}
    sweep: {param: G1, start: 0.1, stop: 10, num: 200, scale: log}
    output: {path: out.csv, format: csv}
    threads: 1

Every rate is divided by ``omega_m`` on ingestion, so all downstream work
happens with ``omega_m = 1``. Sweep and profile ranges are given in units of
``omega_m``.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .errors import ConfigError, ParameterError
from .model import (PhysicalSetup, SystemParams, derive_params, effective_detuning)

__all__ = ["ProfileSpec", "SweepSpec", "RunConfig", "load_config", "parse_config",
           "MODES", "FORMATS", "REFERENCE_OMEGA_M_SI"]

MODES = ("point", "profile", "sweep")
FORMATS = ("csv", "json")
REFERENCE_OMEGA_M_SI = 2 * math.pi * 10e6

_PARAM_FIELDS = tuple(f.name for f in fields(SystemParams))
_SETUP_FIELDS = tuple(f.name for f in fields(PhysicalSetup))
_SETUP_DERIVED = ("G", "G1", "G2", "delta_f")
_TOP_KEYS = ("mode", "units", "omega_m_si", "params", "setup", "profile", "sweep",
             "output", "threads")


@dataclass(frozen=True)
class ProfileSpec:
    omega_min: float = -3.0
    omega_max: float = 3.0
    n_samples: int = 6001


@dataclass(frozen=True)
class SweepSpec:
    param: str = "G1"
    start: float = 0.1
    stop: float = 10.0
    num: int = 200
    scale: str = "log"

    def values(self) -> np.ndarray:
        if self.scale == "log":
            return np.geomspace(self.start, self.stop, self.num)
        return np.linspace(self.start, self.stop, self.num)


@dataclass(frozen=True)
class RunConfig:
    params: SystemParams  # normalized, omega_m == 1
    mode: str = "point"
    omega_m_si: Optional[float] = None
    profile: ProfileSpec = ProfileSpec()
    sweep: Optional[SweepSpec] = None
    output_path: Optional[str] = None
    output_format: str = "csv"
    threads: int = 1


def _mapping(value, path):
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise ConfigError(path, "must be a mapping")
    return value


def _unknown(mapping, allowed, path):
    for key in mapping:
        if key not in allowed:
            where = f"{path}.{key}" if path else str(key)
            raise ConfigError(where, f"unknown key (allowed: {', '.join(allowed)})")


def _number(value, path, *, positive=False, integer=False):
    if isinstance(value, bool):
        raise ConfigError(path, f"expected a number, got {value!r}")
    try:
        x = float(value)
    except (TypeError, ValueError):
        raise ConfigError(path, f"expected a number, got {value!r}") from None
    if not math.isfinite(x):
        raise ConfigError(path, "must be finite")
    if positive and not x > 0:
        raise ConfigError(path, "must be > 0")
    if integer:
        if x != int(x):
            raise ConfigError(path, "must be an integer")
        return int(x)
    return x


def _build_params(doc, units):
    raw = _mapping(doc.get("params"), "params")
    _unknown(raw, _PARAM_FIELDS, "params")
    given = {k: _number(v, f"params.{k}") for k, v in raw.items()}

    if units == "si":
        omega_m = given.get("omega_m", REFERENCE_OMEGA_M_SI)
    else:
        omega_m = given.get("omega_m", 1.0)
    if not omega_m > 0:
        raise ConfigError("params.omega_m", "must be > 0")

    setup_raw = doc.get("setup")
    if setup_raw is not None:
        setup_raw = _mapping(setup_raw, "setup")
        if units != "si":
            raise ConfigError("setup", "physical setups require 'units: si'")
        _unknown(setup_raw, _SETUP_FIELDS, "setup")
        clash = [k for k in _SETUP_DERIVED if k in given]
        if clash:
            raise ConfigError(f"params.{clash[0]}", "is derived from 'setup' and may not be given")
        values = {k: _number(v, f"setup.{k}") for k, v in setup_raw.items()}
        try:
            setup = PhysicalSetup(**values)
            c = derive_params(setup, omega_m)
        except TypeError as exc:
            raise ConfigError("setup", str(exc)) from None
        except ParameterError as exc:
            raise ConfigError(f"setup.{exc.field}", str(exc)) from None
        given.update(G=c.G, G1=c.G1, G2=c.G2,
                     delta_f=effective_detuning(c.delta0, c.G, omega_m))

    defaults = SystemParams()
    normalized = {}
    for name in _PARAM_FIELDS:
        if name == "n_th":
            normalized[name] = given.get(name, defaults.n_th)
        elif name in given:
            normalized[name] = given[name] / omega_m
        else:
            normalized[name] = getattr(defaults, name)
    try:
        return SystemParams(**normalized), omega_m
    except ParameterError as exc:
        raise ConfigError(f"params.{exc.field}", str(exc)) from None


def _build_sweep(raw, params):
    raw = _mapping(raw, "sweep")
    _unknown(raw, ("param", "start", "stop", "num", "scale"), "sweep")
    param = raw.get("param", "G1")
    if param not in _PARAM_FIELDS or param == "omega_m":
        raise ConfigError("sweep.param", f"cannot sweep {param!r}")
    if param == "G1":
        start, stop = 0.1, 10.0
    elif param == "G2":
        start, stop = 0.1, 0.99 * math.sqrt(params.kappa * params.gamma2)
    else:
        start = stop = None
    if "start" in raw:
        start = _number(raw["start"], "sweep.start")
    if "stop" in raw:
        stop = _number(raw["stop"], "sweep.stop")
    if start is None or stop is None:
        raise ConfigError("sweep", f"start and stop are required when sweeping {param}")
    if not start < stop:
        raise ConfigError("sweep.stop", "range must satisfy start < stop")
    num = _number(raw.get("num", 200), "sweep.num", integer=True)
    if num < 2:
        raise ConfigError("sweep.num", "need at least 2 samples")
    scale = raw.get("scale", "log")
    if scale not in ("log", "linear"):
        raise ConfigError("sweep.scale", "must be 'log' or 'linear'")
    if scale == "log" and not start > 0:
        raise ConfigError("sweep.start", "log sweeps need start > 0")
    spec = SweepSpec(param, start, stop, num, scale)
    # reject ranges that would produce invalid parameters before running anything
    for v in (start, stop):
        try:
            params.replace(**{param: v})
        except ParameterError as exc:
            raise ConfigError("sweep", f"range endpoint {v:g} invalid: {exc}") from None
    return spec


def _build_profile(raw):
    raw = _mapping(raw, "profile")
    _unknown(raw, ("omega_min", "omega_max", "n_samples"), "profile")
    d = ProfileSpec()
    lo = _number(raw.get("omega_min", d.omega_min), "profile.omega_min")
    hi = _number(raw.get("omega_max", d.omega_max), "profile.omega_max")
    n = _number(raw.get("n_samples", d.n_samples), "profile.n_samples", integer=True)
    if not lo < hi:
        raise ConfigError("profile.omega_max", "must exceed omega_min")
    if n < 2:
        raise ConfigError("profile.n_samples", "need at least 2 samples")
    return ProfileSpec(lo, hi, n)


def parse_config(doc) -> RunConfig:
    """Validate a decoded config mapping and normalize it."""
    doc = _mapping(doc, "")
    _unknown(doc, _TOP_KEYS, "")
    mode = doc.get("mode", "point")
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {', '.join(MODES)}")
    units = doc.get("units", "normalized")
    if units not in ("normalized", "si"):
        raise ConfigError("units", "must be 'normalized' or 'si'")

    params, omega_m = _build_params(doc, units)
    if units == "si":
        omega_m_si = omega_m
        if "omega_m_si" in doc:
            raise ConfigError("omega_m_si", "redundant with 'units: si' (use params.omega_m)")
    elif "omega_m_si" in doc:
        omega_m_si = _number(doc["omega_m_si"], "omega_m_si", positive=True)
    else:
        omega_m_si = None

    sweep = None
    if mode == "sweep" or "sweep" in doc:
        sweep = _build_sweep(doc.get("sweep"), params)

    out = _mapping(doc.get("output"), "output")
    _unknown(out, ("path", "format"), "output")
    fmt = out.get("format", "csv")
    if fmt not in FORMATS:
        raise ConfigError("output.format", f"must be one of {', '.join(FORMATS)}")
    threads = _number(doc.get("threads", 1), "threads", integer=True)
    if threads < 1:
        raise ConfigError("threads", "must be >= 1")

    return RunConfig(
        params=params,
        mode=mode,
        omega_m_si=omega_m_si,
        profile=_build_profile(doc.get("profile")),
        sweep=sweep,
        output_path=out.get("path"),
        output_format=fmt,
        threads=threads,
    )


def load_config(path) -> RunConfig:
    """Read a ``.yaml``/``.yml`` or ``.json`` file and validate it."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(str(path), f"cannot read config: {exc.strerror}") from None
    try:
        if path.suffix == ".json":
            doc = json.loads(text)
        else:
            doc = yaml.safe_load(text)
    except (json.JSONDecodeError, yaml.YAMLError) as exc:
        raise ConfigError(str(path), f"cannot parse config: {exc}") from None
    return parse_config(doc)
