"""YAML run configuration: schema, normalization, dotted overrides and object building."""

from __future__ import annotations

import copy
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np
import yaml

from .core import (FluidParams, Grid, InitialCondition, Kinetics, ModelSpec, RunConfig,
                   SignalKinetics, SpeciesParams, field_names, homogeneous_steady_state, validate)
from .errors import ChemotaxError, ConfigError, UnknownKey

REQUIRED = object()

KINETICS = {"variant": "none", "r": 0.0, "K": 1.0, "A": None}
SPECIES = {"D": REQUIRED, "chi": 0.0, "kinetics": KINETICS}
SIGNAL = {"alpha": REQUIRED, "beta": REQUIRED, "D_v": REQUIRED}
FLUID = {"nu": REQUIRED, "kappa": REQUIRED, "gravity_axis": [0.0, -1.0]}
MODEL = {"family": REQUIRED, "species": [SPECIES], "signal": SIGNAL, "fluid": FLUID}
GRID = {"dim": REQUIRED, "n": REQUIRED, "L": REQUIRED, "bc": "periodic"}
IC = {"variant": "uniform_noise", "base": None, "amplitude": 0.0, "center": None,
      "width": 1.0, "peak": None}
SWEEP = {"chi_start": 0.0, "chi_stop": 0.0, "chi_step": 0.5, "chis": None, "species_index": 0}
LYAPUNOV = {"ic": [0.5, 0.5], "t_final": 1000.0, "dt": 0.01, "renorm_every": 10}
PROBE = {"kind": "critical_mass", "mass_ratios": [0.5, 3.0], "width": 0.3, "chi": None}
STABILITY = {"chis": None, "k_hi": None, "n_samples": 2048, "base": None}

SCHEMA = {
    "stepper": "etdrk4", "dt": 1e-3, "t_final": 1.0, "snapshot_every": 100, "clip": None,
    "blowup_threshold": 1e6, "rng_seed": 0, "dealias": None, "record_midpoint": False,
    "grid": GRID, "model": MODEL, "ic": IC, "sweep": SWEEP, "lyapunov": LYAPUNOV,
    "probe": PROBE, "stability": STABILITY,
}
# optional sections that may be null in the file
NULLABLE = {"model.fluid"}
# output-only section written by runs; accepted and ignored on input
RESULT_KEY = "result"


@dataclass
class Config:
    """Parsed configuration: the run plus per-subcommand sections (plain dicts)."""

    raw: dict
    run: RunConfig
    sweep: dict
    lyapunov: dict
    probe: dict
    stability: dict

    def to_yaml(self, extra: Optional[dict] = None) -> str:
        return dump_yaml(self.raw, extra)


def _is_record_list(schema):
    return isinstance(schema, list) and bool(schema) and isinstance(schema[0], dict)


def _normalize(data, schema, path):
    if isinstance(schema, dict):
        if data is None:
            data = {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path or 'config'}: expected a mapping", key=path)
        for k in data:
            if k not in schema:
                full = f"{path}.{k}" if path else str(k)
                raise UnknownKey(f"unknown key: {full}", key=full)
        out = {}
        for k, sub in schema.items():
            full = f"{path}.{k}" if path else k
            if k in data:
                if data[k] is None and full in NULLABLE:
                    out[k] = None
                else:
                    out[k] = _normalize(data[k], sub, full)
            elif sub is REQUIRED or _is_record_list(sub):
                raise ConfigError(f"missing required key: {full}", key=full)
            elif isinstance(sub, dict):
                out[k] = None if full in NULLABLE else _normalize({}, sub, full)
            else:
                out[k] = copy.deepcopy(sub)
        return out
    if _is_record_list(schema):
        if not isinstance(data, list):
            raise ConfigError(f"{path}: expected a list", key=path)
        return [_normalize(d, schema[0], f"{path}.{i}") for i, d in enumerate(data)]
    return data


def normalize(data: dict) -> dict:
    """Fill defaults and reject unknown keys (``UnknownKey`` names the full path)."""
    data = dict(data or {})
    data.pop(RESULT_KEY, None)
    return _normalize(data, SCHEMA, "")


def apply_overrides(raw: dict, overrides) -> dict:
    """Apply ``a.b.0.c=value`` overrides to a normalized config dict (copied)."""
    out = copy.deepcopy(raw)
    for item in overrides or ():
        if "=" not in item:
            raise ConfigError(f"override must look like key=value: {item!r}", key=item)
        key, text = item.split("=", 1)
        key = key.strip()
        parts = key.split(".")
        node = out
        for i, p in enumerate(parts):
            last = i == len(parts) - 1
            if isinstance(node, dict):
                if p not in node:
                    raise UnknownKey(f"unknown key: {key}", key=key)
                if last:
                    node[p] = yaml.safe_load(text)
                else:
                    node = node[p]
            elif isinstance(node, list):
                try:
                    j = int(p)
                except ValueError:
                    raise UnknownKey(f"unknown key: {key}", key=key) from None
                if not 0 <= j < len(node):
                    raise UnknownKey(f"unknown key: {key} (index out of range)", key=key)
                if last:
                    node[j] = yaml.safe_load(text)
                else:
                    node = node[j]
            else:
                raise UnknownKey(f"unknown key: {key}", key=key)
    # re-normalize so overridden sections still obey the schema
    return normalize(out)


def _floats(x, key):
    if x is None:
        return None
    try:
        return tuple(float(v) for v in np.atleast_1d(x))
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected numbers, got {x!r}", key=key) from None


def _num(x, key, kind=float):
    try:
        return kind(x)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {x!r}", key=key) from None


def build_model(raw: dict) -> ModelSpec:
    m = raw["model"]
    species = []
    for i, s in enumerate(m["species"]):
        k = s["kinetics"]
        kin = Kinetics(str(k["variant"]), _num(k["r"], f"model.species.{i}.kinetics.r"),
                       _num(k["K"], f"model.species.{i}.kinetics.K"),
                       None if k["A"] is None else _num(k["A"], f"model.species.{i}.kinetics.A"))
        species.append(SpeciesParams(_num(s["D"], f"model.species.{i}.D"),
                                     _num(s["chi"], f"model.species.{i}.chi"), kin))
    sig = m["signal"]
    signal = SignalKinetics(_floats(sig["alpha"], "model.signal.alpha"),
                            _num(sig["beta"], "model.signal.beta"),
                            _num(sig["D_v"], "model.signal.D_v"))
    fluid = None
    if m["fluid"] is not None:
        f = m["fluid"]
        fluid = FluidParams(_num(f["nu"], "model.fluid.nu"), _num(f["kappa"], "model.fluid.kappa"),
                            _floats(f["gravity_axis"], "model.fluid.gravity_axis"))
    try:
        return ModelSpec(m["family"], tuple(species), signal, fluid)
    except ValueError:
        raise ConfigError(f"model.family: unknown family {m['family']!r}",
                          key="model.family") from None


def build_run(raw: dict) -> RunConfig:
    g = raw["grid"]
    try:
        grid = Grid(_num(g["dim"], "grid.dim", int), _num(g["n"], "grid.n", int),
                    _num(g["L"], "grid.L"), g["bc"])
    except ValueError:
        raise ConfigError(f"grid.bc: unknown boundary {g['bc']!r}", key="grid.bc") from None
    model = build_model(raw)
    ic = raw["ic"]
    nf = len(field_names(model))
    base = _floats(ic["base"], "ic.base")
    if base is None:
        try:
            base = homogeneous_steady_state(model)
        except ChemotaxError as e:
            raise ConfigError(f"ic.base: {e}", key="ic.base") from None
    if ic["variant"] == "gaussian":
        peak = _floats(ic["peak"], "ic.peak") or (0.0,) * nf
        init = InitialCondition("gaussian", base=base, amplitude=_num(ic["amplitude"], "ic.amplitude"),
                                center=_floats(ic["center"], "ic.center"),
                                width=_num(ic["width"], "ic.width"), peak=peak)
    elif ic["variant"] == "uniform_noise":
        init = InitialCondition.uniform_noise(base, _num(ic["amplitude"], "ic.amplitude"))
    else:
        raise ConfigError(f"ic.variant: unsupported {ic['variant']!r}", key="ic.variant")
    try:
        cfg = RunConfig(grid, model, raw["stepper"], dt=_num(raw["dt"], "dt"),
                        t_final=_num(raw["t_final"], "t_final"),
                        snapshot_every=_num(raw["snapshot_every"], "snapshot_every", int),
                        ic=init, clip=_floats(raw["clip"], "clip"),
                        blowup_threshold=_num(raw["blowup_threshold"], "blowup_threshold"),
                        rng_seed=_num(raw["rng_seed"], "rng_seed", int),
                        dealias=None if raw["dealias"] is None else bool(raw["dealias"]),
                        record_midpoint=bool(raw["record_midpoint"]))
    except ValueError:
        raise ConfigError(f"stepper: unknown stepper {raw['stepper']!r}", key="stepper") from None
    problems = validate(model, grid, cfg)
    if problems:
        key = problems[0].split(":", 1)[0]
        raise ConfigError("invalid configuration: " + "; ".join(problems), key=key)
    return cfg


def from_dict(data: dict, overrides=None) -> Config:
    raw = normalize(data)
    if overrides:
        raw = apply_overrides(raw, overrides)
    return Config(raw, build_run(raw), raw["sweep"], raw["lyapunov"], raw["probe"],
                  raw["stability"])


def load(path, overrides=None) -> Config:
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}", key=str(p))
    try:
        data = yaml.safe_load(p.read_text())
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse {p}: {e}", key=str(p)) from None
    return from_dict(data, overrides)


def dump_yaml(raw: dict, extra: Optional[dict] = None) -> str:
    doc = copy.deepcopy(raw)
    if extra:
        doc[RESULT_KEY] = extra
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=None)


def sweep_chis(section: dict):
    if section["chis"] is not None:
        return [float(c) for c in np.atleast_1d(section["chis"])]
    a, b, h = float(section["chi_start"]), float(section["chi_stop"]), float(section["chi_step"])
    if h <= 0:
        raise ConfigError("sweep.chi_step: must be positive", key="sweep.chi_step")
    n = int(np.floor((b - a) / h + 1e-9)) + 1
    return [a + i * h for i in range(max(n, 0))]
