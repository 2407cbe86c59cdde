"""Experiment configuration: strict JSON tree with dotted-path overrides.

Every frequency-like key carries an explicit unit suffix (_hz, _mhz, _ghz,
_khz, _us, _nh, _ff); unknown keys are rejected so a typo cannot silently
fall back to a default.  The shipped defaults are the calibrated device
(see scripts/calibrate_defaults.py): dressed atom splitting 500 MHz and
resonator 6.82 GHz at the 6.5 flux-quanta operating point, l_q/l_s_tot = 50
and l_r = l_s_tot there.
"""

import copy
import hashlib
import json
import math

from .circuit import CircuitSpec
from .errors import ConfigError
from .raman import LambdaParams, split_rates
from .snail import SnailSpec

DEFAULTS = {
    "circuit": {
        # calibrated; see scripts/calibrate_defaults.py
        "ej_f_ghz": 8.213212160041177,
        "ec_f_ghz": 3.0,
        "l_q_nh": 574.3238874117988,
        "l_r_nh": 11.486477748235975,
        "c_r_ff": 23.708309928992566,
        "phi_ext_f": 6.5,
        "dim_q": 80,
        "dim_r": 5,
        "n_levels": 8,
    },
    "snail": {
        "alpha": 0.4,
        "n_junctions": 3,
        "n_array": 5,
        "ej_s_ghz": 100.0,
        "area_ratio": 60.0,
    },
    "lambda": {
        "delta_r_mhz": 150.0,
        "delta_khz": 0.0,
        "chi_mhz": 0.7,
        "epsilon_mhz": 50.8,
        "g3_mhz": 3.0,
        "g3_cool_mhz": 0.87,
        "kappa_mhz": 16.8,
        "t1_us": 5.7,
        "p_g_thermal": 0.6,
        "p_g_init": 0.94,
        "alpha_r_sq": 0.35,
        "dim_r": 6,
        "rtol": 1e-8,
        "atol": 1e-10,
        "cool_duration_us": 5.0,
        "noise_floor": 1e-4,
    },
    "grids": {
        "flux": {"start": 0.0, "stop": 7.0, "count": 141},
        "drive_freq_ghz": {"start": 7.28, "stop": 7.42, "count": 57},
        "time_us": {"start": 0.0, "stop": 2.5, "count": 200},
        "detuning_khz": {"start": -1000.0, "stop": 1000.0, "count": 21},
    },
    "output": {
        "directory": "out",
        "formats": ["csv", "json", "svg"],
    },
}

_POSITIVE_KEYS = {
    "ej_f_ghz", "ec_f_ghz", "l_q_nh", "c_r_ff", "ej_s_ghz", "area_ratio",
    "kappa_mhz", "t1_us", "alpha", "alpha_r_sq",
}


def _merge_strict(base, override, path=""):
    out = copy.deepcopy(base)
    for key, value in override.items():
        here = f"{path}.{key}" if path else key
        if key not in base:
            raise ConfigError(f"unknown config key: {here}")
        if isinstance(base[key], dict) and not _is_grid(base[key]):
            if not isinstance(value, dict):
                raise ConfigError(f"{here} must be a mapping")
            out[key] = _merge_strict(base[key], value, here)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _is_grid(node):
    return isinstance(node, dict) and set(node) == {"start", "stop", "count"}


def load_config(path=None, overrides=()):
    """Resolve defaults + optional JSON file + dotted-path overrides.

    Overrides are ``section.key=value`` strings (dashes in keys map to
    underscores, values parsed as JSON scalars).
    """
    cfg = copy.deepcopy(DEFAULTS)
    if path is not None:
        try:
            with open(path) as fh:
                user = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}")
        if not isinstance(user, dict):
            raise ConfigError("config root must be a JSON object")
        cfg = _merge_strict(cfg, user)
    for item in overrides:
        cfg = _apply_override(cfg, item)
    _validate(cfg)
    return cfg


def _apply_override(cfg, item):
    if "=" not in item:
        raise ConfigError(f"override {item!r} must look like section.key=value")
    dotted, raw = item.split("=", 1)
    keys = [k.replace("-", "_") for k in dotted.strip().lstrip("-").split(".")]
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    node = {}
    leaf = node
    for k in keys[:-1]:
        leaf[k] = {}
        leaf = leaf[k]
    leaf[keys[-1]] = value
    return _merge_strict(cfg, node)


def _validate(cfg):
    for section, keys in cfg.items():
        for key, value in keys.items():
            if key in _POSITIVE_KEYS and not (
                    isinstance(value, (int, float)) and value > 0):
                raise ConfigError(f"{section}.{key} must be positive, "
                                  f"got {value!r}")
    for name, grid in cfg["grids"].items():
        if _is_grid(grid):
            if grid["count"] < 2:
                raise ConfigError(f"grids.{name}.count must be >= 2")
            if not math.isfinite(grid["start"]) or not math.isfinite(
                    grid["stop"]):
                raise ConfigError(f"grids.{name} bounds must be finite")
        elif isinstance(grid, list):
            if len(grid) < 2:
                raise ConfigError(f"grids.{name} must have >= 2 points")
        else:
            raise ConfigError(
                f"grids.{name} must be a list or start/stop/count mapping")
    if not 0.5 < cfg["lambda"]["p_g_thermal"] < 1.0:
        raise ConfigError("lambda.p_g_thermal must be in (0.5, 1)")


def grid_points(cfg, name):
    import numpy as np

    grid = cfg["grids"][name]
    if _is_grid(grid):
        return np.linspace(grid["start"], grid["stop"], int(grid["count"]))
    return np.asarray(grid, dtype=float)


def config_hash(cfg):
    blob = json.dumps(cfg, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# ---------------------------------------------------------------------------
# builders


def build_circuit_spec(cfg=None):
    cfg = cfg or DEFAULTS
    c, s = cfg["circuit"], cfg["snail"]
    sn = SnailSpec(alpha=s["alpha"], n_junctions=int(s["n_junctions"]),
                   phi_ext_s=0.0, ej=s["ej_s_ghz"] * 1e9)
    return CircuitSpec(
        ej_f=c["ej_f_ghz"] * 1e9,
        ec_f=c["ec_f_ghz"] * 1e9,
        l_q=c["l_q_nh"] * 1e-9,
        l_r=c["l_r_nh"] * 1e-9,
        c_r=c["c_r_ff"] * 1e-15,
        snail=sn,
        n_array=int(s["n_array"]),
        area_ratio=s["area_ratio"],
        phi_ext_f=c["phi_ext_f"],
        dim_q=int(c["dim_q"]),
        dim_r=int(c["dim_r"]),
    )


def build_lambda_params(cfg=None):
    cfg = cfg or DEFAULTS
    lam = cfg["lambda"]
    gamma_up, gamma_down = split_rates(1.0 / (lam["t1_us"] * 1e-6),
                                       lam["p_g_thermal"])
    return LambdaParams(
        delta_r=lam["delta_r_mhz"] * 1e6,
        delta=lam["delta_khz"] * 1e3,
        chi=lam["chi_mhz"] * 1e6,
        epsilon=lam["epsilon_mhz"] * 1e6,
        g3=lam["g3_mhz"] * 1e6,
        kappa=lam["kappa_mhz"] * 1e6,
        gamma_up=gamma_up,
        gamma_down=gamma_down,
        dim_r=int(lam["dim_r"]),
    )


def default_circuit_spec():
    return build_circuit_spec(DEFAULTS)


def default_lambda_params():
    return build_lambda_params(DEFAULTS)
