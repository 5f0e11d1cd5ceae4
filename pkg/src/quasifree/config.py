"""Experiment configuration: JSON schema validation and object construction."""
from __future__ import annotations

import json
import math
from pathlib import Path

import jsonschema
import numpy as np

from .errors import DomainError
from .ground import GroundWindow
from .kernels import (KernelFunction, KernelMatrix, charlier_scaled_kernel, discrete_hermite,
                      discrete_jacobi_symmetric, discrete_laguerre, sine_kernel)
from .orthopoly import build_ops, cd_kernel, weight_family
from .policy import DEFAULT_POLICY, Policy
from .reporting import config_hash


class ConfigError(DomainError):
    """Invalid experiment configuration."""


_num = {"type": "number"}
_int = {"type": "integer"}
_sign = {"enum": ["+", "-"]}


def _params(props, required=()):
    return {"type": "object", "properties": props, "required": list(required),
            "additionalProperties": False}


WEIGHT_SCHEMA = {
    "oneOf": [
        _params({"family": {"const": "charlier"}, "params": _params({"theta": _num})}, ["family"]),
        _params({"family": {"const": "meixner"},
                 "params": _params({"beta": _num, "c": _num}, ["beta", "c"])}, ["family", "params"]),
        _params({"family": {"const": "krawtchouk"},
                 "params": _params({"M": _int, "p": _num}, ["M", "p"])}, ["family", "params"]),
        _params({"family": {"const": "uniform"}, "params": _params({})}, ["family"]),
        _params({"family": {"const": "table"},
                 "params": _params({"values": {"type": "array", "items": _num, "minItems": 1}},
                                   ["values"])}, ["family", "params"]),
    ]
}

KERNEL_SCHEMA = {
    "oneOf": [
        _params({"family": {"const": "sine"}, "params": _params({"phi": _num}, ["phi"])},
                ["family", "params"]),
        _params({"family": {"const": "discrete_hermite"},
                 "params": _params({"r": _num, "sign": _sign}, ["r"])}, ["family", "params"]),
        _params({"family": {"const": "discrete_laguerre"},
                 "params": _params({"alpha": _num, "r": _num, "sign": _sign}, ["alpha", "r"])},
                ["family", "params"]),
        _params({"family": {"const": "discrete_jacobi_symmetric"},
                 "params": _params({"a": _num, "sign": _sign}, ["a"])}, ["family", "params"]),
        _params({"family": {"const": "cd"},
                 "params": _params({"weight": WEIGHT_SCHEMA, "N": _int}, ["weight", "N"])},
                ["family", "params"]),
        _params({"family": {"const": "charlier_scaled"},
                 "params": _params({"N": _int, "phi": _num}, ["N", "phi"])}, ["family", "params"]),
        _params({"family": {"const": "matrix"},
                 "params": _params({"entries": {"type": "array",
                                                "items": {"type": "array", "items": _num}},
                                    "projection": {"type": "boolean"}}, ["entries"])},
                ["family", "params"]),
    ]
}

WINDOW_SCHEMA = _params({"model": {"enum": ["half_line", "full_line", "finite"]},
                         "lo": _int, "hi": _int}, ["model", "lo", "hi"])

TOLERANCE_SCHEMA = _params({k: _num for k in DEFAULT_POLICY.as_dict()})

CONFIG_SCHEMA = _params({
    "window": WINDOW_SCHEMA,
    "kernel": KERNEL_SCHEMA,
    "cutoffs": {"type": "array", "items": _int, "minItems": 1},
    "seed": _int,
    "output": {"type": "string"},
    "tolerances": TOLERANCE_SCHEMA,
}, ["kernel"])


def validate(cfg: dict) -> dict:
    try:
        jsonschema.validate(cfg, CONFIG_SCHEMA)
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {path}: {exc.message}") from None
    return cfg


def load(path) -> dict:
    try:
        cfg = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file {path} not found") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config file {path} is not valid JSON: {exc}") from None
    return validate(cfg)


def policy_of(cfg: dict, base: Policy = DEFAULT_POLICY) -> Policy:
    tol = cfg.get("tolerances", {})
    if "full_measure_max_sites" in tol:
        tol = dict(tol, full_measure_max_sites=int(tol["full_measure_max_sites"]))
    return base.override(**tol)


def window_of(cfg: dict, default=None) -> GroundWindow:
    w = cfg.get("window")
    if w is None:
        if default is None:
            raise ConfigError("config needs a window")
        return default
    try:
        return GroundWindow.interval(w["lo"], w["hi"], w["model"])
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def kernel_function(cfg: dict, policy: Policy = DEFAULT_POLICY) -> KernelFunction:
    """Infinite-lattice kernel generator for the closed-form families."""
    k = cfg["kernel"]
    fam, p = k["family"], k.get("params", {})
    try:
        if fam == "sine":
            return sine_kernel(p["phi"], policy)
        if fam == "discrete_hermite":
            return discrete_hermite(p.get("sign", "+"), p["r"], policy)
        if fam == "discrete_laguerre":
            return discrete_laguerre(p["alpha"], p["r"], p.get("sign", "+"), policy)
        if fam == "discrete_jacobi_symmetric":
            return discrete_jacobi_symmetric(p["a"], p.get("sign", "+"), policy)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"kernel family {fam!r} has no infinite-lattice generator")


def kernel_matrix(cfg: dict, policy: Policy = DEFAULT_POLICY) -> KernelMatrix:
    """Kernel materialized on the configured window."""
    k = cfg["kernel"]
    fam, p = k["family"], k.get("params", {})
    try:
        if fam in ("sine", "discrete_hermite", "discrete_laguerre", "discrete_jacobi_symmetric"):
            kf = kernel_function(cfg, policy)
            win = window_of(cfg)
            return kf.materialize(win)
        win = window_of(cfg)
        if fam == "cd":
            wcfg = p["weight"]
            wf = weight_family(wcfg["family"], win, **wcfg.get("params", {}))
            ops = build_ops(wf, p["N"], policy)
            return cd_kernel(ops, p["N"], policy)
        if fam == "charlier_scaled":
            return charlier_scaled_kernel(p["N"], p["phi"], win, policy=policy)
        if fam == "matrix":
            return KernelMatrix(win, np.asarray(p["entries"], dtype=float),
                                bool(p.get("projection", False)), policy)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    raise ConfigError(f"unknown kernel family {fam!r}")


def default_config() -> dict:
    """Used when a command is run without a kernel config: the discrete sine
    kernel at phi = pi/2 on {-8..8}."""
    return {"window": {"model": "full_line", "lo": -8, "hi": 8},
            "kernel": {"family": "sine", "params": {"phi": math.pi / 2}}}


def hash_of(cfg: dict) -> str:
    return config_hash(cfg)
