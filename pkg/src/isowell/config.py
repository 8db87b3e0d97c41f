"""Run configuration: schema, defaults and named presets.

A configuration is a JSON object.  Resolution merges, in increasing
priority, the command defaults, an optional named preset and the user's
file, then validates the result against a strict schema (unknown keys are
errors).  Defaults: ``lambda1 = lambda2 = 1``, ``omega0 = 1``, box
``halfwidth = 8``, ``basis_size = 10`` (20 for wide bumps), quadrature
``abs_tol = 1e-12``, ``rel_tol = 1e-10`` and ODE ``ode_tol = 1e-10``.
"""

import copy

import jsonschema

from .exceptions import ConfigError

__all__ = ["COMMANDS", "PRESETS", "DEFAULTS", "resolve_config", "schema_for"]

COMMANDS = ("potential", "spectrum", "evolve", "perturb", "floquet")

_GRID = {
    "type": "object",
    "properties": {
        "start": {"type": "number"},
        "stop": {"type": "number"},
        "num": {"type": "integer"},
    },
    "required": ["start", "stop", "num"],
    "additionalProperties": False,
}
_NUMBER = {"type": "number"}
_MODEL = {
    "type": "object",
    "properties": {k: _NUMBER for k in ("nu", "mu", "lambda1", "lambda2", "omega0")},
    "required": ["nu", "mu"],
    "additionalProperties": False,
}
_TOLERANCES = {
    "type": "object",
    "properties": {k: {"type": "number", "exclusiveMinimum": 0} for k in ("abs_tol", "rel_tol", "ode_tol")},
    "additionalProperties": False,
}
_PACKET = {
    "type": "object",
    "properties": {"R": _NUMBER, "xi0": {"type": ["number", "null"]}},
    "additionalProperties": False,
}
_DENSITY = {
    "type": ["object", "null"],
    "properties": {"xi": _GRID, "tau": _GRID},
    "additionalProperties": False,
}
_COMMON = {
    "model": _MODEL,
    "basis_size": {"type": ["integer", "null"]},
    "halfwidth": {"type": "number", "exclusiveMinimum": 0},
    "tolerances": _TOLERANCES,
    "output_path": {"type": ["string", "null"]},
}
_SPECIFIC = {
    "potential": {"grid": _GRID},
    "spectrum": {"lambda_sweep": {"type": "array", "items": _NUMBER}},
    "evolve": {
        "packet": _PACKET,
        "tau": _GRID,
        "n_states": {"type": ["integer", "null"]},
        "under_barrier": {"type": "boolean"},
        "density": _DENSITY,
    },
    "perturb": {
        "disturbance": {
            "type": "object",
            "properties": {k: _NUMBER for k in ("s", "b", "c")},
            "required": ["s", "b", "c"],
            "additionalProperties": False,
        },
        "grid": _GRID,
    },
    "floquet": {
        "drive": {
            "type": "object",
            "properties": {k: _NUMBER for k in ("S", "w", "phi0")},
            "required": ["S", "w"],
            "additionalProperties": False,
        },
        "sweep": {"type": ["object", "null"], "properties": _GRID["properties"],
                  "required": _GRID["required"], "additionalProperties": False},
        "stroboscopic": {
            "type": ["object", "null"],
            "properties": {"packet": _PACKET, "n_periods": {"type": "integer"}, "grid": _GRID},
            "additionalProperties": False,
        },
    },
}


def schema_for(command):
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    props = dict(_COMMON)
    props.update(_SPECIFIC[command])
    required = ["model"] + [k for k in ("disturbance", "drive") if k in props]
    return {"type": "object", "properties": props, "required": required, "additionalProperties": False}


DEFAULTS = {
    "common": {
        "model": {"lambda1": 1.0, "lambda2": 1.0, "omega0": 1.0},
        "basis_size": None,
        "halfwidth": 8.0,
        "tolerances": {"abs_tol": 1e-12, "rel_tol": 1e-10, "ode_tol": 1e-10},
        "output_path": None,
    },
    "potential": {"grid": {"start": -8.0, "stop": 8.0, "num": 1601}},
    "spectrum": {"lambda_sweep": []},
    "evolve": {
        "packet": {"R": 0.75, "xi0": None},
        "tau": {"start": 0.0, "stop": 300.0, "num": 601},
        "n_states": None,
        "under_barrier": False,
        "density": None,
    },
    "perturb": {"grid": {"start": -3.0, "stop": 3.0, "num": 601}},
    "floquet": {
        "drive": {"phi0": 0.0},
        "sweep": {"start": 0.0, "stop": 1.0, "num": 41},
        "stroboscopic": None,
    },
}

_SYM = {"nu": -3.0, "mu": -3.02, "lambda1": 1.0}
_THREE = {"nu": -0.02, "mu": -1.0, "lambda1": 1.0}
_FIG_DENSITY = {"xi": {"start": -5.0, "stop": 5.0, "num": 201},
                "tau": {"start": 0.0, "stop": 300.0, "num": 301}}

# each preset names the command it belongs to
PRESETS = {
    "fig1a": ("potential", {"model": dict(_SYM)}),
    "fig1b": ("potential", {"model": dict(_SYM, lambda1=0.5)}),
    "fig1c": ("potential", {"model": dict(_SYM, lambda1=0.05)}),
    "fig3a": ("potential", {"model": dict(_THREE)}),
    "fig3b": ("potential", {"model": dict(_THREE, lambda1=0.05)}),
    "spectrum-sym": ("spectrum", {"model": dict(_SYM), "lambda_sweep": [0.05, 0.5, 1.0, 5.0]}),
    "evolve-sym": ("evolve", {"model": dict(_SYM), "packet": {"R": 0.75, "xi0": 1.525},
                              "tau": {"start": 0.0, "stop": 314.159265358979, "num": 629}}),
    "fig2a": ("evolve", {"model": dict(_SYM, lambda1=0.5), "packet": {"R": 0.75, "xi0": 1.607},
                         "density": _FIG_DENSITY}),
    "fig2b": ("evolve", {"model": dict(_SYM, lambda1=0.05), "packet": {"R": 0.75, "xi0": None},
                         "density": _FIG_DENSITY}),
    "fig4a": ("evolve", {"model": dict(_THREE), "density": _FIG_DENSITY}),
    "fig4b": ("evolve", {"model": dict(_THREE, lambda1=0.05), "density": _FIG_DENSITY}),
    "table1-row1": ("perturb", {"model": dict(_SYM), "basis_size": 10,
                                "disturbance": {"s": 0.6, "b": 1.86, "c": 0.25}}),
    "table1-row2": ("perturb", {"model": dict(_SYM), "basis_size": 10,
                                "disturbance": {"s": 0.6, "b": 1.86, "c": 0.5}}),
    "fig7": ("perturb", {"model": dict(_THREE), "basis_size": 10,
                         "disturbance": {"s": 1.0, "b": 3.0, "c": 0.25}}),
    "table3-sym": ("floquet", {"model": dict(_SYM), "basis_size": 10, "drive": {"S": 0.65, "w": 0.9},
                               "stroboscopic": {"packet": {"R": 0.75, "xi0": 1.525}, "n_periods": 43,
                                                "grid": {"start": -5.0, "stop": 5.0, "num": 201}}}),
    "table3-asym": ("floquet", {"model": dict(_SYM, lambda1=0.5), "basis_size": 10,
                                "drive": {"S": 0.65, "w": 0.9},
                                "stroboscopic": {"packet": {"R": 0.75, "xi0": 1.607}, "n_periods": 43,
                                                 "grid": {"start": -5.0, "stop": 5.0, "num": 201}}}),
}
PRESETS["table2-row1"] = PRESETS["table1-row1"]
PRESETS["table2-row2"] = PRESETS["table1-row2"]
PRESETS["fig10a"] = PRESETS["table3-sym"]
PRESETS["fig10b"] = PRESETS["table3-asym"]


def _merge(base, over):
    out = copy.deepcopy(base)
    for key, value in over.items():
        if isinstance(value, dict) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def _validate(cfg, command, what):
    try:
        jsonschema.validate(cfg, schema_for(command))
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"{what}: {where}: {exc.message}") from None


def resolve_config(command, user=None, preset=None):
    """Merge defaults, preset and user config; validate; return a new dict."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    layered = {}
    if preset is not None:
        if preset not in PRESETS:
            raise ConfigError(f"unknown preset {preset!r}; choose from {', '.join(sorted(PRESETS))}")
        owner, body = PRESETS[preset]
        if owner != command:
            raise ConfigError(f"preset {preset!r} belongs to command {owner!r}")
        layered = _merge(layered, body)
    if user is not None:
        if not isinstance(user, dict):
            raise ConfigError("configuration must be a JSON object")
        layered = _merge(layered, user)
    cfg = _merge(_merge(DEFAULTS["common"], DEFAULTS[command]), layered)
    _validate(cfg, command, "configuration")
    return cfg
