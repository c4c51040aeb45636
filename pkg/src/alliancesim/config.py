"""JSON configuration parsing and serialization.

Run configs hold model parameters plus an optional "metrics" block; sweep
configs add "axes" (whose presence selects sweep mode), "replicates" and
"master_seed".  Defaults follow the standard baseline: r=0.2, n=50,
lambda=3, w=0.5, threshold=3.0, q=0.5, steps=2,000,000, seed=0.  Errors
always name the offending key path.
"""

from __future__ import annotations

import json
from typing import Any

from .errors import ConfigError, InvalidParamsError
from .metrics import MetricsConfig
from .model import REWIRE_EXCLUSION_MODES, ModelParams
from .sweep import SweepConfig

_PARAM_KEYS = {
    "n": "n",
    "lambda": "lam",
    "r": "r",
    "q": "q",
    "w": "w",
    "steps": "steps",
    "seed": "seed",
    "rewire_exclusion": "rewire_exclusion",
}
_METRICS_KEYS = ("threshold", "leader_memory", "episode_min_steps",
                 "histogram_sample_period", "p_lead", "stability_window")
_SWEEP_KEYS = ("base", "axes", "replicates", "master_seed", "metrics")


def _require_mapping(obj: Any, path: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(f"{path}: expected a JSON object, got {type(obj).__name__}")
    return obj


def _check_known(obj: dict, allowed, path: str) -> None:
    for key in obj:
        if key not in allowed:
            raise ConfigError(f"{path}{key}: unknown key (allowed: {sorted(allowed)})")


def _coerce_number(value: Any, path: str, integral: bool):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{path}: expected a number, got {value!r}")
    if integral:
        if isinstance(value, float):
            if not value.is_integer():
                raise ConfigError(f"{path}: expected an integer, got {value!r}")
            value = int(value)
        return value
    return float(value)


def parse_model_params(obj: Any, path: str = "") -> ModelParams:
    obj = _require_mapping(obj, path or "top level")
    _check_known(obj, _PARAM_KEYS, path)
    kwargs = {}
    for json_key, attr in _PARAM_KEYS.items():
        if json_key not in obj:
            continue
        if json_key == "rewire_exclusion":
            value = obj[json_key]
            if value not in REWIRE_EXCLUSION_MODES:
                raise ConfigError(f"{path}rewire_exclusion: must be one of "
                                  f"{REWIRE_EXCLUSION_MODES}, got {value!r}")
        else:
            integral = json_key in ("n", "lambda", "steps", "seed")
            value = _coerce_number(obj[json_key], path + json_key, integral)
        kwargs[attr] = value
    params = ModelParams(**kwargs)
    try:
        params.validate()
    except InvalidParamsError as exc:
        raise ConfigError(f"{path or 'params'}: {exc}") from exc
    return params


def parse_metrics_config(obj: Any, path: str = "metrics.") -> MetricsConfig:
    obj = _require_mapping(obj, path.rstrip("."))
    _check_known(obj, _METRICS_KEYS, path)
    kwargs = {}
    for key in _METRICS_KEYS:
        if key not in obj:
            continue
        integral = key in ("leader_memory", "episode_min_steps", "histogram_sample_period")
        kwargs[key] = _coerce_number(obj[key], path + key, integral)
    cfg = MetricsConfig(**kwargs)
    try:
        cfg.validate()
    except InvalidParamsError as exc:
        raise ConfigError(f"{path.rstrip('.')}: {exc}") from exc
    return cfg


def _parse_axes(obj: Any) -> tuple:
    if not isinstance(obj, list):
        raise ConfigError("axes: expected a list of {param, values} objects")
    axes = []
    for pos, entry in enumerate(obj):
        entry = _require_mapping(entry, f"axes[{pos}]")
        _check_known(entry, ("param", "values"), f"axes[{pos}].")
        if "param" not in entry or "values" not in entry:
            raise ConfigError(f"axes[{pos}]: needs both 'param' and 'values'")
        name = entry["param"]
        if name == "lambda":
            name = "lam"
        values = entry["values"]
        if not isinstance(values, list):
            raise ConfigError(f"axes[{pos}].values: expected a list")
        parsed = []
        integral = name in ("n", "lam", "steps")
        for vpos, value in enumerate(values):
            parsed.append(_coerce_number(value, f"axes[{pos}].values[{vpos}]", integral))
        axes.append((name, tuple(parsed)))
    return tuple(axes)


def parse_sweep_config(obj: Any) -> SweepConfig:
    obj = _require_mapping(obj, "top level")
    _check_known(obj, _SWEEP_KEYS, "")
    base = parse_model_params(obj.get("base", {}), "base.")
    metrics = parse_metrics_config(obj.get("metrics", {}))
    replicates = _coerce_number(obj.get("replicates", 1), "replicates", True)
    master_seed = _coerce_number(obj.get("master_seed", 0), "master_seed", True)
    cfg = SweepConfig(base=base, axes=_parse_axes(obj.get("axes", [])),
                      replicates=replicates, master_seed=master_seed,
                      metrics=metrics)
    return cfg.validate()


def parse_config(text: str):
    """Parse a JSON config; returns (ModelParams, MetricsConfig) for run
    configs, (base ModelParams, SweepConfig) when an "axes" key is present."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from exc
    obj = _require_mapping(obj, "top level")
    if "axes" in obj or "base" in obj:
        sweep = parse_sweep_config(obj)
        return sweep.base, sweep
    known = dict(_PARAM_KEYS)
    known["metrics"] = None
    _check_known(obj, known, "")
    metrics_obj = obj.pop("metrics", {})
    params = parse_model_params(obj)
    metrics = parse_metrics_config(metrics_obj)
    return params, metrics


def model_params_to_dict(params: ModelParams) -> dict:
    return {
        "n": params.n, "lambda": params.lam, "r": params.r, "q": params.q,
        "w": params.w, "steps": params.steps, "seed": params.seed,
        "rewire_exclusion": params.rewire_exclusion,
    }


def metrics_config_to_dict(cfg: MetricsConfig) -> dict:
    return {key: getattr(cfg, key) for key in _METRICS_KEYS}


def sweep_config_to_dict(cfg: SweepConfig) -> dict:
    return {
        "base": model_params_to_dict(cfg.base),
        "axes": [{"param": "lambda" if name == "lam" else name,
                  "values": list(values)} for name, values in cfg.axes],
        "replicates": cfg.replicates,
        "master_seed": cfg.master_seed,
        "metrics": metrics_config_to_dict(cfg.metrics),
    }


def emit_config(parsed) -> str:
    """Serialize a parse_config result back to canonical JSON."""
    params, cfg = parsed
    if isinstance(cfg, SweepConfig):
        doc = sweep_config_to_dict(cfg)
    else:
        doc = model_params_to_dict(params)
        doc["metrics"] = metrics_config_to_dict(cfg)
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"
