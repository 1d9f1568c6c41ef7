"""Strict JSON (de)serialization of environment configs.

Every section rejects unknown keys so typos fail loudly instead of
silently running defaults.  A minimal config is::

    {"stack": {"n_stages": 2}, "mode": "medium"}

Hard mode fills in its canonical disturbance settings when the noise
sections are omitted.
"""

from __future__ import annotations

import json
from dataclasses import replace
from pathlib import Path

from .env import EnvConfig
from .errors import ConfigurationError
from .field import StackConfig
from .noise import NoiseConfig

__all__ = [
    "env_config_from_dict",
    "env_config_to_dict",
    "load_env_config",
    "save_env_config",
]

_STACK_KEYS = {
    "n_stages", "period", "pulse_fwhm", "carrier_wavelength",
    "grid_dt", "grid_len", "combiner_loss",
}
_NOISE_KEYS = {"sigma", "drift_knots", "seed", "drift_scales"}
_ENV_KEYS = {
    "stack", "noise_train", "noise_test", "mode", "max_steps",
    "action_scale", "obs_len", "seed", "obs_intensity",
}


def _require_mapping(value, where: str) -> dict:
    if not isinstance(value, dict):
        raise ConfigurationError(f"{where} must be a JSON object, got {type(value).__name__}")
    return value


def _reject_unknown(section: dict, known: set[str], where: str) -> None:
    unknown = sorted(set(section) - known)
    if unknown:
        raise ConfigurationError(f"unknown key(s) {unknown} in {where}")


def _parse_stack(section: dict) -> StackConfig:
    _require_mapping(section, "stack")
    _reject_unknown(section, _STACK_KEYS, "stack")
    if "n_stages" not in section:
        raise ConfigurationError("stack.n_stages is required")
    return StackConfig(**section)


def _parse_noise(section: dict, where: str) -> NoiseConfig:
    _require_mapping(section, where)
    _reject_unknown(section, _NOISE_KEYS, where)
    kwargs = dict(section)
    if "drift_knots" in kwargs:
        knots = kwargs["drift_knots"]
        if not isinstance(knots, list) or not all(
            isinstance(k, list) and len(k) == 2 for k in knots
        ):
            raise ConfigurationError(f"{where}.drift_knots must be a list of [step, value] pairs")
        kwargs["drift_knots"] = tuple((k[0], k[1]) for k in knots)
    if kwargs.get("drift_scales") is not None:
        scales = kwargs["drift_scales"]
        if not isinstance(scales, list):
            raise ConfigurationError(f"{where}.drift_scales must be a list or null")
        kwargs["drift_scales"] = tuple(scales)
    return NoiseConfig(**kwargs)


def env_config_from_dict(data: dict) -> EnvConfig:
    """Build an :class:`EnvConfig` from parsed JSON, validating strictly."""
    _require_mapping(data, "config")
    _reject_unknown(data, _ENV_KEYS, "config")
    if "stack" not in data or "mode" not in data:
        raise ConfigurationError("config requires at least 'stack' and 'mode'")
    stack = _parse_stack(data["stack"])
    mode = data["mode"]

    if "noise_train" in data or "noise_test" in data or mode != "hard":
        noise_train = _parse_noise(data.get("noise_train", {}), "noise_train")
        noise_test = _parse_noise(data.get("noise_test", {}), "noise_test")
    else:
        defaults = EnvConfig.default(mode="hard", n_stages=stack.n_stages)
        noise_train, noise_test = defaults.noise_train, defaults.noise_test

    kwargs = {
        k: data[k]
        for k in ("max_steps", "action_scale", "obs_len", "seed", "obs_intensity")
        if k in data
    }
    return EnvConfig(stack=stack, noise_train=noise_train, noise_test=noise_test,
                     mode=mode, **kwargs)


def env_config_to_dict(config: EnvConfig) -> dict:
    """JSON-ready dict that round-trips through :func:`env_config_from_dict`."""

    def noise_dict(noise: NoiseConfig) -> dict:
        return {
            "sigma": noise.sigma,
            "drift_knots": [[s, v] for s, v in noise.drift_knots],
            "seed": noise.seed,
            "drift_scales": (
                None if noise.drift_scales is None else list(noise.drift_scales)
            ),
        }

    stack = config.stack
    return {
        "stack": {
            "n_stages": stack.n_stages,
            "period": stack.period,
            "pulse_fwhm": stack.pulse_fwhm,
            "carrier_wavelength": stack.carrier_wavelength,
            "grid_dt": stack.grid_dt,
            "grid_len": stack.grid_len,
            "combiner_loss": stack.combiner_loss,
        },
        "noise_train": noise_dict(config.noise_train),
        "noise_test": noise_dict(config.noise_test),
        "mode": config.mode,
        "max_steps": config.max_steps,
        "action_scale": config.action_scale,
        "obs_len": config.obs_len,
        "seed": config.seed,
        "obs_intensity": config.obs_intensity,
    }


def load_env_config(path: str | Path) -> EnvConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except FileNotFoundError:
        raise ConfigurationError(f"config file not found: {path}")
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config file {path} is not valid JSON: {exc}")
    return env_config_from_dict(data)


def save_env_config(config: EnvConfig, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(env_config_to_dict(config), fh, indent=2)
        fh.write("\n")


def with_seed(config: EnvConfig, seed: int) -> EnvConfig:
    return replace(config, seed=seed)
