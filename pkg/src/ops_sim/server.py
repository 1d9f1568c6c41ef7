"""Line-delimited JSON protocol over stdio for foreign-language bindings.

Each request is one JSON object per line with an ``op`` field; each reply
is one JSON object per line with ``ok: true`` plus the payload, or
``ok: false`` plus ``error: {type, message}``.  Errors never kill the
server; only ``close`` (or EOF) ends the loop.

Ops::

    {"op": "spaces"}                -> observation/action descriptors
    {"op": "reset"}                 -> {"observation": [...]}
    {"op": "step", "action": [...]} -> {"observation", "reward", "done", "info"}
    {"op": "render"}                -> {"times", "amplitude", "energy", ...}
    {"op": "close"}                 -> final acknowledgment, then exit
"""

from __future__ import annotations

import json
import sys

import numpy as np

from .env import OpsEnv
from .errors import OpsSimError

__all__ = ["serve", "spaces_payload"]


def spaces_payload(env: OpsEnv) -> dict:
    config = env.config
    return {
        "observation": {
            "shape": [config.obs_len],
            "dtype": "float64",
            "low": 0.0,
            "high": None,
            "window_ps": [env.obs_window[0], env.obs_window[1]],
            "intensity": config.obs_intensity,
        },
        "action": {
            "shape": [env.n_stages],
            "dtype": "float64",
            "low": -1.0,
            "high": 1.0,
            "scale_ps": config.action_scale,
        },
        "mode": config.mode,
        "max_steps": config.max_steps,
        "n_stages": env.n_stages,
        "seed": config.seed,
    }


def _jsonable(value):
    if isinstance(value, np.ndarray):
        return [float(v) for v in value.ravel()]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    return value


def _handle(env: OpsEnv, request: dict) -> tuple[dict, bool]:
    op = request.get("op")
    if op == "spaces":
        return {"ok": True, **spaces_payload(env)}, False
    if op == "reset":
        obs = env.reset()
        return {"ok": True, "observation": obs.tolist()}, False
    if op == "step":
        transition = env.step(request.get("action"))
        return {
            "ok": True,
            "observation": transition.observation.tolist(),
            "reward": float(transition.reward),
            "done": bool(transition.done),
            "info": _jsonable(transition.info),
        }, False
    if op == "render":
        frame = env.render()
        return {
            "ok": True,
            "times": frame.times.tolist(),
            "amplitude": frame.amplitude.tolist(),
            "energy": frame.energy,
            "normalized_return": frame.normalized_return,
            "step_index": frame.step_index,
        }, False
    if op == "close":
        env.close()
        return {"ok": True}, True
    return {
        "ok": False,
        "error": {"type": "ProtocolError", "message": f"unknown op {op!r}"},
    }, False


def serve(env: OpsEnv, stdin=None, stdout=None) -> None:
    """Serve one environment until ``close`` or EOF."""
    stdin = sys.stdin if stdin is None else stdin
    stdout = sys.stdout if stdout is None else stdout
    for line in stdin:
        line = line.strip()
        if not line:
            continue
        try:
            request = json.loads(line)
            if not isinstance(request, dict):
                raise ValueError("request must be a JSON object")
        except ValueError as exc:
            reply, done = {
                "ok": False,
                "error": {"type": "ProtocolError", "message": str(exc)},
            }, False
        else:
            try:
                reply, done = _handle(env, request)
            except OpsSimError as exc:
                reply, done = {
                    "ok": False,
                    "error": {"type": type(exc).__name__, "message": str(exc)},
                }, False
            except Exception as exc:  # malformed payloads must not kill the server
                reply, done = {
                    "ok": False,
                    "error": {"type": "InternalError", "message": f"{type(exc).__name__}: {exc}"},
                }, False
        stdout.write(json.dumps(reply) + "\n")
        stdout.flush()
        if done:
            break
