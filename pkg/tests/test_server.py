"""Stdio JSON protocol used by foreign-language bindings."""

import io
import json

from ops_sim import EnvConfig, OpsEnv
from ops_sim.server import serve, spaces_payload


def small_env():
    cfg = EnvConfig.default(mode="medium", n_stages=1, seed=2)
    cfg = EnvConfig(stack=cfg.stack, mode="medium", max_steps=10, obs_len=16, seed=2)
    return OpsEnv(cfg)


def talk(requests):
    env = small_env()
    stdin = io.StringIO("".join(json.dumps(r) + "\n" for r in requests))
    stdout = io.StringIO()
    serve(env, stdin=stdin, stdout=stdout)
    return [json.loads(line) for line in stdout.getvalue().splitlines()]


class TestProtocol:
    def test_full_session(self):
        replies = talk([
            {"op": "spaces"},
            {"op": "reset"},
            {"op": "step", "action": [0.5]},
            {"op": "render"},
            {"op": "close"},
        ])
        spaces, reset, step, render, close = replies
        assert spaces["ok"] and spaces["observation"]["shape"] == [16]
        assert spaces["action"] == {
            "shape": [1], "dtype": "float64", "low": -1.0, "high": 1.0,
            "scale_ps": spaces["action"]["scale_ps"],
        }
        assert reset["ok"] and len(reset["observation"]) == 16
        assert step["ok"] and step["done"] is False
        assert isinstance(step["reward"], float)
        assert step["info"]["step"] == 1
        assert render["ok"] and len(render["amplitude"]) == 16
        assert close["ok"]

    def test_errors_keep_serving(self):
        replies = talk([
            {"op": "step", "action": [0.0]},        # before reset
            "not json at all",
            {"op": "warp"},
            {"op": "reset"},
            {"op": "step", "action": [0.0, 0.0]},   # wrong shape
            {"op": "step", "action": "zero"},        # wrong type
            {"op": "step", "action": [0.0]},
            {"op": "close"},
        ])
        assert [r["ok"] for r in replies] == [
            False, False, False, True, False, False, True, True,
        ]
        assert replies[0]["error"]["type"] == "EnvUsageError"
        assert replies[1]["error"]["type"] == "ProtocolError"
        assert replies[2]["error"]["type"] == "ProtocolError"
        assert replies[4]["error"]["type"] == "EnvUsageError"

    def test_raw_invalid_line(self):
        env = small_env()
        stdin = io.StringIO('{"op": "reset"}\n[1, 2, 3]\n{"op": "close"}\n')
        stdout = io.StringIO()
        serve(env, stdin=stdin, stdout=stdout)
        replies = [json.loads(line) for line in stdout.getvalue().splitlines()]
        assert replies[0]["ok"]
        assert not replies[1]["ok"]
        assert replies[2]["ok"]

    def test_close_ends_loop(self):
        env = small_env()
        stdin = io.StringIO('{"op": "close"}\n{"op": "reset"}\n')
        stdout = io.StringIO()
        serve(env, stdin=stdin, stdout=stdout)
        replies = stdout.getvalue().splitlines()
        assert len(replies) == 1

    def test_eof_without_close(self):
        env = small_env()
        stdin = io.StringIO('{"op": "reset"}\n')
        stdout = io.StringIO()
        serve(env, stdin=stdin, stdout=stdout)
        assert json.loads(stdout.getvalue().splitlines()[0])["ok"]

    def test_spaces_payload_shape(self):
        env = small_env()
        payload = spaces_payload(env)
        assert payload["observation"]["dtype"] == "float64"
        assert payload["observation"]["low"] == 0.0
        assert payload["n_stages"] == 1
        assert payload["max_steps"] == 10
        lo, hi = payload["observation"]["window_ps"]
        assert lo < hi
