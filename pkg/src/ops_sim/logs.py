"""Trajectory records, JSONL round-trips, and run summaries.

One JSON object per step keeps runs streamable and diffable; summaries are
recomputed from parsed records only, so a summary can always be verified
bit-for-bit against its trajectory file.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .env import Transition

__all__ = [
    "CONVERGENCE_LEVEL",
    "transition_record",
    "write_jsonl",
    "read_jsonl",
    "summarize",
    "write_summary",
    "write_render_csv",
]

# An episode counts as converged at the first step whose normalized
# return reaches this level.
CONVERGENCE_LEVEL = 0.9


def _listify(x) -> list:
    return [float(v) for v in np.asarray(x).ravel()]


def transition_record(episode: int, step: int, action, transition: Transition) -> dict:
    """Flatten one step into a JSON-serializable dict (stable key order)."""
    info = transition.info
    return {
        "episode": int(episode),
        "step": int(step),
        "action": _listify(action),
        "taus": _listify(info["taus"]),
        "taus_real": _listify(info["taus_real"]),
        "energy": float(info["energy"]),
        "normalized_return": float(info["normalized_return"]),
        "reward": float(transition.reward),
        "done": bool(transition.done),
    }


def write_jsonl(records: list[dict], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(json.dumps(record) + "\n")


def read_jsonl(path: str | Path) -> list[dict]:
    records = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records


def summarize(records: list[dict]) -> dict:
    """Aggregate per-episode outcomes of a trajectory.

    Uses only plain-python arithmetic on the record values, so summarizing
    a trajectory and summarizing its JSONL round-trip agree exactly.
    """
    episodes: dict[int, list[dict]] = {}
    for record in records:
        episodes.setdefault(record["episode"], []).append(record)
    finals = []
    convergence_steps = []
    for _, steps in sorted(episodes.items()):
        steps = sorted(steps, key=lambda r: r["step"])
        finals.append(steps[-1]["normalized_return"])
        converged = [r["step"] for r in steps if r["normalized_return"] >= CONVERGENCE_LEVEL]
        if converged:
            convergence_steps.append(converged[0])
    n = len(finals)
    mean = sum(finals) / n if n else None
    std = math.sqrt(sum((x - mean) ** 2 for x in finals) / n) if n else None
    return {
        "episodes": n,
        "final_return_mean": mean,
        "final_return_std": std,
        "converged_episodes": len(convergence_steps),
        "convergence_step_mean": (
            sum(convergence_steps) / len(convergence_steps) if convergence_steps else None
        ),
    }


def write_summary(summary: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")


def write_render_csv(frame, path: str | Path) -> None:
    """Dump a render frame as ``t_ps,amplitude`` rows."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("t_ps,amplitude\n")
        for t, a in zip(frame.times, frame.amplitude):
            fh.write(f"{float(t)!r},{float(a)!r}\n")
