"""Stochastic delay-line disturbances: fast jitter plus slow drift.

Every environment step, each delay line picks up an offset

    e_k = mu(step) * scale_k + sigma * xi_k,     xi_k ~ N(0, 1) i.i.d.

``mu(step)`` is a deterministic piecewise-linear drift schedule over the
global step index (shared across episodes), held constant beyond its first
and last knots.  ``drift_scales`` optionally gives each stage its own drift
gain; by default all stages see the same drift.  The fast part is drawn
independently per stage and per step (it does not accumulate).

Draws come from a counter-based Philox generator seeded from the triple
(noise seed, environment seed, instance index), so distinct environment
instances get decorrelated but individually reproducible streams.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError

__all__ = ["NoiseConfig", "NoiseDraw", "drift_mean", "sample_noise", "noise_generator"]


@dataclass(frozen=True)
class NoiseConfig:
    """Disturbance parameters for all delay lines.

    Parameters
    ----------
    sigma:
        Standard deviation of the per-step Gaussian jitter, ps.
    drift_knots:
        Sequence of ``(step, mean_offset_ps)`` pairs with strictly
        increasing non-negative steps; linearly interpolated, constant
        outside.  Empty means no drift.
    seed:
        Root seed of the jitter stream.
    drift_scales:
        Optional per-stage multipliers on the drift mean; None applies the
        same drift to every stage.
    """

    sigma: float = 0.0
    drift_knots: tuple[tuple[int, float], ...] = ()
    seed: int = 0
    drift_scales: tuple[float, ...] | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.sigma, (int, float)) and math.isfinite(self.sigma)
                and self.sigma >= 0):
            raise ConfigurationError(f"sigma must be a non-negative number, got {self.sigma!r}")
        knots = []
        for pair in self.drift_knots:
            step, value = pair
            if isinstance(step, bool) or not isinstance(step, int) or step < 0:
                raise ConfigurationError(
                    f"drift knot steps must be non-negative integers, got {step!r}"
                )
            value = float(value)
            if not math.isfinite(value):
                raise ConfigurationError(f"drift knot values must be finite, got {value!r}")
            knots.append((step, value))
        knots = tuple(knots)
        steps = [s for s, _ in knots]
        if any(b <= a for a, b in zip(steps, steps[1:])):
            raise ConfigurationError("drift knot steps must be strictly increasing")
        object.__setattr__(self, "drift_knots", knots)
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.drift_scales is not None:
            scales = tuple(float(s) for s in self.drift_scales)
            if not all(math.isfinite(s) for s in scales):
                raise ConfigurationError("drift_scales must be finite")
            object.__setattr__(self, "drift_scales", scales)

    @property
    def quiet(self) -> bool:
        """True when this config can never perturb a delay."""
        return self.sigma == 0.0 and all(v == 0.0 for _, v in self.drift_knots)


@dataclass(frozen=True)
class NoiseDraw:
    """One realization of the per-stage delay offsets at a given step."""

    offsets: np.ndarray
    mean: np.ndarray
    step: int


def drift_mean(config: NoiseConfig, step: int) -> float:
    """Drift mean at a global step: piecewise-linear, clamped at the ends."""
    knots = config.drift_knots
    if not knots:
        return 0.0
    steps = np.array([s for s, _ in knots], dtype=np.float64)
    values = np.array([v for _, v in knots], dtype=np.float64)
    return float(np.interp(step, steps, values))


def sample_noise(
    config: NoiseConfig,
    n_stages: int,
    step: int,
    rng: np.random.Generator,
) -> NoiseDraw:
    """Draw the delay offsets all stages experience at ``step``.

    The normal variates are always consumed, even at ``sigma == 0``, so a
    stream stays aligned when only sigma differs between two configs.
    """
    if config.drift_scales is not None and len(config.drift_scales) != n_stages:
        raise ConfigurationError(
            f"drift_scales has {len(config.drift_scales)} entries for {n_stages} stages"
        )
    scales = np.ones(n_stages) if config.drift_scales is None else np.asarray(config.drift_scales)
    mean = drift_mean(config, step) * scales
    offsets = mean + config.sigma * rng.standard_normal(n_stages)
    return NoiseDraw(offsets=offsets, mean=mean, step=int(step))


def noise_generator(config: NoiseConfig, env_seed: int, instance_index: int = 0) -> np.random.Generator:
    """Philox stream for one environment instance's jitter."""
    ss = np.random.SeedSequence([config.seed, env_seed, instance_index])
    return np.random.Generator(np.random.Philox(ss))
