"""Episodic control environment around the pulse-stacking simulator.

State is the vector of commanded delay-line offsets.  Each step the agent
supplies a bounded increment per stage, the plant adds jitter and drift on
top of the command, the full stack is re-evaluated, and the agent observes
a resampled amplitude picture of the output window together with a reward

    r = -((P - P_max) / (P_max - P_min))^2

normalized so r = 0 at perfect stacking and r = -1 at full extinction.

Difficulty modes:

* ``easy``   - delays start within a quarter fringe of the optimum
               (carrier phase within +-pi/2 per stage), no disturbances.
* ``medium`` - delays start anywhere within +-2 pulse widths of the
               optimum (many fringes away), no disturbances.
* ``hard``   - medium's initialization plus jitter and slow drift, with
               separate train and test disturbance realizations.

Episodes run a fixed horizon.  An episode also ends early, flagged in
``info``, when a commanded delay leaves its trust region around the
nominal stacking point.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field as dc_field

import numpy as np

from .errors import (
    ConfigurationError,
    DelayRangeError,
    EnergyConsistencyError,
    EnvUsageError,
)
from .field import (
    FieldGrid,
    StackConfig,
    make_pulse_train,
    optimal_delays,
    pulse_energy,
    reference_energies,
    stack_all,
)
from .noise import NoiseConfig, noise_generator, sample_noise

__all__ = [
    "MODES",
    "EnvConfig",
    "Transition",
    "RenderFrame",
    "OpsEnv",
    "init_delays",
    "compute_reward",
    "resample_amplitude",
]

MODES = ("easy", "medium", "hard")

# Steps are tolerated until a commanded delay strays this many periods from
# its nominal value; beyond that the pair masks would degrade, so truncate.
DELAY_MARGIN_PERIODS = 0.25

# Reward tolerates energies outside [p_min, p_max] up to this relative
# excess (clamped, with a warning); beyond it the physics is broken.
ENERGY_CLAMP_REL = 1e-6
# Excess below this is FFT round-off and is clamped without a warning.
ENERGY_QUIET_REL = 1e-12


@dataclass(frozen=True)
class EnvConfig:
    """Complete set of environment parameters.

    ``action_scale`` (ps per unit action) defaults to half a fringe so a
    unit action can always cross an interference fringe in two steps.
    ``obs_len`` amplitude samples cover a fixed window around the stacked
    output slot.  ``seed`` drives initialization; disturbance streams are
    seeded by the noise configs combined with this seed.
    """

    stack: StackConfig
    noise_train: NoiseConfig = dc_field(default_factory=NoiseConfig)
    noise_test: NoiseConfig = dc_field(default_factory=NoiseConfig)
    mode: str = "medium"
    max_steps: int = 200
    action_scale: float | None = None
    obs_len: int = 1024
    seed: int = 0
    obs_intensity: bool = False

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ConfigurationError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.mode != "hard":
            for name in ("noise_train", "noise_test"):
                if not getattr(self, name).quiet:
                    raise ConfigurationError(
                        f"mode {self.mode!r} is disturbance-free but {name} has noise"
                    )
        if not isinstance(self.max_steps, int) or self.max_steps < 1:
            raise ConfigurationError(f"max_steps must be a positive integer, got {self.max_steps!r}")
        if not isinstance(self.obs_len, int) or self.obs_len < 8:
            raise ConfigurationError(f"obs_len must be an integer >= 8, got {self.obs_len!r}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ConfigurationError(f"seed must be a non-negative integer, got {self.seed!r}")
        if self.action_scale is None:
            object.__setattr__(self, "action_scale", self.stack.fringe_delay / 2.0)
        elif not (isinstance(self.action_scale, (int, float)) and self.action_scale > 0
                  and math.isfinite(self.action_scale)):
            raise ConfigurationError(f"action_scale must be positive, got {self.action_scale!r}")
        if self.action_scale > DELAY_MARGIN_PERIODS * self.stack.period:
            raise ConfigurationError(
                "action_scale exceeds the delay trust region; single steps must not"
                " be able to jump out of it"
            )

    @classmethod
    def default(cls, mode: str = "medium", n_stages: int = 2, seed: int = 0,
                **stack_overrides) -> "EnvConfig":
        """Canonical config for a mode: quiet for easy/medium, drifting for hard."""
        stack = StackConfig(n_stages=n_stages, **stack_overrides)
        if mode == "hard":
            f = stack.fringe_delay
            train = NoiseConfig(
                sigma=0.02 * f,
                drift_knots=((0, 0.0), (10_000, 0.3 * f)),
                seed=101,
            )
            test = NoiseConfig(
                sigma=0.02 * f,
                drift_knots=((0, 0.1 * f), (10_000, -0.2 * f)),
                seed=202,
            )
        else:
            train = NoiseConfig()
            test = NoiseConfig()
        return cls(stack=stack, noise_train=train, noise_test=test, mode=mode, seed=seed)


@dataclass(frozen=True)
class Transition:
    """Result of one environment step."""

    observation: np.ndarray
    reward: float
    done: bool
    info: dict


@dataclass(frozen=True)
class RenderFrame:
    """Plottable snapshot of the current output window."""

    times: np.ndarray
    amplitude: np.ndarray
    energy: float
    normalized_return: float
    step_index: int


def init_delays(config: EnvConfig, rng: np.random.Generator) -> np.ndarray:
    """Draw episode-start delays around the nominal stacking point.

    Easy mode stays within a quarter fringe per stage (all carrier phases
    within +-pi/2, so every pair still adds constructively); the other
    modes start anywhere within +-2 pulse widths, i.e. hundreds of fringes.
    """
    nominal = optimal_delays(config.stack)
    if config.mode == "easy":
        radius = config.stack.fringe_delay / 4.0
    else:
        radius = 2.0 * config.stack.pulse_fwhm
    return nominal + rng.uniform(-radius, radius, size=config.stack.n_stages)


def compute_reward(energy: float, p_max: float, p_min: float = 0.0) -> float:
    """Quadratic penalty on the shortfall from maximum stacked energy.

    Values outside [p_min, p_max] up to ``ENERGY_CLAMP_REL`` (relative to
    the span) are clamped, warning unless they are mere round-off; larger
    violations raise :class:`EnergyConsistencyError`.
    """
    span = p_max - p_min
    if not (span > 0 and math.isfinite(span)):
        raise EnergyConsistencyError(f"invalid energy bounds [{p_min}, {p_max}]")
    excess = max(p_min - energy, energy - p_max, 0.0)
    if excess > ENERGY_CLAMP_REL * span:
        raise EnergyConsistencyError(
            f"energy {energy!r} outside [{p_min!r}, {p_max!r}] beyond tolerance"
        )
    if excess > ENERGY_QUIET_REL * span:
        warnings.warn(
            f"energy {energy!r} clamped into [{p_min!r}, {p_max!r}]",
            RuntimeWarning,
            stacklevel=2,
        )
    energy = min(max(energy, p_min), p_max)
    return -(((energy - p_max) / span) ** 2)


def resample_amplitude(field: FieldGrid, lo: float, hi: float, n: int,
                       intensity: bool = False) -> np.ndarray:
    """Bin ``|A|`` onto ``n`` uniform bins spanning [lo, hi), RMS per bin.

    Binning integrates the energy profile, so the resampled picture carries
    the same energy as the underlying samples regardless of ``n``.  With
    ``intensity`` the mean |A|^2 per bin is returned instead of its root.
    """
    absq = np.abs(field.samples) ** 2
    # cumulative energy at sample boundaries t0 + k*dt, k = 0..len
    cum = np.concatenate(([0.0], np.cumsum(absq) * field.dt))
    edges = np.linspace(lo, hi, n + 1)
    pos = np.clip((edges - field.t0) / field.dt, 0.0, float(absq.size))
    cum_at_edges = np.interp(pos, np.arange(absq.size + 1, dtype=np.float64), cum)
    bin_energy = np.diff(cum_at_edges)
    mean_intensity = bin_energy / ((hi - lo) / n)
    return mean_intensity if intensity else np.sqrt(mean_intensity)


class OpsEnv:
    """Fixed-horizon delay-control environment over the stacking simulator.

    Parameters
    ----------
    config:
        Environment parameters.
    use_test_noise:
        Select the held-out disturbance realization instead of the training
        one (only meaningful in hard mode).
    instance_index:
        Decorrelates streams of env copies sharing one config and seed.
    """

    def __init__(self, config: EnvConfig, *, use_test_noise: bool = False,
                 instance_index: int = 0):
        self.config = config
        self.noise_config = config.noise_test if use_test_noise else config.noise_train
        stack = config.stack
        self._train = make_pulse_train(stack)
        self._nominal = optimal_delays(stack)
        self.p_max, self.p_min = reference_energies(stack)
        self.margin = DELAY_MARGIN_PERIODS * stack.period
        half = stack.n_stages * self.margin + stack.guard
        center = (stack.n_pulses - 1) * stack.period
        self.obs_window = (center - half, center + half)
        self._obs_times = np.linspace(*self.obs_window, config.obs_len, endpoint=False)
        self._obs_times += 0.5 * (self.obs_window[1] - self.obs_window[0]) / config.obs_len

        base = np.random.SeedSequence([config.seed, instance_index])
        self._init_rng = np.random.Generator(np.random.Philox(base.spawn(1)[0]))
        self._noise_rng = noise_generator(self.noise_config, config.seed, instance_index)

        self.global_step = 0
        self.episode = -1
        self._taus: np.ndarray | None = None
        self._step_in_episode = 0
        self._needs_reset = True
        self._closed = False
        self._frame: RenderFrame | None = None

    # -- plumbing ---------------------------------------------------------

    @property
    def n_stages(self) -> int:
        return self.config.stack.n_stages

    @property
    def taus(self) -> np.ndarray:
        """Commanded delays (disturbances excluded)."""
        if self._taus is None:
            raise EnvUsageError("environment has not been reset")
        return self._taus.copy()

    def _check_open(self) -> None:
        if self._closed:
            raise EnvUsageError("environment is closed")

    def _evaluate(self, taus_real: np.ndarray) -> tuple[np.ndarray, float]:
        """Stack at physical delays; out-of-window delays read as extinction."""
        try:
            out = stack_all(self._train, self.config.stack, taus_real)
        except DelayRangeError:
            return np.zeros(self.config.obs_len), 0.0
        obs = resample_amplitude(out, *self.obs_window, self.config.obs_len,
                                 intensity=self.config.obs_intensity)
        return obs, pulse_energy(out)

    def _record_frame(self, obs: np.ndarray, energy: float) -> RenderFrame:
        if self.config.obs_intensity:
            amplitude = np.sqrt(obs)
        else:
            amplitude = obs.copy()
        frame = RenderFrame(
            times=self._obs_times.copy(),
            amplitude=amplitude,
            energy=energy,
            normalized_return=energy / self.p_max,
            step_index=self._step_in_episode,
        )
        self._frame = frame
        return frame

    # -- episodic protocol --------------------------------------------------

    def reset(self) -> np.ndarray:
        """Start a new episode; returns the initial observation."""
        self._check_open()
        self.episode += 1
        self._step_in_episode = 0
        self._needs_reset = False
        self._taus = init_delays(self.config, self._init_rng)
        draw = sample_noise(self.noise_config, self.n_stages, self.global_step,
                            self._noise_rng)
        obs, energy = self._evaluate(self._taus + draw.offsets)
        self._record_frame(obs, energy)
        return obs

    def step(self, action) -> Transition:
        """Apply per-stage delay increments (clipped to [-1, 1] action units)."""
        self._check_open()
        if self._needs_reset:
            raise EnvUsageError("call reset() before step()")
        action = np.asarray(action, dtype=np.float64)
        if action.shape != (self.n_stages,):
            raise EnvUsageError(
                f"action must have shape ({self.n_stages},), got {action.shape}"
            )
        if not np.all(np.isfinite(action)):
            raise EnvUsageError("action must be finite")

        self._taus = self._taus + self.config.action_scale * np.clip(action, -1.0, 1.0)
        self.global_step += 1
        self._step_in_episode += 1
        draw = sample_noise(self.noise_config, self.n_stages, self.global_step,
                            self._noise_rng)
        taus_real = self._taus + draw.offsets
        obs, energy = self._evaluate(taus_real)
        reward = compute_reward(energy, self.p_max, self.p_min)

        out_of_range = bool(np.any(np.abs(self._taus - self._nominal) > self.margin))
        horizon = self._step_in_episode >= self.config.max_steps
        done = out_of_range or horizon
        if done:
            self._needs_reset = True
        cause = "delay_out_of_range" if out_of_range else ("max_steps" if horizon else None)
        info = {
            "energy": energy,
            "normalized_return": energy / self.p_max,
            "taus": self._taus.copy(),
            "taus_real": taus_real,
            "noise_mean": draw.mean,
            "step": self._step_in_episode,
            "global_step": self.global_step,
            "episode": self.episode,
            "truncation": cause,
        }
        self._record_frame(obs, energy)
        return Transition(observation=obs, reward=reward, done=done, info=info)

    def render(self) -> RenderFrame:
        """Snapshot of the most recent output window (reset or step)."""
        self._check_open()
        if self._frame is None:
            raise EnvUsageError("nothing to render before reset()")
        return self._frame

    def close(self) -> None:
        """Mark the environment unusable; further reset/step calls raise."""
        self._closed = True
