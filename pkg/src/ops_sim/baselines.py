"""Reference controllers and a brute-force delay-surface oracle.

Three controllers share one episode-driving harness:

* zero        - holds the initial delays (sanity floor).
* random      - samples uniform actions (exploration floor).
* spgd        - stochastic parallel gradient descent: probe all stages with
                a random +-delta pattern on both sides, then step along the
                pattern weighted by the measured energy difference.

SPGD observes only the scalar output energy, so one update costs three
environment steps (probe up, probe down, apply).  A pure-function variant,
:func:`spgd_step`, runs against a noiseless objective for analysis.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .env import OpsEnv, Transition
from .errors import BudgetError, ConfigurationError, DelayRangeError
from .field import StackConfig, make_pulse_train, optimal_delays, pulse_energy, stack_all
from .logs import transition_record

__all__ = [
    "SpgdConfig",
    "ZeroController",
    "RandomController",
    "SpgdController",
    "make_controller",
    "run_episode",
    "random_agent",
    "make_objective",
    "spgd_step",
    "scan_surface",
    "grid_oracle",
    "OracleResult",
]


@dataclass(frozen=True)
class SpgdConfig:
    """Tuning of the SPGD update.

    ``gain`` multiplies the energy difference normalized by the maximum
    stacked energy, so it is dimensionless.  ``perturb`` is the per-stage
    probe amplitude in ps; None picks a quarter of the action scale when
    run against an environment (a quarter fringe phase probe by default).
    """

    gain: float = 0.2
    perturb: float | None = None
    iters: int = 200

    def __post_init__(self) -> None:
        if not (isinstance(self.gain, (int, float)) and math.isfinite(self.gain)
                and self.gain > 0):
            raise ConfigurationError(f"gain must be positive, got {self.gain!r}")
        if self.perturb is not None and not (
            isinstance(self.perturb, (int, float)) and self.perturb > 0
            and math.isfinite(self.perturb)
        ):
            raise ConfigurationError(f"perturb must be positive, got {self.perturb!r}")
        if not isinstance(self.iters, int) or self.iters < 1:
            raise ConfigurationError(f"iters must be a positive integer, got {self.iters!r}")


class ZeroController:
    """Holds every delay where it is."""

    def reset(self, env: OpsEnv) -> None:
        self._n = env.n_stages

    def act(self, prev: Transition | None) -> np.ndarray:
        return np.zeros(self._n)


class RandomController:
    """Uniform random actions in [-1, 1] per stage."""

    def __init__(self, rng: np.random.Generator):
        self.rng = rng

    def reset(self, env: OpsEnv) -> None:
        self._n = env.n_stages

    def act(self, prev: Transition | None) -> np.ndarray:
        return self.rng.uniform(-1.0, 1.0, size=self._n)


class SpgdController:
    """SPGD over environment steps: +probe, -probe, update, repeat."""

    def __init__(self, config: SpgdConfig, rng: np.random.Generator):
        self.config = config
        self.rng = rng

    def reset(self, env: OpsEnv) -> None:
        self._n = env.n_stages
        self._scale = env.config.action_scale
        self._p_max = env.p_max
        self._steps_left = env.config.max_steps
        delta = self.config.perturb if self.config.perturb is not None else self._scale / 4.0
        if delta * (1.0 + self.config.gain) > self._scale:
            raise ConfigurationError(
                "SPGD probe too large for the action scale; the apply step"
                " (probe plus update) must fit in one unit action"
            )
        self._delta = delta
        self._phase = 0
        self._probe = self._draw_probe()
        self._p_plus = math.nan

    def _draw_probe(self) -> np.ndarray:
        signs = self.rng.integers(0, 2, size=self._n) * 2 - 1
        return self._delta * signs.astype(np.float64)

    def act(self, prev: Transition | None) -> np.ndarray:
        if self._phase == 0 and self._steps_left < 3:
            # a full probe-probe-apply cycle no longer fits before the
            # horizon; hold the current estimate instead of ending mid-probe
            self._steps_left -= 1
            return np.zeros(self._n)
        if self._phase == 0:
            # move from the current estimate to +probe
            action = self._probe / self._scale
        elif self._phase == 1:
            self._p_plus = prev.info["energy"]
            action = -2.0 * self._probe / self._scale
        else:
            p_minus = prev.info["energy"]
            gradient_step = (
                self.config.gain * (self._p_plus - p_minus) / self._p_max * self._probe
            )
            action = (self._probe + gradient_step) / self._scale
            self._probe = self._draw_probe()
        self._phase = (self._phase + 1) % 3
        self._steps_left -= 1
        return action


def make_controller(name: str, rng: np.random.Generator,
                    spgd: SpgdConfig | None = None):
    if name == "zero":
        return ZeroController()
    if name == "random":
        return RandomController(rng)
    if name == "spgd":
        return SpgdController(spgd or SpgdConfig(), rng)
    raise ConfigurationError(f"unknown controller {name!r}")


def run_episode(env: OpsEnv, controller) -> list[dict]:
    """Roll one episode to termination; returns per-step trajectory records."""
    env.reset()
    controller.reset(env)
    records = []
    prev: Transition | None = None
    while True:
        action = controller.act(prev)
        prev = env.step(action)
        records.append(transition_record(env.episode, prev.info["step"], action, prev))
        if prev.done:
            return records


def random_agent(env: OpsEnv, episodes: int, rng: np.random.Generator) -> list[dict]:
    """Roll ``episodes`` episodes of uniform random actions."""
    controller = RandomController(rng)
    records = []
    for _ in range(episodes):
        records.extend(run_episode(env, controller))
    return records


def make_objective(config: StackConfig):
    """Noiseless map from a delay vector to stacked output energy."""
    train = make_pulse_train(config)

    def objective(taus: np.ndarray) -> float:
        return pulse_energy(stack_all(train, config, taus))

    return objective


def spgd_step(objective, taus: np.ndarray, config: SpgdConfig, p_ref: float,
              rng: np.random.Generator) -> np.ndarray:
    """One two-sided SPGD update against a noiseless objective.

    If a probe point falls outside the admissible delay window the probe
    pattern is redrawn once; a second failure propagates.
    """
    taus = np.asarray(taus, dtype=np.float64)
    delta = config.perturb if config.perturb is not None else 1e-4
    for attempt in range(2):
        signs = rng.integers(0, 2, size=taus.size) * 2 - 1
        probe = delta * signs.astype(np.float64)
        try:
            dp = objective(taus + probe) - objective(taus - probe)
        except DelayRangeError:
            if attempt == 1:
                raise
            continue
        return taus + config.gain * (dp / p_ref) * probe
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class OracleResult:
    taus: np.ndarray
    energy: float
    n_evals: int


def _scan_axes(config: StackConfig, center: np.ndarray, halfwidth: float,
               step: float) -> list[np.ndarray]:
    if not (step > 0 and halfwidth >= 0):
        raise ConfigurationError("scan needs positive step and non-negative halfwidth")
    half_n = int(math.floor(halfwidth / step + 1e-9))
    offsets = step * np.arange(-half_n, half_n + 1)
    return [c + offsets for c in center]


def scan_surface(config: StackConfig, center=None, halfwidth: float = 0.01,
                 step: float = 1e-4, budget: int = 2_000_000):
    """Exhaustively evaluate stacked energy on a delay grid.

    Returns ``(axes, energies)`` where ``energies[i, j, ...]`` matches the
    outer product of the per-stage axes.  Estimated cost is checked against
    ``budget`` before any evaluation happens.
    """
    center = optimal_delays(config) if center is None else np.asarray(center, dtype=np.float64)
    if center.shape != (config.n_stages,):
        raise ConfigurationError(
            f"center must have shape ({config.n_stages},), got {center.shape}"
        )
    axes = _scan_axes(config, center, halfwidth, step)
    n_points = math.prod(len(a) for a in axes)
    if n_points > budget:
        raise BudgetError(
            f"scan needs {n_points} evaluations, exceeding the budget of {budget}"
        )
    objective = make_objective(config)
    energies = np.empty(tuple(len(a) for a in axes))
    for idx in itertools.product(*(range(len(a)) for a in axes)):
        taus = np.array([axes[k][i] for k, i in enumerate(idx)])
        energies[idx] = objective(taus)
    return axes, energies


def grid_oracle(config: StackConfig, center=None, halfwidth: float = 0.01,
                step: float = 1e-4, budget: int = 2_000_000) -> OracleResult:
    """Best delay vector on an exhaustive grid (noiseless plant).

    Only tractable for one or two stages; ties resolve to the
    lexicographically smallest delay vector.
    """
    if config.n_stages > 2:
        raise ConfigurationError(
            f"grid_oracle handles at most 2 stages, got {config.n_stages}"
        )
    axes, energies = scan_surface(config, center, halfwidth, step, budget)
    flat = int(np.argmax(energies))  # first maximum in C order = lexicographic tie-break
    idx = np.unravel_index(flat, energies.shape)
    taus = np.array([axes[k][i] for k, i in enumerate(idx)])
    return OracleResult(taus=taus, energy=float(energies[idx]), n_evals=energies.size)
