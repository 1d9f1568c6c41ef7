"""Recursive optical pulse stacking: simulator, control environment, baselines."""

from .errors import (
    BudgetError,
    ConfigurationError,
    DelayRangeError,
    EnergyConsistencyError,
    EnvUsageError,
    OpsSimError,
)
from .field import (
    C_UM_PER_PS,
    FieldGrid,
    StackConfig,
    apply_delay,
    energy_in_window,
    make_pulse_train,
    optimal_delays,
    pulse_energy,
    reference_energies,
    single_pulse_energy,
    stack_all,
    stack_stage,
)
from .noise import NoiseConfig, NoiseDraw, drift_mean, noise_generator, sample_noise
from .env import (
    MODES,
    EnvConfig,
    OpsEnv,
    RenderFrame,
    Transition,
    compute_reward,
    init_delays,
    resample_amplitude,
)
from .baselines import (
    OracleResult,
    RandomController,
    SpgdConfig,
    SpgdController,
    ZeroController,
    grid_oracle,
    make_controller,
    make_objective,
    random_agent,
    run_episode,
    scan_surface,
    spgd_step,
)
from .config import (
    env_config_from_dict,
    env_config_to_dict,
    load_env_config,
    save_env_config,
)
from .logs import (
    read_jsonl,
    summarize,
    transition_record,
    write_jsonl,
    write_render_csv,
    write_summary,
)

__version__ = "0.1.0"
