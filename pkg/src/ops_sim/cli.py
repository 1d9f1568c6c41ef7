"""Batch command line interface.

Subcommands
-----------
simulate   roll episodes of a controller in the environment, write
           ``trajectory.jsonl`` + ``summary.json`` (+ ``run_manifest.json``)
scan       exhaustive delay-surface scan, write ``scan.csv``
oracle     exhaustive argmax over the delay grid, write ``oracle.json``
benchmark  controller final returns across modes/stage counts/seeds,
           write ``benchmark.csv``
serve      line-delimited JSON protocol over stdio for foreign-language
           bindings

Exit codes: 0 success, 1 runtime failure, 2 bad configuration or usage,
3 evaluation budget exceeded.

Seed precedence: ``--seed`` flag, else the config file's ``seed``, else the
``OPS_SIM_SEED`` environment variable, else 0.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import SpgdConfig, grid_oracle, make_controller, run_episode, scan_surface
from .config import env_config_from_dict, env_config_to_dict, load_env_config
from .env import MODES, EnvConfig, OpsEnv
from .errors import BudgetError, ConfigurationError, OpsSimError
from .logs import summarize, write_jsonl, write_summary

__all__ = ["RunManifest", "main", "cmd_simulate", "cmd_scan", "cmd_oracle", "cmd_benchmark"]

ENV_SEED_VAR = "OPS_SIM_SEED"


@dataclasses.dataclass(frozen=True)
class RunManifest:
    """Provenance record written next to every artifact-producing run."""

    command: str
    seed: int
    config: dict
    out_dir: str
    package_version: str

    def write(self, path: Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(dataclasses.asdict(self), fh, indent=2)
            fh.write("\n")


def _resolve_seed(flag_seed: int | None, config_seed: int | None) -> int:
    if flag_seed is not None:
        return flag_seed
    if config_seed is not None:
        return config_seed
    env_seed = os.environ.get(ENV_SEED_VAR)
    if env_seed is not None:
        try:
            return int(env_seed)
        except ValueError:
            raise ConfigurationError(f"{ENV_SEED_VAR}={env_seed!r} is not an integer")
    return 0


def _load_config(args) -> EnvConfig:
    """Config file takes precedence; otherwise build from --mode/--stages."""
    if args.config is not None:
        config = load_env_config(args.config)
        # the file's seed participates in precedence only if it was written out
        with open(args.config, encoding="utf-8") as fh:
            raw = json.load(fh)
        file_seed = raw.get("seed") if isinstance(raw, dict) else None
        seed = _resolve_seed(args.seed, file_seed)
    else:
        config = EnvConfig.default(mode=args.mode, n_stages=args.stages)
        seed = _resolve_seed(args.seed, None)
    return dataclasses.replace(config, seed=seed)


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _spgd_from_args(args) -> SpgdConfig:
    kwargs = {}
    if getattr(args, "spgd_gain", None) is not None:
        kwargs["gain"] = args.spgd_gain
    if getattr(args, "spgd_perturb", None) is not None:
        kwargs["perturb"] = args.spgd_perturb
    return SpgdConfig(**kwargs)


def cmd_simulate(args) -> int:
    config = _load_config(args)
    env = OpsEnv(config, use_test_noise=args.test)
    rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([config.seed, 7])))
    controller = make_controller(args.controller, rng, _spgd_from_args(args))
    records = []
    for _ in range(args.episodes):
        records.extend(run_episode(env, controller))
    out = _out_dir(args)
    write_jsonl(records, out / "trajectory.jsonl")
    summary = summarize(records)
    write_summary(summary, out / "summary.json")
    RunManifest(
        command="simulate",
        seed=config.seed,
        config=env_config_to_dict(config),
        out_dir=str(out),
        package_version=__version__,
    ).write(out / "run_manifest.json")
    json.dump(summary, sys.stdout, indent=2)
    print()
    return 0


def _scan_config(args) -> EnvConfig:
    # scans are noiseless; only the stack section matters
    return _load_config(args)


def cmd_scan(args) -> int:
    config = _scan_config(args)
    stack = config.stack
    halfwidth = args.halfwidth if args.halfwidth is not None else 5.0 * stack.fringe_delay
    step = args.step if args.step is not None else stack.fringe_delay / 20.0
    axes, energies = scan_surface(stack, halfwidth=halfwidth, step=step, budget=args.budget)
    out = _out_dir(args)
    header = ",".join(f"tau{k + 1}_ps" for k in range(stack.n_stages)) + ",energy"
    with open(out / "scan.csv", "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for idx in np.ndindex(energies.shape):
            taus = [axes[k][i] for k, i in enumerate(idx)]
            row = ",".join(repr(float(t)) for t in taus)
            fh.write(f"{row},{float(energies[idx])!r}\n")
    best = int(np.argmax(energies))
    best_idx = np.unravel_index(best, energies.shape)
    best_taus = [float(axes[k][i]) for k, i in enumerate(best_idx)]
    print(json.dumps({"points": int(energies.size), "argmax_ps": best_taus,
                      "max_energy": float(energies[best_idx])}))
    return 0


def cmd_oracle(args) -> int:
    config = _scan_config(args)
    stack = config.stack
    halfwidth = args.halfwidth if args.halfwidth is not None else 2.0 * stack.fringe_delay
    step = args.step if args.step is not None else stack.fringe_delay / 20.0
    result = grid_oracle(stack, halfwidth=halfwidth, step=step, budget=args.budget)
    payload = {
        "taus_ps": [float(t) for t in result.taus],
        "energy": result.energy,
        "n_evals": result.n_evals,
    }
    out = _out_dir(args)
    with open(out / "oracle.json", "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
    print(json.dumps(payload))
    return 0


def cmd_benchmark(args) -> int:
    modes = [m.strip() for m in args.modes.split(",") if m.strip()]
    stage_counts = [int(s) for s in args.stages_list.split(",") if s.strip()]
    for mode in modes:
        if mode not in MODES:
            raise ConfigurationError(f"unknown mode {mode!r}")
    out = _out_dir(args)
    rows = []
    for mode in modes:
        for n_stages in stage_counts:
            finals = []
            for seed in range(args.seeds):
                config = EnvConfig.default(mode=mode, n_stages=n_stages, seed=seed)
                env = OpsEnv(config, use_test_noise=True)
                rng = np.random.Generator(np.random.Philox(np.random.SeedSequence([seed, 7])))
                controller = make_controller(args.controller, rng, _spgd_from_args(args))
                records = run_episode(env, controller)
                finals.append(records[-1]["normalized_return"])
            mean = sum(finals) / len(finals)
            std = (sum((x - mean) ** 2 for x in finals) / len(finals)) ** 0.5
            rows.append((mode, n_stages, args.controller, args.seeds, mean, std))
    with open(out / "benchmark.csv", "w", encoding="utf-8") as fh:
        fh.write("mode,n_stages,controller,seeds,final_return_mean,final_return_std\n")
        for row in rows:
            fh.write(",".join(str(x) for x in row) + "\n")
    for row in rows:
        print(f"{row[0]:>6} n={row[1]} {row[2]}: {row[4]:.4f} +- {row[5]:.4f}")
    return 0


def cmd_serve(args) -> int:
    from .server import serve

    if args.config_json is not None:
        try:
            data = json.loads(args.config_json)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"--config-json is not valid JSON: {exc}")
        config = env_config_from_dict(data)
        inline_seed = data.get("seed") if isinstance(data, dict) else None
        seed = _resolve_seed(args.seed, inline_seed)
        config = dataclasses.replace(config, seed=seed)
    else:
        config = _load_config(args)
    env = OpsEnv(config, use_test_noise=args.test)
    serve(env)
    return 0


def _add_config_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", type=Path, default=None,
                        help="JSON config file (overrides --mode/--stages)")
    parser.add_argument("--mode", choices=MODES, default="medium")
    parser.add_argument("--stages", type=int, default=2,
                        help="number of combination stages")
    parser.add_argument("--seed", type=int, default=None,
                        help=f"seed (default: config seed, then ${ENV_SEED_VAR}, then 0)")
    parser.add_argument("--out", default=".", help="output directory")


def _add_scan_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--halfwidth", type=float, default=None,
                        help="scan halfwidth around the nominal delays, ps")
    parser.add_argument("--step", type=float, default=None, help="grid step, ps")
    parser.add_argument("--budget", type=int, default=2_000_000,
                        help="maximum number of grid evaluations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ops-sim",
        description="Recursive pulse-stacking simulator and control environment",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="cmd", required=True)

    p_sim = sub.add_parser("simulate", help="roll controller episodes")
    _add_config_args(p_sim)
    p_sim.add_argument("--controller", choices=("zero", "random", "spgd"), default="spgd")
    p_sim.add_argument("--episodes", type=int, default=1)
    p_sim.add_argument("--test", action="store_true", help="use the held-out noise stream")
    p_sim.add_argument("--spgd-gain", type=float, default=None)
    p_sim.add_argument("--spgd-perturb", type=float, default=None)
    p_sim.set_defaults(fn=cmd_simulate)

    p_scan = sub.add_parser("scan", help="exhaustive delay-surface scan")
    _add_config_args(p_scan)
    _add_scan_args(p_scan)
    p_scan.set_defaults(fn=cmd_scan)

    p_oracle = sub.add_parser("oracle", help="exhaustive argmax over the delay grid")
    _add_config_args(p_oracle)
    _add_scan_args(p_oracle)
    p_oracle.set_defaults(fn=cmd_oracle)

    p_bench = sub.add_parser("benchmark", help="controller returns across modes and stages")
    p_bench.add_argument("--modes", default="easy,medium,hard")
    p_bench.add_argument("--stages", default="2", dest="stages_list",
                         help="comma-separated stage counts")
    p_bench.add_argument("--controller", choices=("zero", "random", "spgd"), default="spgd")
    p_bench.add_argument("--seeds", type=int, default=10)
    p_bench.add_argument("--spgd-gain", type=float, default=None)
    p_bench.add_argument("--spgd-perturb", type=float, default=None)
    p_bench.add_argument("--out", default=".")
    p_bench.set_defaults(fn=cmd_benchmark)

    p_serve = sub.add_parser("serve", help="serve the env over stdio (JSON lines)")
    _add_config_args(p_serve)
    p_serve.add_argument("--config-json", default=None,
                         help="inline JSON config (overrides --config)")
    p_serve.add_argument("--test", action="store_true")
    p_serve.set_defaults(fn=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except BudgetError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return 3
    except OpsSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BrokenPipeError:
        # Reader went away (e.g. piped into head). Repoint stdout at devnull
        # so the interpreter's exit flush doesn't print a spurious traceback.
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return 1


if __name__ == "__main__":
    sys.exit(main())
