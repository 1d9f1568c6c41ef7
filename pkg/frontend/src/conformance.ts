/**
 * Standard environment-checker protocol for the wrapped environment:
 * spaces declared and consistent, reset-before-step enforced, dtype and
 * shape stable over full episodes of random actions, rewards in range,
 * and a closed handle rejecting calls.
 *
 * Failures are report entries, never exceptions.  The checker consumes the
 * environment it is given: pass a freshly made (never reset) instance, and
 * expect it to be closed afterwards.
 */

import { isUsageError } from "./bridge";
import { WrappedEnv } from "./env";

export interface ConformanceCheck {
  name: string;
  pass: boolean;
  detail: string;
}

export interface ConformanceReport {
  pass: boolean;
  checks: ConformanceCheck[];
}

export interface ConformanceOptions {
  /** Number of random-action episodes to roll out (default 3). */
  episodes?: number;
  /** Seed for the checker's own action stream (default 0). */
  seed?: number;
}

/** Deterministic action stream so conformance runs are reproducible. */
function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let mixed = Math.imul(state ^ (state >>> 15), 1 | state);
    mixed = (mixed + Math.imul(mixed ^ (mixed >>> 7), 61 | mixed)) ^ mixed;
    return ((mixed ^ (mixed >>> 14)) >>> 0) / 4294967296;
  };
}

function describeObservation(obs: Float64Array, space: { shape: number[]; low: number | null }):
  string | null {
  const expected = space.shape[0] ?? -1;
  if (obs.length !== expected) {
    return `observation length ${obs.length} != declared ${expected}`;
  }
  for (const value of obs) {
    if (!Number.isFinite(value)) {
      return `observation contains non-finite value ${value}`;
    }
    if (space.low !== null && value < space.low) {
      return `observation value ${value} below declared low ${space.low}`;
    }
  }
  return null;
}

/**
 * Run the checker protocol against `env` and report per-check outcomes.
 * `report.pass` is true only when every check passed.
 */
export async function apiConformanceCheck(
  env: WrappedEnv,
  options: ConformanceOptions = {},
): Promise<ConformanceReport> {
  const episodes = options.episodes ?? 3;
  const uniform = mulberry32(options.seed ?? 0);
  const checks: ConformanceCheck[] = [];
  const add = (name: string, pass: boolean, detail: string) =>
    checks.push({ name, pass, detail });

  // -- spaces declared ------------------------------------------------
  const obsSpace = env.observationSpace;
  const actSpace = env.actionSpace;
  const spaceProblems: string[] = [];
  if (!Array.isArray(obsSpace?.shape) || obsSpace.shape.length !== 1 || (obsSpace.shape[0] ?? 0) < 1) {
    spaceProblems.push("observation shape is not a positive 1-D box");
  }
  if (obsSpace?.dtype !== "float64") {
    spaceProblems.push(`observation dtype '${obsSpace?.dtype}' != 'float64'`);
  }
  if (obsSpace?.low !== 0) {
    spaceProblems.push(`observation low ${obsSpace?.low} != 0 (amplitudes are non-negative)`);
  }
  if (!Array.isArray(actSpace?.shape) || actSpace.shape.length !== 1 || (actSpace.shape[0] ?? 0) < 1) {
    spaceProblems.push("action shape is not a positive 1-D box");
  }
  if (actSpace?.low !== -1 || actSpace?.high !== 1) {
    spaceProblems.push(`action bounds [${actSpace?.low}, ${actSpace?.high}] != [-1, 1]`);
  }
  if (actSpace?.shape?.[0] !== env.descriptor.n_stages) {
    spaceProblems.push("action length != number of stages");
  }
  add("spaces-declared", spaceProblems.length === 0,
    spaceProblems.length === 0
      ? `observation (${obsSpace.shape[0]},) float64, action (${actSpace.shape[0]},) in [-1, 1]`
      : spaceProblems.join("; "));

  const nActions = actSpace?.shape?.[0] ?? 1;
  const randomAction = () => Array.from({ length: nActions }, () => uniform() * 2 - 1);

  // -- reset-before-step enforced (env must be fresh) -------------------
  try {
    await env.step(new Array<number>(nActions).fill(0));
    add("reset-before-step", false, "step before the first reset was accepted");
  } catch (err) {
    add("reset-before-step", isUsageError(err),
      isUsageError(err)
        ? "step before the first reset raises a usage error"
        : `step before reset failed with unexpected error: ${String(err)}`);
  }

  // -- dtype/shape stability over random episodes ----------------------
  let resetProblem: string | null = null;
  let stepProblem: string | null = null;
  let rewardProblem: string | null = null;
  let terminationProblem: string | null = null;
  let infoProblem: string | null = null;
  const maxSteps = env.descriptor.max_steps;

  for (let episode = 0; episode < episodes; episode += 1) {
    const first = await env.reset();
    resetProblem ??= describeObservation(first, obsSpace);

    let done = false;
    let steps = 0;
    while (!done) {
      if (steps >= maxSteps) {
        terminationProblem ??= `episode ${episode} not done after ${maxSteps} steps`;
        break;
      }
      const result = await env.step(randomAction());
      steps += 1;
      stepProblem ??= describeObservation(result.observation, obsSpace);
      if (!Number.isFinite(result.reward) || result.reward < -1 || result.reward > 0) {
        rewardProblem ??= `reward ${result.reward} outside [-1, 0] at episode ${episode} step ${steps}`;
      }
      if (typeof result.done !== "boolean") {
        terminationProblem ??= `done flag is ${typeof result.done}, not boolean`;
        break;
      }
      const info = result.info;
      if (
        typeof info?.energy !== "number" ||
        typeof info?.normalized_return !== "number" ||
        !Array.isArray(info?.taus_real) ||
        info.taus_real.length !== nActions
      ) {
        infoProblem ??= `info at episode ${episode} step ${steps} lacks energy/normalized_return/taus_real`;
      }
      done = result.done;
    }
  }

  add("reset-observation", resetProblem === null,
    resetProblem ?? `reset observations match (${obsSpace.shape[0]},) float64 over ${episodes} episodes`);
  add("step-observation", stepProblem === null,
    stepProblem ?? "step observations keep declared shape, dtype, and bounds");
  add("reward-range", rewardProblem === null,
    rewardProblem ?? "rewards stay within [-1, 0]");
  add("episode-termination", terminationProblem === null,
    terminationProblem ?? `every episode reports done within ${maxSteps} steps`);
  add("info-contract", infoProblem === null,
    infoProblem ?? "info carries energy, normalized_return, and per-stage taus_real");

  // -- closed handle rejects -------------------------------------------
  await env.close();
  try {
    await env.reset();
    add("closed-rejects", false, "reset on a closed handle was accepted");
  } catch (err) {
    add("closed-rejects", isUsageError(err),
      isUsageError(err)
        ? "reset on a closed handle raises a usage error"
        : `closed reset failed with unexpected error: ${String(err)}`);
  }

  return { pass: checks.every((check) => check.pass), checks };
}
