import { execFile } from "node:child_process";
import { join } from "node:path";

/** Compact env config for fast test rollouts (coarser grid, short episodes). */
export function smallConfig(overrides: Record<string, unknown> = {}): Record<string, unknown> {
  return {
    stack: { n_stages: 2, grid_dt: 0.1 },
    mode: "medium",
    max_steps: 15,
    obs_len: 48,
    seed: 11,
    ...overrides,
  };
}

/** Deterministic uniform stream so both sides of a comparison see the same actions. */
export function mulberry32(seed: number): () => number {
  let state = seed >>> 0;
  return () => {
    state = (state + 0x6d2b79f5) >>> 0;
    let mixed = Math.imul(state ^ (state >>> 15), 1 | state);
    mixed = (mixed + Math.imul(mixed ^ (mixed >>> 7), 61 | mixed)) ^ mixed;
    return ((mixed ^ (mixed >>> 14)) >>> 0) / 4294967296;
  };
}

export function actionSequence(steps: number, nStages: number, seed: number): number[][] {
  const uniform = mulberry32(seed);
  return Array.from({ length: steps }, () =>
    Array.from({ length: nStages }, () => uniform() * 2 - 1),
  );
}

export interface ReferenceStep {
  observation: number[];
  reward: number;
  done: boolean;
  info: {
    energy: number;
    normalized_return: number;
    taus: number[];
    taus_real: number[];
    [key: string]: unknown;
  };
}

export interface ReferenceRollout {
  reset_obs: number[];
  steps: ReferenceStep[];
}

/** Run the same rollout directly in the core (no server), for comparison. */
export function referenceRollout(
  config: Record<string, unknown>,
  actions: number[][],
  testInstance = false,
): Promise<ReferenceRollout> {
  const script = join(__dirname, "reference_rollout.py");
  const python = process.env.OPS_SIM_PYTHON ?? "python3";
  return new Promise((resolve, reject) => {
    const child = execFile(python, [script], { maxBuffer: 64 * 1024 * 1024 }, (err, stdout, stderr) => {
      if (err) {
        reject(new Error(`reference rollout failed: ${err.message}\n${stderr}`));
        return;
      }
      resolve(JSON.parse(stdout) as ReferenceRollout);
    });
    child.stdin?.end(JSON.stringify({ config, actions, test_instance: testInstance }));
  });
}

export function maxAbsDiff(a: ArrayLike<number>, b: ArrayLike<number>): number {
  if (a.length !== b.length) {
    return Number.POSITIVE_INFINITY;
  }
  let worst = 0;
  for (let i = 0; i < a.length; i += 1) {
    worst = Math.max(worst, Math.abs((a[i] as number) - (b[i] as number)));
  }
  return worst;
}
