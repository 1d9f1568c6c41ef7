/**
 * Gym-style wrapper around one pulse stacking environment instance.
 *
 * Every number comes from the core process; this wrapper only declares the
 * spaces it was told about, validates call shape before anything crosses
 * the pipe, and rejects use of a closed handle.
 */

import { BridgeOptions, EnvUsageError, Reply, ServeBridge } from "./bridge";

/** Dense box space descriptor, as reported by the core's `spaces` op. */
export interface BoxSpace {
  shape: number[];
  dtype: string;
  low: number | null;
  high: number | null;
}

export interface ObservationSpace extends BoxSpace {
  /** Fixed time window [start, end] in ps covered by the observation bins. */
  window_ps: [number, number];
  /** True when bins hold mean intensity instead of RMS amplitude. */
  intensity: boolean;
}

export interface ActionSpace extends BoxSpace {
  /** Delay change in ps produced by a full-scale (|a|=1) action component. */
  scale_ps: number;
}

/** Per-step diagnostics passed through verbatim from the core. */
export interface StepInfo {
  energy: number;
  normalized_return: number;
  taus: number[];
  taus_real: number[];
  step: number;
  episode: number;
  global_step: number;
  noise_mean: number[];
  truncation: string | null;
  [key: string]: unknown;
}

export interface StepResult {
  observation: Float64Array;
  reward: number;
  done: boolean;
  info: StepInfo;
}

export interface RenderFrame {
  times: Float64Array;
  amplitude: Float64Array;
  energy: number;
  normalized_return: number;
  step_index: number;
}

export interface EnvDescriptor {
  mode: string;
  n_stages: number;
  max_steps: number;
  seed: number;
}

function toFloat64(values: unknown, field: string): Float64Array {
  if (!Array.isArray(values)) {
    throw new TypeError(`server reply field '${field}' is not an array`);
  }
  return Float64Array.from(values as number[]);
}

/**
 * One open handle to a core environment process.
 *
 * Create with {@link WrappedEnv.make} (or the registry's `make("OPS-v0")`).
 * Not shareable across concurrent callers — one wrapper per worker.
 */
export class WrappedEnv {
  readonly observationSpace: ObservationSpace;
  readonly actionSpace: ActionSpace;
  readonly descriptor: EnvDescriptor;

  private readonly bridge: ServeBridge;
  private closedFlag = false;

  private constructor(bridge: ServeBridge, spaces: Reply) {
    this.bridge = bridge;
    this.observationSpace = spaces.observation as ObservationSpace;
    this.actionSpace = spaces.action as ActionSpace;
    this.descriptor = {
      mode: spaces.mode as string,
      n_stages: spaces.n_stages as number,
      max_steps: spaces.max_steps as number,
      seed: spaces.seed as number,
    };
  }

  /**
   * Spawn a core server for `config` (the JSON config-dict format of the
   * core CLI: `{stack: {n_stages: ...}, mode: ..., ...}`) and read its
   * space descriptors.
   */
  static async make(
    config: Record<string, unknown>,
    options: BridgeOptions = {},
  ): Promise<WrappedEnv> {
    const bridge = new ServeBridge(config, options);
    try {
      const spaces = await bridge.request({ op: "spaces" });
      return new WrappedEnv(bridge, spaces);
    } catch (err) {
      await bridge.close();
      throw err;
    }
  }

  get closed(): boolean {
    return this.closedFlag || this.bridge.closed;
  }

  /** Start a new episode; resolves with the initial observation. */
  async reset(): Promise<Float64Array> {
    this.ensureOpen("reset");
    const reply = await this.bridge.request({ op: "reset" });
    return toFloat64(reply.observation, "observation");
  }

  /**
   * Apply one action (shape (N,), finite, clipped to [-1, 1] by the core).
   * Shape and finiteness are checked here, before anything reaches the core.
   */
  async step(action: ArrayLike<number>): Promise<StepResult> {
    this.ensureOpen("step");
    const expected = this.actionSpace.shape[0] ?? 0;
    if (action.length !== expected) {
      throw new EnvUsageError(`action must have shape (${expected},), got (${action.length},)`);
    }
    const values = Array.from(action, (a) => Number(a));
    if (!values.every(Number.isFinite)) {
      throw new EnvUsageError("action must be finite");
    }
    const reply = await this.bridge.request({ op: "step", action: values });
    return {
      observation: toFloat64(reply.observation, "observation"),
      reward: reply.reward as number,
      done: reply.done as boolean,
      info: reply.info as StepInfo,
    };
  }

  /** Snapshot of the current stacked output field and return level. */
  async render(): Promise<RenderFrame> {
    this.ensureOpen("render");
    const reply = await this.bridge.request({ op: "render" });
    return {
      times: toFloat64(reply.times, "times"),
      amplitude: toFloat64(reply.amplitude, "amplitude"),
      energy: reply.energy as number,
      normalized_return: reply.normalized_return as number,
      step_index: reply.step_index as number,
    };
  }

  /** Shut the core process down; afterwards every call rejects. Idempotent. */
  async close(): Promise<void> {
    if (this.closedFlag) {
      return;
    }
    this.closedFlag = true;
    await this.bridge.close();
  }

  private ensureOpen(op: string): void {
    if (this.closed) {
      throw new EnvUsageError(`${op}() on a closed environment handle`);
    }
  }
}
