/**
 * Environment-id registry: string ids mapped to config builders, so
 * training scripts can say `make("OPS-v0", {...})` like any other
 * gym-style environment line-up.
 */

import { BridgeOptions } from "./bridge";
import { WrappedEnv } from "./env";

/** Keyword overrides mirroring the core's environment config fields. */
export interface MakeOverrides {
  /** Number of combination stages (shortcut for stack.n_stages). */
  n_stages?: number;
  mode?: "easy" | "medium" | "hard";
  seed?: number;
  max_steps?: number;
  obs_len?: number;
  obs_intensity?: boolean;
  action_scale?: number | null;
  /** Extra pulse/grid fields merged into the stack section. */
  stack?: Record<string, unknown>;
  noise_train?: Record<string, unknown>;
  noise_test?: Record<string, unknown>;
}

export const DEFAULT_ENV_ID = "OPS-v0";

function buildConfig(overrides: MakeOverrides): Record<string, unknown> {
  const { n_stages, stack, mode, ...rest } = overrides;
  const config: Record<string, unknown> = {
    stack: { n_stages: n_stages ?? 2, ...stack },
    mode: mode ?? "medium",
  };
  for (const [key, value] of Object.entries(rest)) {
    if (value !== undefined) {
      config[key] = value;
    }
  }
  return config;
}

/** Instantiate a registered environment id. Only `OPS-v0` exists. */
export function make(
  id: string,
  overrides: MakeOverrides = {},
  options: BridgeOptions = {},
): Promise<WrappedEnv> {
  if (id !== DEFAULT_ENV_ID) {
    throw new Error(`unknown environment id '${id}' (registered: ${DEFAULT_ENV_ID})`);
  }
  return WrappedEnv.make(buildConfig(overrides), options);
}
