import { describe, expect, it } from "vitest";

import { apiConformanceCheck } from "../src/conformance";
import { make } from "../src/registry";
import { smallConfig } from "./helpers";
import { WrappedEnv } from "../src/env";

describe("api conformance check", () => {
  it("passes on the default environment", async () => {
    const env = await make("OPS-v0", { seed: 3 });
    const report = await apiConformanceCheck(env);
    const failed = report.checks.filter((check) => !check.pass);
    expect(failed, JSON.stringify(failed, null, 2)).toHaveLength(0);
    expect(report.pass).toBe(true);
    expect(report.checks.map((check) => check.name)).toEqual([
      "spaces-declared",
      "reset-before-step",
      "reset-observation",
      "step-observation",
      "reward-range",
      "episode-termination",
      "info-contract",
      "closed-rejects",
    ]);
  });

  it("fails the shape checks when the declared observation length is wrong", async () => {
    const env = await WrappedEnv.make(smallConfig({ obs_len: 32 }));
    const declared = env.observationSpace;
    (env as unknown as { observationSpace: unknown }).observationSpace = {
      ...declared,
      shape: [declared.shape[0]! + 1],
    };
    const report = await apiConformanceCheck(env, { episodes: 1 });
    const byName = new Map(report.checks.map((check) => [check.name, check]));
    expect(report.pass).toBe(false);
    expect(byName.get("reset-observation")!.pass).toBe(false);
    expect(byName.get("reset-observation")!.detail).toContain("33");
    expect(byName.get("step-observation")!.pass).toBe(false);
    // unrelated checks still pass: failures are entries, not exceptions
    expect(byName.get("reward-range")!.pass).toBe(true);
    expect(byName.get("closed-rejects")!.pass).toBe(true);
  });

  it("is reproducible for a fixed checker seed", async () => {
    const reports = [];
    for (let run = 0; run < 2; run += 1) {
      const env = await WrappedEnv.make(smallConfig({ max_steps: 6 }));
      reports.push(await apiConformanceCheck(env, { episodes: 2, seed: 9 }));
    }
    expect(reports[1]).toEqual(reports[0]);
  });
});
