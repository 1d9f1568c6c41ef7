import { describe, expect, it } from "vitest";

import { WrappedEnv } from "../src/env";
import { actionSequence, maxAbsDiff, referenceRollout, smallConfig } from "./helpers";

const TOL = 1e-12;

async function bindingRollout(config: Record<string, unknown>, actions: number[][]) {
  const env = await WrappedEnv.make(config);
  try {
    const resetObs = await env.reset();
    const steps = [];
    for (const action of actions) {
      steps.push(await env.step(action));
    }
    return { resetObs, steps };
  } finally {
    await env.close();
  }
}

describe("pass-through fidelity", () => {
  for (const mode of ["medium", "hard"] as const) {
    it(`binding matches a direct core rollout element-wise (${mode})`, async () => {
      const config = smallConfig({ mode, seed: 11 });
      const actions = actionSequence(12, 2, 123);
      const [ours, reference] = await Promise.all([
        bindingRollout(config, actions),
        referenceRollout(config, actions),
      ]);

      expect(maxAbsDiff(ours.resetObs, reference.reset_obs)).toBeLessThanOrEqual(TOL);
      expect(ours.steps).toHaveLength(reference.steps.length);
      for (let i = 0; i < actions.length; i += 1) {
        const got = ours.steps[i]!;
        const want = reference.steps[i]!;
        expect(maxAbsDiff(got.observation, want.observation)).toBeLessThanOrEqual(TOL);
        expect(Math.abs(got.reward - want.reward)).toBeLessThanOrEqual(TOL);
        expect(got.done).toBe(want.done);
        expect(Math.abs(got.info.energy - want.info.energy)).toBeLessThanOrEqual(TOL);
        expect(
          Math.abs(got.info.normalized_return - want.info.normalized_return),
        ).toBeLessThanOrEqual(TOL);
        expect(maxAbsDiff(got.info.taus, want.info.taus)).toBeLessThanOrEqual(TOL);
        expect(maxAbsDiff(got.info.taus_real, want.info.taus_real)).toBeLessThanOrEqual(TOL);
      }
    });
  }

  it("same config and seed give identical arrays across server processes", async () => {
    const config = smallConfig({ seed: 29 });
    const actions = actionSequence(8, 2, 7);
    const first = await bindingRollout(config, actions);
    const second = await bindingRollout(config, actions);

    expect(Array.from(second.resetObs)).toEqual(Array.from(first.resetObs));
    for (let i = 0; i < actions.length; i += 1) {
      expect(Array.from(second.steps[i]!.observation)).toEqual(
        Array.from(first.steps[i]!.observation),
      );
      expect(second.steps[i]!.reward).toBe(first.steps[i]!.reward);
    }
  });

  it("two open handles evolve independently under interleaved calls", async () => {
    const config = (seed: number) => smallConfig({ seed });
    const actionsA = actionSequence(10, 2, 31);
    const actionsB = actionSequence(10, 2, 32);

    const solo = await bindingRollout(config(21), actionsA);

    const envA = await WrappedEnv.make(config(21));
    const envB = await WrappedEnv.make(config(22));
    try {
      const interleavedResetA = await envA.reset();
      await envB.reset();
      expect(Array.from(interleavedResetA)).toEqual(Array.from(solo.resetObs));
      for (let i = 0; i < actionsA.length; i += 1) {
        const stepA = await envA.step(actionsA[i]!);
        await envB.step(actionsB[i]!);
        expect(Array.from(stepA.observation)).toEqual(
          Array.from(solo.steps[i]!.observation),
        );
        expect(stepA.reward).toBe(solo.steps[i]!.reward);
      }
    } finally {
      await envA.close();
      await envB.close();
    }
  });
});
