import { describe, expect, it } from "vitest";

import { DSIS_SCALE_LABELS, buildVotePayload, validateVotePayload } from "../src/protocol.js";

describe("vote payload schema", () => {
  it("accepts every legal DSIS score", () => {
    for (const score of [1, 2, 3, 4, 5]) {
      expect(validateVotePayload("DSIS", {
        trial_index: 0, response: score, elapsed_ms: 13_000,
      })).toEqual([]);
    }
  });

  it("rejects out-of-scale DSIS scores", () => {
    for (const bad of [0, 6, 2.5, "left"]) {
      const errors = validateVotePayload("DSIS", {
        trial_index: 0, response: bad as never, elapsed_ms: 13_000,
      });
      expect(errors.length).toBeGreaterThan(0);
    }
  });

  it("accepts every legal PWC choice and nothing else", () => {
    for (const choice of ["left", "right", "not_sure"] as const) {
      expect(validateVotePayload("PWC", {
        trial_index: 2, response: choice, elapsed_ms: 9_000,
      })).toEqual([]);
    }
    expect(validateVotePayload("PWC", {
      trial_index: 2, response: 3, elapsed_ms: 9_000,
    }).length).toBeGreaterThan(0);
    expect(validateVotePayload("PWC", {
      trial_index: 2, response: "maybe" as never, elapsed_ms: 9_000,
    }).length).toBeGreaterThan(0);
  });

  it("rejects negative latency and fractional indices", () => {
    expect(validateVotePayload("DSIS", {
      trial_index: -1, response: 4, elapsed_ms: 100,
    }).length).toBeGreaterThan(0);
    expect(validateVotePayload("DSIS", {
      trial_index: 1.5, response: 4, elapsed_ms: 100,
    }).length).toBeGreaterThan(0);
    expect(validateVotePayload("DSIS", {
      trial_index: 0, response: 4, elapsed_ms: -5,
    }).length).toBeGreaterThan(0);
  });

  it("buildVotePayload throws on anything the server would reject", () => {
    expect(() => buildVotePayload("DSIS", 0, 6, 13_000)).toThrow(/1\.\.5/);
    expect(() => buildVotePayload("PWC", 0, "nah" as never, 9_000)).toThrow();
    const ok = buildVotePayload("PWC", 4, "not_sure", 9_000, 1234);
    expect(ok).toEqual({
      trial_index: 4, response: "not_sure", elapsed_ms: 9_000, timestamp: 1234,
    });
  });

  it("the rating scale carries the five impairment labels", () => {
    expect(DSIS_SCALE_LABELS.map(([score]) => score)).toEqual([5, 4, 3, 2, 1]);
    expect(DSIS_SCALE_LABELS[0][1]).toBe("Imperceptible");
    expect(DSIS_SCALE_LABELS[4][1]).toBe("Very annoying");
  });
});
