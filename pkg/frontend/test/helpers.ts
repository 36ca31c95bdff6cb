import { TrialDescriptor } from "../src/protocol.js";

/** Deterministic PRNG so fuzz corpora are reproducible. */
export function mulberry32(seed: number): () => number {
  let a = seed >>> 0;
  return () => {
    a = (a + 0x6d2b79f5) | 0;
    let t = Math.imul(a ^ (a >>> 15), 1 | a);
    t = (t + Math.imul(t ^ (t >>> 7), 61 | t)) ^ t;
    return ((t ^ (t >>> 14)) >>> 0) / 4294967296;
  };
}

export function descriptor(protocol: "DSIS" | "PWC",
                           overrides: Partial<TrialDescriptor> = {}): TrialDescriptor {
  return {
    done: false,
    session: "subject-000",
    trial_index: 3,
    protocol,
    content: "Soldier",
    left: { id: "Soldier-gpcc_p1_r2", asset: "/assets/Soldier-gpcc_p1_r2",
            point_size: 2.0, bit_depth: 10 },
    right: { id: "Soldier-gpcc_p2_r2", asset: "/assets/Soldier-gpcc_p2_r2",
             point_size: 2.0, bit_depth: 10 },
    reference_side: protocol === "DSIS" ? "left" : null,
    time_budget_ms: 12_000,
    ...overrides,
  };
}
