/**
 * Passive impairment-rating trial: both models rotate 360 degrees in
 * 12 seconds, hold still for one second, then the five-level vote panel
 * appears. There is no replay and no way to vote early; voting time is
 * unlimited. All timing flows through caller-provided timestamps so the
 * machine is exactly testable.
 */

import { buildVotePayload, TrialDescriptor, VotePayload } from "./protocol.js";

export const ROTATION_MS = 12_000;
export const HOLD_MS = 1_000;
export const FULL_TURN_DEG = 360;

export type DsisPhase = "loading" | "rotating" | "holding" | "voting" | "submitted";

export class DsisTrial {
  readonly descriptor: TrialDescriptor;
  private phase: DsisPhase = "loading";
  private startedAt = 0;
  private payload: VotePayload | null = null;

  constructor(descriptor: TrialDescriptor) {
    if (descriptor.protocol !== "DSIS") {
      throw new Error(`DSIS trial got a ${descriptor.protocol} descriptor`);
    }
    this.descriptor = descriptor;
  }

  /** Call when both assets have rendered their first frame. */
  assetsReady(nowMs: number): void {
    if (this.phase === "loading") {
      this.phase = "rotating";
      this.startedAt = nowMs;
    }
  }

  /** Advance phases; call every frame. */
  tick(nowMs: number): DsisPhase {
    if (this.phase === "rotating" && nowMs - this.startedAt >= ROTATION_MS) {
      this.phase = "holding";
    }
    if (this.phase === "holding" && nowMs - this.startedAt >= ROTATION_MS + HOLD_MS) {
      this.phase = "voting";
    }
    return this.phase;
  }

  currentPhase(): DsisPhase {
    return this.phase;
  }

  /** Rotation around the vertical axis; frozen once the turn completes. */
  rotationAngleDeg(nowMs: number): number {
    if (this.phase === "loading") return 0;
    const elapsed = Math.min(nowMs - this.startedAt, ROTATION_MS);
    return (FULL_TURN_DEG * elapsed) / ROTATION_MS;
  }

  votePanelVisible(): boolean {
    return this.phase === "voting";
  }

  /**
   * Register a score. Input is ignored (returns null) until the panel is
   * up; once submitted the machine refuses further votes.
   */
  submitVote(score: number, nowMs: number): VotePayload | null {
    if (this.phase !== "voting") {
      return null;
    }
    this.payload = buildVotePayload(
      "DSIS", this.descriptor.trial_index, score, nowMs - this.startedAt, nowMs);
    this.phase = "submitted";
    return this.payload;
  }

  submittedPayload(): VotePayload | null {
    return this.payload;
  }
}
