/**
 * Interactive pairwise-comparison trial: one synchronized orbit drives
 * both viewports, constrained to the upper hemisphere; at the 12 second
 * inspection cap the view locks and the three-way panel
 * (left / right / Not Sure) appears. Voting time is unlimited.
 */

import { OrbitCamera, cameraDistanceForBitDepth } from "./camera.js";
import { buildVotePayload, PwcChoice, TrialDescriptor, VotePayload } from "./protocol.js";

export const INSPECTION_MS = 12_000;

export type PwcPhase = "loading" | "inspecting" | "voting" | "submitted";

export class PwcTrial {
  readonly descriptor: TrialDescriptor;
  /** one camera state shared by both viewports */
  readonly camera: OrbitCamera;
  private phase: PwcPhase = "loading";
  private startedAt = 0;
  private payload: VotePayload | null = null;

  constructor(descriptor: TrialDescriptor,
              target: [number, number, number] = [0, 0, 0]) {
    if (descriptor.protocol !== "PWC") {
      throw new Error(`PWC trial got a ${descriptor.protocol} descriptor`);
    }
    this.descriptor = descriptor;
    this.camera = new OrbitCamera(
      target, cameraDistanceForBitDepth(descriptor.left.bit_depth));
  }

  assetsReady(nowMs: number): void {
    if (this.phase === "loading") {
      this.phase = "inspecting";
      this.startedAt = nowMs;
    }
  }

  tick(nowMs: number): PwcPhase {
    if (this.phase === "inspecting"
        && nowMs - this.startedAt >= this.inspectionBudget()) {
      this.phase = "voting";
    }
    return this.phase;
  }

  currentPhase(): PwcPhase {
    return this.phase;
  }

  inspectionBudget(): number {
    return this.descriptor.time_budget_ms > 0
      ? this.descriptor.time_budget_ms
      : INSPECTION_MS;
  }

  remainingMs(nowMs: number): number {
    if (this.phase === "loading") return this.inspectionBudget();
    return Math.max(0, this.inspectionBudget() - (nowMs - this.startedAt));
  }

  /**
   * Forward a pointer drag to the shared camera. The timer keeps running
   * if pointer capture is lost; drags after the lock are ignored.
   */
  pointerDrag(dxPx: number, dyPx: number, nowMs: number): void {
    this.tick(nowMs);
    if (this.phase !== "inspecting") {
      return;
    }
    this.camera.drag(dxPx, dyPx);
  }

  votePanelVisible(): boolean {
    return this.phase === "voting";
  }

  submitVote(choice: PwcChoice, nowMs: number): VotePayload | null {
    if (this.phase !== "voting") {
      return null;
    }
    this.payload = buildVotePayload(
      "PWC", this.descriptor.trial_index, choice, nowMs - this.startedAt, nowMs);
    this.phase = "submitted";
    return this.payload;
  }
}
