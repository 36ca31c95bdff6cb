/**
 * Wire types shared with the session service, plus client-side schema
 * validation so no malformed vote ever leaves the browser.
 */

export type Protocol = "DSIS" | "PWC";

export type PwcChoice = "left" | "right" | "not_sure";

export const DSIS_SCALE_LABELS: ReadonlyArray<[number, string]> = [
  [5, "Imperceptible"],
  [4, "Perceptible, but not annoying"],
  [3, "Slightly annoying"],
  [2, "Annoying"],
  [1, "Very annoying"],
];

export const PWC_CHOICES: ReadonlyArray<PwcChoice> = ["left", "right", "not_sure"];

export interface StimulusRef {
  id: string;
  asset: string;
  point_size: number;
  bit_depth: number;
}

export interface TrialDescriptor {
  done: false;
  session: string;
  trial_index: number;
  protocol: Protocol;
  content: string;
  left: StimulusRef;
  right: StimulusRef;
  reference_side: "left" | "right" | null;
  time_budget_ms: number;
}

export interface SessionDone {
  done: true;
}

export type NextResponse = TrialDescriptor | SessionDone;

export interface VotePayload {
  trial_index: number;
  response: number | PwcChoice;
  elapsed_ms: number;
  timestamp?: number;
}

export interface VoteAck {
  accepted: boolean;
  duplicate: boolean;
  flagged_short_exposure: boolean;
}

/** Problems that would make the session service reject the payload. */
export function validateVotePayload(protocol: Protocol, payload: VotePayload): string[] {
  const errors: string[] = [];
  if (!Number.isInteger(payload.trial_index) || payload.trial_index < 0) {
    errors.push(`trial_index must be a non-negative integer, got ${payload.trial_index}`);
  }
  if (!(payload.elapsed_ms >= 0)) {
    errors.push(`elapsed_ms must be non-negative, got ${payload.elapsed_ms}`);
  }
  if (protocol === "DSIS") {
    const r = payload.response;
    if (typeof r !== "number" || !Number.isInteger(r) || r < 1 || r > 5) {
      errors.push(`DSIS response must be an integer 1..5, got ${String(r)}`);
    }
  } else {
    if (typeof payload.response !== "string"
        || !PWC_CHOICES.includes(payload.response as PwcChoice)) {
      errors.push(`PWC response must be one of ${PWC_CHOICES.join("/")}, `
        + `got ${String(payload.response)}`);
    }
  }
  return errors;
}

export function buildVotePayload(
  protocol: Protocol,
  trialIndex: number,
  response: number | PwcChoice,
  elapsedMs: number,
  timestamp?: number,
): VotePayload {
  const payload: VotePayload = {
    trial_index: trialIndex,
    response,
    elapsed_ms: elapsedMs,
  };
  if (timestamp !== undefined) {
    payload.timestamp = timestamp;
  }
  const errors = validateVotePayload(protocol, payload);
  if (errors.length > 0) {
    throw new Error(`invalid vote payload: ${errors.join("; ")}`);
  }
  return payload;
}
