// Scripted participant: walks a SessionFlow through its trial loop the way
// a human would click through the page.
import type { SessionFlow } from "../src/flow";
import type { Answer, TrialPayload } from "../src/types";

export interface DriveOptions {
  answerFor: (trial: TrialPayload) => Answer;
  confidentFor?: (trial: TrialPayload, answer: Answer) => boolean;
  /** Seconds to dwell on the trial before submitting. Default 1. */
  dwellFor?: (trial: TrialPayload) => number;
  /** Advance the fake clock by the given seconds. */
  advance: (seconds: number) => void;
  /** Called with each phase as the loop observes it. */
  onPhase?: (phase: string) => void;
  /** Called with each presented trial payload. */
  onTrial?: (trial: TrialPayload) => void;
}

/**
 * Answer trials, acknowledge feedback, and continue through breaks until
 * the flow leaves the trial loop (questionnaire, gate-failed, complete).
 */
export async function driveTrials(
  flow: SessionFlow,
  opts: DriveOptions,
): Promise<void> {
  for (;;) {
    const phase = flow.state.phase;
    opts.onPhase?.(phase);
    if (phase === "trial") {
      const trial = flow.state.trial!.payload;
      opts.onTrial?.(trial);
      const answer = opts.answerFor(trial);
      flow.choose(answer);
      opts.advance(opts.dwellFor ? opts.dwellFor(trial) : 1);
      await flow.submitConfidence(
        opts.confidentFor ? opts.confidentFor(trial, answer) : true,
      );
    } else if (phase === "feedback") {
      await flow.acknowledgeFeedback();
    } else if (phase === "break") {
      await flow.continueFromBreak();
    } else {
      return;
    }
  }
}

/** Walk any JSON payload and collect keys that must never reach the UI. */
export function leakedKeys(payload: unknown): string[] {
  const forbidden = new Set([
    "ksm",
    "achieved_ksm",
    "kruskal_stress",
    "delta",
    "delta_centi",
    "target_centi",
    "correct_answer",
    "graph_id",
    "set_id",
  ]);
  const found: string[] = [];
  const walk = (node: unknown): void => {
    if (Array.isArray(node)) {
      node.forEach(walk);
      return;
    }
    if (node === null || typeof node !== "object") return;
    for (const [key, value] of Object.entries(node)) {
      // The training feedback block is the one sanctioned reveal.
      if (key === "feedback") continue;
      if (forbidden.has(key)) found.push(key);
      walk(value);
    }
  };
  walk(payload);
  return found;
}

export const VALID_QUESTIONNAIRE = {
  strategy: "I compared how evenly the dots were spread out.",
  overall_confidence: "Somewhat confident",
  difficulty: "Difficult",
  familiarity: "Somewhat familiar",
  age_range: "26-35",
  gender: "prefer not to say",
};
