import { ApiClient } from "./api";
import { TrialTimer, type Clock } from "./timing";
import type {
  Answer,
  CompletionPayload,
  FeedbackBlock,
  GatePayload,
  QuestionnaireAnswers,
  QuestionnairePayload,
  ResponseBody,
  SessionRequest,
  SessionSnapshot,
  SessionStatus,
  SubmitReply,
  TrialPayload,
} from "./types";

export type FlowPhase =
  | "idle"
  | "instructions"
  | "trial"
  | "confidence"
  | "feedback"
  | "break"
  | "gate-failed"
  | "questionnaire"
  | "complete";

export interface TrialView {
  payload: TrialPayload;
  leftSvg: string;
  rightSvg: string;
  chosen: Answer | null;
}

export interface FlowState {
  phase: FlowPhase;
  sessionId: string | null;
  status: SessionStatus | null;
  trial: TrialView | null;
  feedback: FeedbackBlock | null;
  gate: GatePayload | null;
  questionnaire: QuestionnairePayload | null;
  summary: CompletionPayload | null;
  /** Phase to return to when instructions were reopened mid-training. */
  instructionsReturn: FlowPhase | null;
  error: string | null;
}

export class FlowError extends Error {}

interface PendingAdvance {
  status: SessionStatus;
  next?: TrialPayload | QuestionnairePayload;
  gate?: GatePayload;
}

/**
 * Client-side session state machine.
 *
 * Drives one participant through instructions, trials (choice then
 * confidence), optional training feedback, expert break screens, the
 * questionnaire, and the terminal states. All transitions are pulled from
 * service replies; the machine itself holds no scheduling knowledge and
 * never sees stress values or correct answers outside training feedback.
 */
export class SessionFlow {
  readonly state: FlowState = {
    phase: "idle",
    sessionId: null,
    status: null,
    trial: null,
    feedback: null,
    gate: null,
    questionnaire: null,
    summary: null,
    instructionsReturn: null,
    error: null,
  };

  /** Every JSON payload the service sent us, in order. Audited in tests. */
  readonly received: unknown[] = [];
  /** Every response body we posted, in order. */
  readonly submitted: ResponseBody[] = [];

  private readonly timer: TrialTimer;
  private readonly onChange: (state: FlowState) => void;
  private pendingFirstTrial: TrialPayload | null = null;
  private pendingAdvance: PendingAdvance | null = null;
  private pendingAfterBreak: TrialPayload | null = null;
  private busy = false;

  constructor(
    private readonly api: ApiClient,
    opts: { now?: Clock; onChange?: (state: FlowState) => void } = {},
  ) {
    this.timer = new TrialTimer(opts.now);
    this.onChange = opts.onChange ?? (() => {});
  }

  private notify(): void {
    this.onChange(this.state);
  }

  private record<T>(payload: T): T {
    this.received.push(payload);
    return payload;
  }

  private async exclusive<T>(work: () => Promise<T>): Promise<T> {
    if (this.busy) throw new FlowError("an action is already in flight");
    this.busy = true;
    try {
      return await work();
    } finally {
      this.busy = false;
    }
  }

  /** Create a fresh session and show the instructions. */
  begin(req: SessionRequest): Promise<void> {
    return this.exclusive(async () => {
      const snapshot = this.record(await this.api.createSession(req));
      this.state.sessionId = snapshot.session_id;
      this.state.status = snapshot.status;
      this.pendingFirstTrial = snapshot.trial ?? null;
      this.state.phase = "instructions";
      this.notify();
    });
  }

  /** Resume an existing session from its server-side snapshot. */
  attach(sessionId: string): Promise<void> {
    return this.exclusive(async () => {
      const snapshot = this.record(await this.api.current(sessionId));
      this.state.sessionId = snapshot.session_id;
      await this.enterSnapshot(snapshot);
    });
  }

  private async enterSnapshot(snapshot: SessionSnapshot): Promise<void> {
    this.state.status = snapshot.status;
    switch (snapshot.status) {
      case "in-training":
      case "in-main":
        await this.presentTrial(snapshot.trial!);
        break;
      case "questionnaire":
        this.state.questionnaire = snapshot.questionnaire!;
        this.state.phase = "questionnaire";
        break;
      case "failed-gate":
        this.state.gate = snapshot.gate ?? null;
        this.state.phase = "gate-failed";
        break;
      case "complete":
        this.state.summary = snapshot.summary ?? null;
        this.state.phase = "complete";
        break;
    }
    this.notify();
  }

  /** First acknowledgment: leave the instructions and start the session. */
  acknowledgeInstructions(): Promise<void> {
    return this.exclusive(async () => {
      if (this.state.phase !== "instructions") {
        throw new FlowError("not showing instructions");
      }
      if (this.state.instructionsReturn !== null) {
        throw new FlowError("instructions were reopened; close them instead");
      }
      const first = this.pendingFirstTrial;
      if (first === null) throw new FlowError("no pending trial");
      this.pendingFirstTrial = null;
      await this.presentTrial(first);
      this.notify();
    });
  }

  /** Reopen the instructions. Allowed during training trials only. */
  reopenInstructions(): void {
    const { phase, trial } = this.state;
    const inTrial = phase === "trial" || phase === "confidence";
    if (!inTrial || trial === null || trial.payload.trial_kind !== "training") {
      throw new FlowError("instructions can be reviewed during training only");
    }
    this.state.instructionsReturn = phase;
    this.state.phase = "instructions";
    this.notify();
  }

  /** Return from reopened instructions to the interrupted trial. */
  closeInstructions(): void {
    if (
      this.state.phase !== "instructions" ||
      this.state.instructionsReturn === null
    ) {
      throw new FlowError("instructions were not reopened");
    }
    this.state.phase = this.state.instructionsReturn;
    this.state.instructionsReturn = null;
    this.notify();
  }

  /** Record the forced choice and move to the confidence prompt. */
  choose(answer: Answer): void {
    if (this.state.phase !== "trial" || this.state.trial === null) {
      throw new FlowError("no trial awaiting a choice");
    }
    this.state.trial.chosen = answer;
    this.state.phase = "confidence";
    this.notify();
  }

  /** Answer the confidence prompt and submit the full response. */
  submitConfidence(confident: boolean): Promise<void> {
    return this.exclusive(async () => {
      if (this.state.phase !== "confidence" || this.state.trial === null) {
        throw new FlowError("no choice awaiting confidence");
      }
      const trial = this.state.trial;
      const body: ResponseBody = {
        v: 1,
        trial_index: trial.payload.trial_index,
        answer: trial.chosen!,
        confident,
        response_time: this.timer.elapsedSeconds(),
      };
      const reply = this.record(
        await this.api.submitResponse(this.state.sessionId!, body),
      );
      this.submitted.push(body);
      this.state.status = reply.status;
      if (reply.gate) this.state.gate = reply.gate;
      if (reply.feedback) {
        this.state.feedback = reply.feedback;
        this.pendingAdvance = pendingFromReply(reply);
        this.state.phase = "feedback";
        this.notify();
        return;
      }
      await this.advance(pendingFromReply(reply));
    });
  }

  /** Dismiss the training feedback banner and continue. */
  acknowledgeFeedback(): Promise<void> {
    return this.exclusive(async () => {
      if (this.state.phase !== "feedback" || this.pendingAdvance === null) {
        throw new FlowError("no feedback to acknowledge");
      }
      const pending = this.pendingAdvance;
      this.pendingAdvance = null;
      this.state.feedback = null;
      await this.advance(pending);
    });
  }

  /** Leave an expert break screen and present the next size block. */
  continueFromBreak(): Promise<void> {
    return this.exclusive(async () => {
      if (this.state.phase !== "break" || this.pendingAfterBreak === null) {
        throw new FlowError("not at a break");
      }
      const next = this.pendingAfterBreak;
      this.pendingAfterBreak = null;
      await this.presentTrial(next);
      this.notify();
    });
  }

  private async advance(pending: PendingAdvance): Promise<void> {
    if (pending.status === "failed-gate") {
      this.state.phase = "gate-failed";
      this.state.trial = null;
      this.notify();
      return;
    }
    const next = pending.next;
    if (next === undefined) {
      // Reply carried no continuation (recovered submission); re-sync.
      const snapshot = this.record(
        await this.api.current(this.state.sessionId!),
      );
      await this.enterSnapshot(snapshot);
      return;
    }
    if (next.kind === "questionnaire") {
      this.state.questionnaire = next;
      this.state.trial = null;
      this.state.phase = "questionnaire";
      this.notify();
      return;
    }
    const previous = this.state.trial;
    if (previous !== null && next.size !== previous.payload.size) {
      // Size blocks change only in expert sessions; rest between them.
      this.pendingAfterBreak = next;
      this.state.trial = null;
      this.state.phase = "break";
      this.notify();
      return;
    }
    await this.presentTrial(next);
    this.notify();
  }

  private async presentTrial(payload: TrialPayload): Promise<void> {
    this.timer.reset();
    const [leftSvg, rightSvg] = await Promise.all([
      this.api.fetchDrawing(payload.left_svg),
      this.api.fetchDrawing(payload.right_svg),
    ]);
    this.state.trial = { payload, leftSvg, rightSvg, chosen: null };
    this.state.feedback = null;
    this.state.phase = "trial";
    // Both stimuli are in hand and inserted synchronously by the view;
    // the response clock starts now, after the network round trips.
    this.timer.start();
  }

  /**
   * Validate and submit the questionnaire. A second call after success is
   * a no-op returning the stored completion summary.
   */
  submitQuestionnaire(answers: QuestionnaireAnswers): Promise<CompletionPayload> {
    return this.exclusive(async () => {
      if (this.state.phase === "complete" && this.state.summary !== null) {
        return this.state.summary;
      }
      if (this.state.phase !== "questionnaire" || this.state.questionnaire === null) {
        throw new FlowError("questionnaire is not open");
      }
      for (const field of this.state.questionnaire.fields) {
        const value = answers[field.name];
        if (typeof value !== "string" || value.trim() === "") {
          throw new FlowError(`answer required: ${field.name}`);
        }
        if (field.options && !field.options.includes(value)) {
          throw new FlowError(`not an offered choice for ${field.name}: ${value}`);
        }
      }
      const summary = this.record(
        await this.api.submitQuestionnaire(this.state.sessionId!, answers),
      );
      this.state.summary = summary;
      this.state.status = "complete";
      this.state.phase = "complete";
      this.notify();
      return summary;
    });
  }
}

function pendingFromReply(reply: SubmitReply): PendingAdvance {
  return { status: reply.status, next: reply.next, gate: reply.gate };
}
