import type {
  CompletionPayload,
  QuestionnaireAnswers,
  ResponseBody,
  SessionRequest,
  SessionSnapshot,
  SubmitReply,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
    this.name = "ApiError";
  }
}

async function readDetail(response: Response): Promise<string> {
  try {
    const body = (await response.json()) as { detail?: unknown };
    if (typeof body.detail === "string") return body.detail;
    return JSON.stringify(body);
  } catch {
    return response.statusText || "request failed";
  }
}

/**
 * Thin typed client for the session service.
 *
 * All state lives server side; the client's only cleverness is the
 * idempotent response submission: a POST whose reply was lost on the wire
 * may be retried, and a resulting "expected trial N" conflict is resolved
 * by reloading the session snapshot instead of failing the flow.
 */
export class ApiClient {
  private readonly base: string;
  private readonly fetchFn: FetchLike;
  private readonly retries: number;

  constructor(baseUrl: string, fetchFn?: FetchLike, retries = 2) {
    this.base = baseUrl.replace(/\/+$/, "");
    this.fetchFn = fetchFn ?? ((url, init) => fetch(url, init));
    this.retries = retries;
  }

  private async request(path: string, init?: RequestInit): Promise<Response> {
    return this.fetchFn(this.base + path, init);
  }

  private async requestJson<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.request(path, init);
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return (await response.json()) as T;
  }

  private postJson<T>(path: string, body: unknown): Promise<T> {
    return this.requestJson<T>(path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  createSession(req: SessionRequest): Promise<SessionSnapshot> {
    const body: Record<string, unknown> = {
      v: 1,
      mode: req.mode,
      participant_id: req.participantId,
    };
    if (req.mode !== "expert") body.size = req.size;
    if (req.seed !== undefined) body.seed = req.seed;
    return this.postJson<SessionSnapshot>("/sessions", body);
  }

  current(sessionId: string): Promise<SessionSnapshot> {
    return this.requestJson<SessionSnapshot>(
      `/sessions/${encodeURIComponent(sessionId)}/current`,
    );
  }

  /**
   * Submit one trial response. Retries on network failure with the same
   * body; the server accepts each trial index exactly once, so a duplicate
   * delivery surfaces as a 409 which we resolve via the current snapshot.
   * The snapshot carries no feedback block, so feedback for a trial whose
   * acknowledgment was lost is silently skipped rather than invented.
   */
  async submitResponse(
    sessionId: string,
    body: ResponseBody,
  ): Promise<SubmitReply> {
    const path = `/sessions/${encodeURIComponent(sessionId)}/responses`;
    let sawNetworkFailure = false;
    let lastError: unknown = null;
    for (let attempt = 0; attempt <= this.retries; attempt++) {
      try {
        return await this.postJson<SubmitReply>(path, body);
      } catch (err) {
        if (err instanceof ApiError) {
          // 409/410 after a lost reply means the submission landed and the
          // session moved on (next trial, questionnaire, or a closed gate).
          if ((err.status === 409 || err.status === 410) && sawNetworkFailure) {
            return this.recoverSubmission(sessionId, body);
          }
          throw err;
        }
        sawNetworkFailure = true;
        lastError = err;
      }
    }
    throw lastError instanceof Error
      ? lastError
      : new Error("response submission failed");
  }

  private async recoverSubmission(
    sessionId: string,
    body: ResponseBody,
  ): Promise<SubmitReply> {
    const snapshot = await this.current(sessionId);
    const pending = snapshot.trial?.trial_index;
    if (pending !== undefined && pending <= body.trial_index) {
      // The server still expects this trial or an earlier one: the
      // conflict was not caused by our own duplicate delivery.
      throw new ApiError(409, `expected trial ${pending}, got ${body.trial_index}`);
    }
    const reply: SubmitReply = {
      v: 1,
      accepted: body.trial_index,
      status: snapshot.status,
    };
    if (snapshot.trial) reply.next = snapshot.trial;
    else if (snapshot.questionnaire) reply.next = snapshot.questionnaire;
    if (snapshot.gate) reply.gate = snapshot.gate;
    return reply;
  }

  submitQuestionnaire(
    sessionId: string,
    answers: QuestionnaireAnswers,
  ): Promise<CompletionPayload> {
    return this.postJson<CompletionPayload>(
      `/sessions/${encodeURIComponent(sessionId)}/questionnaire`,
      { v: 1, ...answers },
    );
  }

  /** Fetch one stimulus by the server-relative path found in a trial payload. */
  async fetchDrawing(path: string): Promise<string> {
    const response = await this.request(path);
    if (!response.ok) {
      throw new ApiError(response.status, await readDetail(response));
    }
    return response.text();
  }
}
