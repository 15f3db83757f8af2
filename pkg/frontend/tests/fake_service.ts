// In-memory stand-in for the session service, speaking the same JSON
// contract over a FetchLike. Unit tests drive the client against this;
// the e2e suite drives the real thing.
import type { FetchLike } from "../src/api";
import type {
  Answer,
  Mode,
  QuestionnaireField,
  SessionStatus,
} from "../src/types";

export const FAKE_QUESTIONNAIRE_FIELDS: QuestionnaireField[] = [
  { name: "strategy", prompt: "What was your overall strategy?", type: "text" },
  {
    name: "overall_confidence",
    prompt: "Overall, how confident are you in your responses?",
    type: "choice",
    options: [
      "Very confident",
      "Somewhat confident",
      "Not very confident",
      "Not confident at all",
    ],
  },
  {
    name: "difficulty",
    prompt: "How difficult did you find the experiment?",
    type: "choice",
    options: ["Very difficult", "Difficult", "Easy", "Very Easy"],
  },
  {
    name: "familiarity",
    prompt: "How familiar are you with network diagrams?",
    type: "choice",
    options: [
      "Very familiar",
      "Somewhat familiar",
      "Not very familiar",
      "They are new to me",
    ],
  },
  {
    name: "age_range",
    prompt: "What is your age range?",
    type: "choice",
    options: ["18-25", "26-35", "36-45", "46-55", "56-65", "66-75", "76+"],
  },
  { name: "gender", prompt: "What is your gender?", type: "text" },
];

const ANSWER_CYCLE: Answer[] = ["left", "right", "same"];

export interface FakePlan {
  trial_index: number;
  kind: "training" | "main";
  size: number;
  feedback: boolean;
  correct_answer: Answer;
  left_svg: string;
  right_svg: string;
}

interface FakeSession {
  id: string;
  mode: Mode;
  plans: FakePlan[];
  responses: Array<{
    trial_index: number;
    answer: Answer;
    confident: boolean;
    response_time: number;
  }>;
  questionnaire: Record<string, string> | null;
}

function makePlans(mode: Mode, size: number): FakePlan[] {
  const plans: FakePlan[] = [];
  const push = (kind: "training" | "main", trialSize: number): void => {
    const index = plans.length;
    plans.push({
      trial_index: index,
      kind,
      size: trialSize,
      feedback: mode === "trained-feedback" && kind === "training",
      correct_answer: ANSWER_CYCLE[index % ANSWER_CYCLE.length],
      left_svg: `/drawings/fake-${index}-left.svg`,
      right_svg: `/drawings/fake-${index}-right.svg`,
    });
  };
  if (mode === "expert") {
    for (const blockSize of [10, 25, 50]) {
      for (let i = 0; i < 45; i++) push("main", blockSize);
    }
  } else {
    for (let i = 0; i < 9; i++) push("training", size);
    for (let i = 0; i < 45; i++) push("main", size);
  }
  return plans;
}

function json(status: number, body: unknown): Response {
  return new Response(JSON.stringify(body), {
    status,
    headers: { "content-type": "application/json" },
  });
}

function detail(status: number, message: string): Response {
  return json(status, { detail: message });
}

export class FakeService {
  readonly sessions = new Map<string, FakeSession>();
  /** SVG fetch counter per ref, to assert stimuli were actually loaded. */
  readonly svgFetches: string[] = [];
  questionnairePosts = 0;
  /** Advanced by the given amount whenever any request is served. */
  onRequest: (() => void) | null = null;
  private dropPlan: Array<"before" | "after"> = [];
  private nextId = 1;

  /** Make the next response POSTs fail: "before" drops the request before
      the server sees it, "after" processes it but loses the reply. */
  dropResponses(...kinds: Array<"before" | "after">): void {
    this.dropPlan.push(...kinds);
  }

  readonly fetch: FetchLike = async (url, init) => {
    this.onRequest?.();
    const u = new URL(url, "http://fake.test");
    const path = u.pathname;
    const method = (init?.method ?? "GET").toUpperCase();
    const body: any = init?.body ? JSON.parse(String(init.body)) : null;

    if (method === "POST" && path === "/sessions") {
      return this.createSession(body);
    }
    let m = path.match(/^\/sessions\/([^/]+)\/current$/);
    if (method === "GET" && m) return this.current(m[1]);
    m = path.match(/^\/sessions\/([^/]+)\/responses$/);
    if (method === "POST" && m) return this.respond(m[1], body);
    m = path.match(/^\/sessions\/([^/]+)\/questionnaire$/);
    if (method === "POST" && m) return this.finish(m[1], body);
    m = path.match(/^\/drawings\/([^/]+)\.svg$/);
    if (method === "GET" && m) {
      this.svgFetches.push(m[1]);
      return new Response(`<svg data-ref="${m[1]}"></svg>`, {
        status: 200,
        headers: { "content-type": "image/svg+xml" },
      });
    }
    return detail(404, `no such route: ${method} ${path}`);
  };

  private createSession(body: any): Response {
    if (body?.v !== 1) return detail(400, "missing or unsupported v");
    const mode: Mode = body.mode;
    if (!["trained-feedback", "untrained", "expert"].includes(mode)) {
      return detail(400, "bad mode");
    }
    if (mode !== "expert" && ![10, 25, 50].includes(body.size)) {
      return detail(400, "bad size");
    }
    if (typeof body.participant_id !== "string" || !body.participant_id) {
      return detail(400, "participant_id required");
    }
    for (const session of this.sessions.values()) {
      if ((session as any).participant === body.participant_id) {
        return detail(409, "participant already has a session");
      }
    }
    const session: FakeSession = {
      id: `fake-${this.nextId++}`,
      mode,
      plans: makePlans(mode, body.size),
      responses: [],
      questionnaire: null,
    };
    (session as any).participant = body.participant_id;
    this.sessions.set(session.id, session);
    return json(201, this.snapshot(session));
  }

  private status(session: FakeSession): SessionStatus {
    const nTrain = session.plans.filter((p) => p.kind === "training").length;
    if (session.questionnaire) return "complete";
    const cursor = session.responses.length;
    if (
      session.mode === "trained-feedback" &&
      cursor >= nTrain &&
      this.gateCorrect(session) < 5
    ) {
      return "failed-gate";
    }
    if (cursor >= session.plans.length) return "questionnaire";
    return cursor >= nTrain ? "in-main" : "in-training";
  }

  private gateCorrect(session: FakeSession): number {
    const nTrain = session.plans.filter((p) => p.kind === "training").length;
    return session.responses
      .slice(0, nTrain)
      .filter((r, i) => r.answer === session.plans[i].correct_answer).length;
  }

  private trialPayload(session: FakeSession): any {
    const plan = session.plans[session.responses.length];
    return {
      v: 1,
      kind: "trial",
      trial_index: plan.trial_index,
      trial_kind: plan.kind,
      number: session.responses.length + 1,
      total: session.plans.length,
      size: plan.size,
      left_svg: plan.left_svg,
      right_svg: plan.right_svg,
      options: ["left", "same", "right"],
    };
  }

  private gatePayload(session: FakeSession): any {
    const correct = this.gateCorrect(session);
    return { v: 1, kind: "gate", passed: correct >= 5, correct, total: 9 };
  }

  private snapshot(session: FakeSession): any {
    const status = this.status(session);
    const body: any = { v: 1, session_id: session.id, status };
    if (status === "in-training" || status === "in-main") {
      body.trial = this.trialPayload(session);
    } else if (status === "questionnaire") {
      body.questionnaire = {
        v: 1,
        kind: "questionnaire",
        fields: FAKE_QUESTIONNAIRE_FIELDS,
      };
    } else if (status === "failed-gate") {
      body.gate = this.gatePayload(session);
    } else {
      body.summary = {
        v: 1,
        kind: "complete",
        session_id: session.id,
        trials_answered: session.responses.length,
      };
    }
    return body;
  }

  private current(id: string): Response {
    const session = this.sessions.get(id);
    if (!session) return detail(404, "unknown session");
    return json(200, this.snapshot(session));
  }

  private respond(id: string, body: any): Response {
    const session = this.sessions.get(id);
    if (!session) return detail(404, "unknown session");
    const drop = this.dropPlan.shift();
    if (drop === "before") throw new TypeError("network failure (request lost)");
    const status = this.status(session);
    if (status === "failed-gate" || status === "complete") {
      return detail(410, `session is ${status}`);
    }
    if (status === "questionnaire") {
      return detail(409, "trials finished; questionnaire expected");
    }
    if (body?.v !== 1) return detail(400, "missing or unsupported v");
    const plan = session.plans[session.responses.length];
    if (body.trial_index !== plan.trial_index) {
      return detail(409, `expected trial ${plan.trial_index}, got ${body.trial_index}`);
    }
    session.responses.push({
      trial_index: body.trial_index,
      answer: body.answer,
      confident: body.confident,
      response_time: body.response_time,
    });
    const reply: any = { v: 1, accepted: body.trial_index, status: this.status(session) };
    if (plan.kind === "training" && plan.feedback) {
      reply.feedback = {
        correct: body.answer === plan.correct_answer,
        correct_answer: plan.correct_answer,
      };
    }
    const nTrain = session.plans.filter((p) => p.kind === "training").length;
    if (
      plan.kind === "training" &&
      session.responses.length === nTrain &&
      session.mode === "trained-feedback"
    ) {
      reply.gate = this.gatePayload(session);
    }
    const after = this.status(session);
    if (after === "in-training" || after === "in-main") {
      reply.next = this.trialPayload(session);
    } else if (after === "questionnaire") {
      reply.next = { v: 1, kind: "questionnaire", fields: FAKE_QUESTIONNAIRE_FIELDS };
    }
    if (drop === "after") throw new TypeError("network failure (reply lost)");
    return json(200, reply);
  }

  private finish(id: string, body: any): Response {
    const session = this.sessions.get(id);
    if (!session) return detail(404, "unknown session");
    const status = this.status(session);
    if (status === "complete") return json(200, this.snapshot(session).summary);
    if (status !== "questionnaire") return detail(409, `session is ${status}`);
    if (body?.v !== 1) return detail(400, "missing or unsupported v");
    const answers: Record<string, string> = {};
    for (const field of FAKE_QUESTIONNAIRE_FIELDS) {
      const value = body[field.name];
      if (typeof value !== "string" || !value.trim()) {
        return detail(400, `missing field ${field.name}`);
      }
      if (field.options && !field.options.includes(value)) {
        return detail(400, `${field.name} must be one of the offered choices`);
      }
      answers[field.name] = value;
    }
    this.questionnairePosts += 1;
    session.questionnaire = answers;
    return json(200, this.snapshot(session).summary);
  }
}
