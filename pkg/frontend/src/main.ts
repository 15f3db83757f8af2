import { ApiClient, type FetchLike } from "./api";
import { render } from "./dom";
import { SessionFlow } from "./flow";
import type { Mode, SessionRequest } from "./types";

export interface BootstrapOptions {
  /** URL fragment carrying the session parameters, with or without "#". */
  hash: string;
  fetchFn?: FetchLike;
  /** Called with the new session id so the caller can pin it in the URL. */
  onSessionId?: (sessionId: string) => void;
}

export interface BootstrapResult {
  flow: SessionFlow;
  ready: Promise<void>;
}

/**
 * Wire the app into `root` from fragment parameters.
 *
 * `#mode=trained-feedback&size=10&participant=p1` starts a session;
 * `#session=<id>` resumes one. `base=` points at the service origin when
 * the page is not served from it, and `seed=` fixes the schedule.
 */
export function bootstrap(
  root: HTMLElement,
  opts: BootstrapOptions,
): BootstrapResult {
  const params = new URLSearchParams(opts.hash.replace(/^#/, ""));
  const api = new ApiClient(params.get("base") ?? "", opts.fetchFn);
  const flow = new SessionFlow(api, { onChange: () => render(root, flow) });

  const fail = (err: unknown): void => {
    flow.state.error = err instanceof Error ? err.message : String(err);
    render(root, flow);
  };

  let ready: Promise<void>;
  const sessionId = params.get("session");
  if (sessionId) {
    ready = flow.attach(sessionId).catch(fail);
  } else {
    const participant = params.get("participant");
    if (!participant) {
      flow.state.error =
        "the study link is incomplete: it names no participant and no session";
      render(root, flow);
      return { flow, ready: Promise.resolve() };
    }
    const req: SessionRequest = {
      mode: (params.get("mode") ?? "trained-feedback") as Mode,
      participantId: participant,
    };
    const size = params.get("size");
    if (size !== null) req.size = Number(size);
    const seed = params.get("seed");
    if (seed !== null) req.seed = Number(seed);
    ready = flow
      .begin(req)
      .then(() => {
        if (flow.state.sessionId) opts.onSessionId?.(flow.state.sessionId);
      })
      .catch(fail);
  }
  render(root, flow);
  return { flow, ready };
}

declare global {
  interface Window {
    __trialUi?: BootstrapResult;
  }
}

/** Browser entry point: mount on #app when the page provides one. */
export function start(): void {
  const root = document.getElementById("app");
  if (!root) return;
  window.__trialUi = bootstrap(root, {
    hash: window.location.hash,
    onSessionId: (sessionId) => {
      const params = new URLSearchParams(window.location.hash.replace(/^#/, ""));
      params.set("session", sessionId);
      window.location.hash = params.toString();
    },
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  start();
}
