import { describe, expect, it } from "vitest";
import { ApiClient, ApiError, type FetchLike } from "../src/api";
import type { ResponseBody } from "../src/types";
import { FakeService } from "./fake_service";

function client(fake: FakeService, retries = 2): ApiClient {
  return new ApiClient("http://fake.test", fake.fetch, retries);
}

async function startedSession(fake: FakeService): Promise<string> {
  const snapshot = await client(fake).createSession({
    mode: "trained-feedback",
    participantId: "p1",
    size: 10,
  });
  return snapshot.session_id;
}

function response(index: number): ResponseBody {
  return {
    v: 1,
    trial_index: index,
    answer: "left",
    confident: true,
    response_time: 1.5,
  };
}

describe("ApiClient", () => {
  it("creates sessions and surfaces the first trial", async () => {
    const fake = new FakeService();
    const snapshot = await client(fake).createSession({
      mode: "trained-feedback",
      participantId: "p1",
      size: 10,
      seed: 7,
    });
    expect(snapshot.status).toBe("in-training");
    expect(snapshot.trial?.trial_index).toBe(0);
    expect(snapshot.trial?.total).toBe(54);
  });

  it("omits size from expert session requests", async () => {
    const bodies: any[] = [];
    const fake = new FakeService();
    const spy: FetchLike = (url, init) => {
      if (init?.body) bodies.push(JSON.parse(String(init.body)));
      return fake.fetch(url, init);
    };
    const api = new ApiClient("http://fake.test", spy);
    await api.createSession({ mode: "expert", participantId: "x1" });
    expect(bodies).toHaveLength(1);
    expect("size" in bodies[0]).toBe(false);
    await api.createSession({ mode: "untrained", participantId: "x2", size: 25 });
    expect(bodies[1].size).toBe(25);
  });

  it("maps error replies to ApiError with the server detail", async () => {
    const fake = new FakeService();
    const err = await client(fake)
      .current("nope")
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(404);
    expect(err.detail).toBe("unknown session");
  });

  it("retries a request lost before the server saw it", async () => {
    const fake = new FakeService();
    const id = await startedSession(fake);
    fake.dropResponses("before");
    const reply = await client(fake).submitResponse(id, response(0));
    expect(reply.accepted).toBe(0);
    expect(fake.sessions.get(id)!.responses).toHaveLength(1);
  });

  it("recovers via the snapshot when only the reply was lost", async () => {
    const fake = new FakeService();
    const id = await startedSession(fake);
    fake.dropResponses("after");
    const reply = await client(fake).submitResponse(id, response(0));
    expect(reply.accepted).toBe(0);
    expect(reply.next?.kind).toBe("trial");
    expect((reply.next as any).trial_index).toBe(1);
    // The duplicate delivery did not double-record the response.
    expect(fake.sessions.get(id)!.responses).toHaveLength(1);
  });

  it("does not mask a genuine out-of-order submission as recovery", async () => {
    const fake = new FakeService();
    const id = await startedSession(fake);
    const err = await client(fake)
      .submitResponse(id, response(5))
      .catch((e) => e);
    expect(err).toBeInstanceOf(ApiError);
    expect(err.status).toBe(409);
    expect(fake.sessions.get(id)!.responses).toHaveLength(0);
  });

  it("gives up after exhausting retries", async () => {
    const fake = new FakeService();
    const id = await startedSession(fake);
    fake.dropResponses("before", "before", "before");
    const err = await client(fake, 2)
      .submitResponse(id, response(0))
      .catch((e) => e);
    expect(err).toBeInstanceOf(TypeError);
    expect(fake.sessions.get(id)!.responses).toHaveLength(0);
  });

  it("fetches stimulus SVG text by payload path", async () => {
    const fake = new FakeService();
    const svg = await client(fake).fetchDrawing("/drawings/fake-0-left.svg");
    expect(svg).toContain("<svg");
    expect(fake.svgFetches).toEqual(["fake-0-left"]);
  });
});
