import { afterEach, describe, expect, it, vi } from "vitest";

import { ApiClient, ApiError } from "../src/api.js";
import { makeTask } from "./fixtures.js";

function mockFetch(status: number, body: unknown): ReturnType<typeof vi.fn> {
  const mock = vi.fn(async () => new Response(JSON.stringify(body), {
    status,
    headers: { "Content-Type": "application/json" },
  }));
  vi.stubGlobal("fetch", mock);
  return mock;
}

afterEach(() => {
  vi.unstubAllGlobals();
});

describe("api client", () => {
  it("fetches the lexicon", async () => {
    const mock = mockFetch(200, [{ phrase: "if" }]);
    const api = new ApiClient("", "alice");
    const lexicon = await api.getLexicon();
    expect(mock).toHaveBeenCalledWith("/lexicon", { headers: {} });
    expect(lexicon[0].phrase).toBe("if");
  });

  it("requests the next task with the annotator token", async () => {
    const mock = mockFetch(200, { task: makeTask() });
    const api = new ApiClient("", "alice");
    const task = await api.nextTask("alice");
    expect(task?.sentence_id).toBe("doc-1#4");
    const [url, options] = mock.mock.calls[0];
    expect(url).toBe("/tasks/next?annotator=alice");
    expect(options.headers["X-Annotator-Token"]).toBe("alice");
  });

  it("passes a drained queue through as null", async () => {
    mockFetch(200, { task: null });
    const api = new ApiClient("", "alice");
    expect(await api.nextTask("alice")).toBeNull();
  });

  it("submits annotations with token and JSON body", async () => {
    const mock = mockFetch(200, {
      status: "ok", version: 1,
      progress: { submitted: 1, open: 9, total: 10 },
    });
    const api = new ApiClient("", "alice");
    const ack = await api.submitAnnotation({
      sentence_id: "s1", annotator_id: "alice",
      labels: { Causality: 0 }, cue_phrases: [],
    });
    expect(ack.version).toBe(1);
    const [url, options] = mock.mock.calls[0];
    expect(url).toBe("/annotations");
    expect(options.method).toBe("POST");
    expect(JSON.parse(options.body).labels).toEqual({ Causality: 0 });
    expect(options.headers["X-Annotator-Token"]).toBe("alice");
  });

  it("surfaces the violated rule verbatim on rejection", async () => {
    mockFetch(422, {
      detail: {
        rule: "dependent-category-requires-causal",
        message: "labels for ['Temporality'] require Causality=1",
      },
    });
    const api = new ApiClient("", "alice");
    const attempt = api.submitAnnotation({
      sentence_id: "s1", annotator_id: "alice",
      labels: { Causality: 0, Temporality: "before" }, cue_phrases: [],
    });
    await expect(attempt).rejects.toThrowError(ApiError);
    try {
      await attempt;
    } catch (error) {
      expect((error as ApiError).rule).toBe(
        "dependent-category-requires-causal");
      expect((error as ApiError).status).toBe(422);
    }
  });

  it("classifies a batch", async () => {
    const mock = mockFetch(200, [{
      label: "causal", p_causal: 0.91,
      cues: [{ phrase: "if", start: 0, end: 2 }],
    }]);
    const api = new ApiClient("");
    const [result] = await api.classify(["If a then b"]);
    expect(result.label).toBe("causal");
    const [, options] = mock.mock.calls[0];
    expect(JSON.parse(options.body)).toEqual({ texts: ["If a then b"] });
  });
});
