// Authoring interaction rules: drops are gated on stance selection, all
// accepted mutations refresh the view, and server rejections surface with
// the server's own message. The store must never invent diagnostics.

import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient } from "../src/api";
import { GraphStore } from "../src/store";
import { FetchMock, emptyGraph, graphWith } from "./mock";

afterEach(() => vi.unstubAllGlobals());

const stanceView = (layer = "arms") => ({
  layer,
  gestures: [],
  fidgets: [],
  transitions_out: {},
});

function storeWith(mock: FetchMock): GraphStore {
  mock.install();
  return new GraphStore(new ApiClient());
}

describe("drop gating", () => {
  it("gesture drop with no stance selected is blocked with a hint, no HTTP call", async () => {
    const mock = new FetchMock();
    const store = storeWith(mock);
    const ok = await store.dropClip({ id: "g1", duration: 1 }, "gesture");
    expect(ok).toBe(false);
    expect(store.hint).toMatch(/select a stance/i);
    expect(mock.calls).toHaveLength(0);
  });

  it("transition drop requires a destination stance first", async () => {
    const mock = new FetchMock().on("GET", "/graph", {
      body: { revision: 0, graph: graphWith({ s1: stanceView() }) },
    }).on("GET", "/validate", { body: { revision: 0, diagnostics: [] } });
    const store = storeWith(mock);
    await store.refresh();
    store.selectStance("s1");
    const ok = await store.dropClip({ id: "t1", duration: 1 }, "transition");
    expect(ok).toBe(false);
    expect(store.hint).toMatch(/destination stance/i);
    expect(mock.paths("POST")).toHaveLength(0);
  });

  it("a new stance can always be dropped", async () => {
    const mock = new FetchMock()
      .on("POST", "/clips", { status: 201, body: { revision: 1, clip: {} } })
      .on("GET", "/graph", { body: { revision: 1, graph: graphWith({ s1: stanceView() }) } })
      .on("GET", "/validate", { body: { revision: 1, diagnostics: [] } });
    const store = storeWith(mock);
    const ok = await store.dropClip({ id: "s1", duration: 2 }, "stance");
    expect(ok).toBe(true);
    expect(mock.calls[0].body).toMatchObject({ id: "s1", kind: "stance", looping: true });
  });
});

describe("drop outcomes", () => {
  function readyStore(mock: FetchMock) {
    mock
      .on("GET", "/graph", {
        body: { revision: 0, graph: graphWith({ s1: stanceView(), s2: stanceView() }) },
      })
      .on("GET", "/validate", { body: { revision: 0, diagnostics: [] } });
    return storeWith(mock);
  }

  it("accepted gesture drop posts the clip and refreshes buckets + badge", async () => {
    const mock = new FetchMock().on("POST", "/clips", {
      status: 201,
      body: { revision: 1, clip: { id: "g1" } },
    });
    const store = readyStore(mock);
    await store.refresh();
    mock.calls = [];
    store.selectStance("s1");
    const ok = await store.dropClip({ id: "g1", duration: 1 }, "gesture");
    expect(ok).toBe(true);
    expect(mock.calls[0].body).toMatchObject({ id: "g1", kind: "gesture", stance: "s1" });
    // bucket update and validation badge refresh after the mutation
    expect(mock.paths("GET")).toContain("GET /graph");
    expect(mock.paths("GET")).toContain("GET /validate");
  });

  it("transition drop records the selected destination", async () => {
    const mock = new FetchMock().on("POST", "/clips", {
      status: 201,
      body: { revision: 1, clip: { id: "t1" } },
    });
    const store = readyStore(mock);
    await store.refresh();
    store.selectStance("s1");
    store.selectTargetStance("s2");
    await store.dropClip({ id: "t1", duration: 1 }, "transition");
    expect(mock.calls.find((c) => c.method === "POST")?.body).toMatchObject({
      kind: "stance_transition",
      stance: "s1",
      to_stance: "s2",
    });
  });

  it("409 duplicate id opens the rename prompt", async () => {
    const mock = new FetchMock().on("POST", "/clips", {
      status: 409,
      body: { detail: { message: "clip id 'g1' already exists" } },
    });
    const store = readyStore(mock);
    await store.refresh();
    store.selectStance("s1");
    const ok = await store.dropClip({ id: "g1", duration: 1 }, "gesture");
    expect(ok).toBe(false);
    expect(store.renamePrompt?.takenId).toBe("g1");
  });

  it("422 highlights the offending field with the server's message", async () => {
    const mock = new FetchMock().on("POST", "/clips", {
      status: 422,
      body: {
        detail: {
          message: "blend_in + blend_out (1.4) exceeds playable length (1.0)",
          clip: "g1",
          field: "blend_out",
        },
      },
    });
    const store = readyStore(mock);
    await store.refresh();
    store.selectStance("s1");
    const ok = await store.dropClip({ id: "g1", duration: 1 }, "gesture");
    expect(ok).toBe(false);
    expect(store.fieldError).toEqual({
      clip: "g1",
      field: "blend_out",
      message: "blend_in + blend_out (1.4) exceeds playable length (1.0)",
    });
  });
});

describe("revision tracking", () => {
  it("view reflects the server revision after refresh", async () => {
    const mock = new FetchMock()
      .on("GET", "/graph", { body: { revision: 7, graph: emptyGraph } })
      .on("GET", "/validate", { body: { revision: 7, diagnostics: [] } });
    const store = storeWith(mock);
    await store.refresh();
    expect(store.revision).toBe(7);
  });

  it("stale selection is cleared when the stance disappears server-side", async () => {
    const mock = new FetchMock()
      .on("GET", "/graph", { body: { revision: 1, graph: graphWith({ s1: stanceView() }) } })
      .on("GET", "/graph", { body: { revision: 2, graph: emptyGraph } })
      .on("GET", "/validate", { body: { revision: 2, diagnostics: [] } });
    const store = storeWith(mock);
    await store.refresh();
    store.selectStance("s1");
    await store.refresh();
    expect(store.selectedStance).toBeNull();
  });
});
