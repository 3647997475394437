// Properties-panel semantics: optimistic cache update, rollback on 4xx,
// verbatim field-level server messages, retry-once after a refresh when
// the view went stale.

import { afterEach, describe, expect, it, vi } from "vitest";
import { ApiClient } from "../src/api";
import { GraphStore } from "../src/store";
import { FetchMock, graphWith } from "./mock";

afterEach(() => vi.unstubAllGlobals());

const stanceView = { layer: "arms", gestures: ["g1"], fidgets: [], transitions_out: {} };

function seeded(mock: FetchMock): GraphStore {
  mock.install();
  const store = new GraphStore(new ApiClient());
  store.clipCache["g1"] = {
    id: "g1",
    kind: "gesture",
    layer: "arms",
    stance: "s1",
    duration: 1.0,
    base_likelihood: 1.0,
  };
  return store;
}

describe("editProperty", () => {
  it("applies the server's canonical record on success", async () => {
    const mock = new FetchMock().on("PATCH", "/clips/g1", {
      body: { revision: 1, clip: { id: "g1", base_likelihood: 2.5, trim_end: 1.0 } },
    });
    const store = seeded(mock);
    const ok = await store.editProperty("g1", "base_likelihood", 2.5);
    expect(ok).toBe(true);
    expect(store.clipCache["g1"].base_likelihood).toBe(2.5);
    expect(mock.calls[0].body).toEqual({ base_likelihood: 2.5 });
  });

  it("optimistic value is visible before the response lands", async () => {
    let release!: () => void;
    const gate = new Promise<void>((r) => (release = r));
    vi.stubGlobal("fetch", async () => {
      await gate;
      return new Response(JSON.stringify({ revision: 1, clip: { id: "g1", duration: 9 } }), {
        status: 200,
      });
    });
    const store = new GraphStore(new ApiClient());
    store.clipCache["g1"] = { id: "g1", kind: "gesture", layer: "arms", duration: 1.0 };
    const pending = store.editProperty("g1", "duration", 9);
    expect(store.clipCache["g1"].duration).toBe(9); // optimistic
    release();
    await pending;
    expect(store.clipCache["g1"].duration).toBe(9);
  });

  it("rolls back and shows the verbatim message on 422", async () => {
    const mock = new FetchMock().on("PATCH", "/clips/g1", {
      status: 422,
      body: {
        detail: {
          message: "base_likelihood must be > 0, got -1.0",
          clip: "g1",
          field: "base_likelihood",
        },
      },
    });
    const store = seeded(mock);
    const ok = await store.editProperty("g1", "base_likelihood", -1.0);
    expect(ok).toBe(false);
    expect(store.clipCache["g1"].base_likelihood).toBe(1.0); // rolled back
    expect(store.fieldError?.message).toBe("base_likelihood must be > 0, got -1.0");
    expect(store.fieldError?.field).toBe("base_likelihood");
  });

  it("stale view: 404 triggers refresh and a single retry", async () => {
    const mock = new FetchMock()
      .on("PATCH", "/clips/g1", {
        status: 404,
        body: { detail: { message: "no clip with id 'g1'" } },
      })
      .on("PATCH", "/clips/g1", {
        body: { revision: 3, clip: { id: "g1", duration: 2.0 } },
      })
      .on("GET", "/graph", { body: { revision: 2, graph: graphWith({ s1: stanceView }) } })
      .on("GET", "/validate", { body: { revision: 2, diagnostics: [] } });
    const store = seeded(mock);
    const ok = await store.editProperty("g1", "duration", 2.0);
    expect(ok).toBe(true);
    expect(mock.paths("PATCH")).toHaveLength(2);
    expect(mock.paths("GET")).toContain("GET /graph");
  });

  it("404 without the clip reappearing reports the error once", async () => {
    const mock = new FetchMock()
      .on("PATCH", "/clips/gone", {
        status: 404,
        body: { detail: { message: "no clip with id 'gone'" } },
      })
      .on("GET", "/graph", { body: { revision: 2, graph: graphWith({}) } })
      .on("GET", "/validate", { body: { revision: 2, diagnostics: [] } });
    const store = seeded(mock);
    const ok = await store.editProperty("gone", "duration", 2.0);
    expect(ok).toBe(false);
    expect(mock.paths("PATCH")).toHaveLength(1);
    expect(store.fieldError?.message).toMatch(/no clip/);
  });
});
