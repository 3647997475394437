// End-to-end parity against the real authoring service (not a mock): the
// scripted session builds a small embodiment through the same store and
// preview objects the UI uses, then checks the server-side expansion and
// that two seeds preview two different schedules.

import { spawn, type ChildProcess } from "node:child_process";
import { mkdtempSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { GraphStore } from "../src/store";
import { PlanPreview } from "../src/preview";
import type { RequestsDoc } from "../src/types";

const PORT = 8743;
const BASE = `http://127.0.0.1:${PORT}`;

const EMPTY_MANIFEST = {
  format_version: 1,
  skeleton: {
    joints: [
      { name: "root", parent: null, body_part: "spine" },
      { name: "hand", parent: 0, body_part: "arms" },
    ],
  },
  base_pose: [
    { rotation: [1, 0, 0, 0], translation: [0, 1, 0] },
    { rotation: [1, 0, 0, 0], translation: [0.2, 0, 0] },
  ],
  clips: [],
};

let server: ChildProcess | null = null;

async function waitForServer(): Promise<void> {
  for (let i = 0; i < 60; i++) {
    try {
      const res = await fetch(`${BASE}/graph`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    await new Promise((r) => setTimeout(r, 500));
  }
  throw new Error("authoring service did not come up");
}

beforeAll(async () => {
  const dir = mkdtempSync(join(tmpdir(), "embodiment-ui-"));
  const manifest = join(dir, "session.manifest.json");
  writeFileSync(manifest, JSON.stringify(EMPTY_MANIFEST));
  server = spawn(
    "python3",
    ["-m", "embodiment.cli", "serve", manifest, "--port", String(PORT)],
    { stdio: "ignore" },
  );
  await waitForServer();
});

afterAll(() => {
  server?.kill();
});

describe("scripted authoring session against the live service", () => {
  const api = new ApiClient(BASE);
  const store = new GraphStore(api);
  const preview = new PlanPreview(api);

  it("builds 2 stances, 2 transitions, 2 gestures through drag-drop calls", async () => {
    await store.refresh();
    expect(await store.dropClip({ id: "open", duration: 2.0 }, "stance")).toBe(true);
    expect(await store.dropClip({ id: "folded", duration: 2.0 }, "stance")).toBe(true);

    store.selectStance("open");
    store.selectTargetStance("folded");
    expect(await store.dropClip({ id: "fold", duration: 1.2 }, "transition")).toBe(true);
    store.selectStance("folded");
    store.selectTargetStance("open");
    expect(await store.dropClip({ id: "unfold", duration: 1.2 }, "transition")).toBe(true);

    // both gestures onto the same stance so sampling has a real choice
    store.selectStance("open");
    expect(await store.dropClip({ id: "wave", duration: 1.0 }, "gesture")).toBe(true);
    expect(await store.dropClip({ id: "flick", duration: 0.8 }, "gesture")).toBe(true);

    const open = store.graph.stances["open"];
    expect(open.gestures.sort()).toEqual(["flick", "wave"]);
    expect(open.transitions_out).toEqual({ folded: ["fold"] });
  });

  it("gating rules hold against the live server too", async () => {
    store.selectStance(null);
    expect(await store.dropClip({ id: "nope", duration: 1 }, "gesture")).toBe(false);
    expect(store.hint).toMatch(/select a stance/i);

    store.selectStance("open");
    expect(await store.dropClip({ id: "wave", duration: 1 }, "gesture")).toBe(false);
    expect(store.renamePrompt?.takenId).toBe("wave");
    store.dismissErrors();
  });

  it("edits base_likelihood through the properties panel path", async () => {
    expect(await store.editProperty("wave", "base_likelihood", 3.0)).toBe(true);
    expect(store.clipCache["wave"].base_likelihood).toBe(3.0);
    // and a bad edit surfaces the server's field-level message
    expect(await store.editProperty("wave", "base_likelihood", -1.0)).toBe(false);
    expect(store.fieldError?.field).toBe("base_likelihood");
    expect(store.fieldError?.message).toMatch(/base_likelihood/);
  });

  it("server-side expansion reports 10 edges", async () => {
    const res = await api.getExpand("open");
    expect(res.machine.nodes).toHaveLength(6);
    expect(res.machine.edges).toHaveLength(10);
  });

  it("preview with two seeds shows two distinct sampled schedules", async () => {
    const requests: RequestsDoc = {
      requests: Array.from({ length: 6 }, (_, i) => ({
        type: "abstract",
        kind: "gesture",
        layer: "arms",
        start: i * 2.0,
      })),
    };
    const first = await preview.preview(requests, 1);
    const second = await preview.resample(first.plan, 2);
    expect(first.slots.filter((s) => !s.discarded).length).toBeGreaterThan(0);
    expect(first.signature).not.toBe(second.signature);
    // identical seed reproduces identically (no hidden server RNG)
    const again = await preview.resample(first.plan, 1);
    expect(again.signature).toBe(first.signature);
  });

  it("the view always reflects a single server revision", async () => {
    const before = store.revision;
    await store.refresh();
    expect(store.revision).toBeGreaterThanOrEqual(before);
    const graph = await api.getGraph();
    const validate = await api.getValidate();
    expect(validate.revision).toBe(graph.revision);
  });
});
