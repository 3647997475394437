import "./style.css";
import { ApiClient } from "./api";
import { GraphStore, type BucketKind, type PaletteItem } from "./store";
import { PlanPreview, type PreviewResult } from "./preview";
import {
  renderBadge,
  renderMessages,
  renderProperties,
  renderSheet,
  renderTimeline,
  type Handlers,
} from "./render";
import type { RequestsDoc } from "./types";

const api = new ApiClient("");
const store = new GraphStore(api);
const preview = new PlanPreview(api);

let lastPreview: PreviewResult | null = null;
let lastDropPayload: { item: PaletteItem; target: BucketKind } | null = null;

const $ = (id: string) => document.getElementById(id)!;

// palette: clip stubs the author drags onto meta nodes; a real deployment
// would list imported animation files here instead
const PALETTE: PaletteItem[] = [
  { id: "new_clip", duration: 1.2 },
  { id: "subtle_idle", duration: 2.0 },
  { id: "big_gesture", duration: 1.6, semantic_tags: ["positive"] },
  { id: "small_tick", duration: 0.8 },
];

function renderPalette() {
  const root = $("palette");
  root.textContent = "";
  for (const item of PALETTE) {
    const chip = document.createElement("div");
    chip.className = "palette-item";
    chip.draggable = true;
    chip.textContent = `${item.id} (${item.duration}s)`;
    chip.addEventListener("dragstart", (e) => {
      const unique = { ...item, id: `${item.id}_${store.revision + 1}` };
      e.dataTransfer?.setData("application/x-clip", JSON.stringify(unique));
    });
    root.appendChild(chip);
  }
}

const handlers: Handlers = {
  onSelectStance: (id) => store.selectStance(id),
  onSelectTarget: (id) => store.selectTargetStance(id),
  onSelectClip: (id) => store.selectClip(id),
  onDrop: (target, payload) => {
    const item = JSON.parse(payload) as PaletteItem;
    lastDropPayload = { item, target };
    void store.dropClip(item, target);
  },
  onEdit: (clipId, field, value) => {
    void store.editProperty(clipId, field as never, value);
  },
  onRename: (newId) => {
    if (!lastDropPayload) return;
    const retry = { ...lastDropPayload.item, id: newId };
    store.dismissErrors();
    void store.dropClip(retry, lastDropPayload.target);
  },
};

function renderAll() {
  renderSheet($("sheet"), store, handlers);
  renderBadge($("badge"), store);
  renderMessages($("messages"), store, handlers);
  renderProperties($("properties"), store, handlers);
  renderTimeline($("timeline"), lastPreview);
}

store.subscribe(renderAll);

async function runPreview() {
  const seed = Number(($("seed") as HTMLInputElement).value) || 0;
  let doc: RequestsDoc;
  try {
    doc = JSON.parse(($("requests") as HTMLTextAreaElement).value) as RequestsDoc;
  } catch {
    store.hint = "requests document is not valid JSON";
    renderAll();
    return;
  }
  try {
    lastPreview = await preview.preview(doc, seed);
  } catch (err) {
    store.hint = err instanceof Error ? err.message : String(err);
  }
  renderAll();
}

async function reseed() {
  if (!lastPreview) return runPreview();
  const input = $("seed") as HTMLInputElement;
  input.value = String(Number(input.value || "0") + 1);
  try {
    lastPreview = await preview.resample(lastPreview.plan, Number(input.value));
  } catch (err) {
    store.hint = err instanceof Error ? err.message : String(err);
  }
  renderAll();
}

$("preview-btn").addEventListener("click", () => void runPreview());
$("reseed-btn").addEventListener("click", () => void reseed());

renderPalette();
void store.refresh();
